#include "nlsa/picard.hpp"

#include <algorithm>
#include <cmath>

#include "nlsa/errors.hpp"

namespace nlsa {

void PicardConfig::validate() const {
    if (max_iterations < 1) throw InvalidParameter("max_iterations must be positive");
    if (!(xt_tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (time_nodes < 2) throw InvalidParameter("need at least 2 time intervals");
    if (substeps < 1) throw InvalidParameter("substeps must be positive");
}

bool boundary_mass_warning(const GridFunction& u0) {
    const int n = u0.grid.num_points;
    const int edge = std::max(1, n / 20);
    const double top = u0.max_abs();
    if (top == 0.0) return false;
    double outer = 0.0;
    for (int j = 0; j < edge; ++j) outer = std::max({outer, std::abs(u0.values(j)), std::abs(u0.values(n - 1 - j))});
    return outer > 1e-8 * top;
}

SpaceTimeField semigroup_evolve(const GridFunction& u0, const std::vector<double>& times, const EquationParams& p) {
    SpaceTimeField out(u0.grid, times);
    const ArrayXcd hat = fft(u0.values);
    const double inv_n = 1.0 / u0.grid.num_points;
    for (int k = 0; k < out.num_times(); ++k) {
        if (times[k] == 0.0) {
            out.data.col(k) = u0.values.matrix();
            continue;
        }
        out.data.col(k) = (inv_n * ifft(propagator_symbol(u0.grid, times[k], p) * hat)).matrix();
    }
    return out;
}

GridFunction nonlinearity_eval(const GridFunction& u, const EquationParams& p, bool full_derivative_mode) {
    if (full_derivative_mode && !p.derivative_terms_combine())
        throw ModeMismatch("full-derivative form needs d = 2e");
    const ArrayXcd& v = u.values;
    const ArrayXd mod2 = v.abs2();
    ArrayXcd out = cplx(0.0, 1.0) * p.c * mod2 * v;
    if (full_derivative_mode) {
        if (p.e != 0.0) out += p.e * derivative(GridFunction(u.grid, mod2 * v)).values;
    } else if (p.d != 0.0 || p.e != 0.0) {
        const ArrayXcd ux = derivative(u).values;
        out += p.d * mod2 * ux + p.e * v.square() * ux.conjugate();
    }
    return GridFunction(u.grid, out);
}

DifferenceResiduals difference_identity_residuals(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid == v.grid)) throw InvalidParameter("fields live on different grids");
    const ArrayXcd& a = u.values;
    const ArrayXcd& b = v.values;
    const ArrayXcd ax = derivative(u).values;
    const ArrayXcd bx = derivative(v).values;
    const ArrayXcd w = b - a;
    const ArrayXcd wx = bx - ax;
    auto rel = [](const ArrayXcd& lhs, const ArrayXcd& rhs) {
        const double scale = lhs.abs().maxCoeff();
        const double diff = (lhs - rhs).abs().maxCoeff();
        return scale > 0.0 ? diff / scale : diff;
    };
    DifferenceResiduals r;
    r.cubic = rel(b.abs2() * b - a.abs2() * a, (b.abs2() + a * b.conjugate()) * w + a.square() * w.conjugate());
    r.d_term = rel(b.abs2() * bx - a.abs2() * ax,
                   b.abs2() * wx + b * ax * w.conjugate() + a.conjugate() * ax * w);
    r.e_term = rel(b.square() * bx.conjugate() - a.square() * ax.conjugate(),
                   b.square() * wx.conjugate() + (b + a) * ax.conjugate() * w);
    return r;
}

namespace {

// E1(z) = (e^z - 1) / z and E2(z) = (e^z (z - 1) + 1) / z^2
void phi_functions(cplx z, cplx& e1, cplx& e2) {
    if (std::abs(z) < 1.0) {
        cplx term = 1.0;  // z^n / n!
        e1 = 0.0;
        e2 = 0.0;
        for (int n = 0; n < 30; ++n) {
            e1 += term / double(n + 1);
            e2 += term / double(n + 2);
            term *= z / double(n + 1);
        }
        return;
    }
    const cplx ez = std::exp(z);
    e1 = (ez - 1.0) / z;
    e2 = (ez * (z - 1.0) + 1.0) / (z * z);
}

SpaceTimeField interpolate_in_time(const SpaceTimeField& f, int substeps) {
    std::vector<double> fine;
    fine.reserve((f.num_times() - 1) * substeps + 1);
    for (int k = 0; k + 1 < f.num_times(); ++k)
        for (int s = 0; s < substeps; ++s)
            fine.push_back(f.times[k] + (f.times[k + 1] - f.times[k]) * s / substeps);
    fine.push_back(f.times.back());
    SpaceTimeField out(f.grid, fine);
    for (int k = 0; k + 1 < f.num_times(); ++k)
        for (int s = 0; s < substeps; ++s) {
            const double w = double(s) / substeps;
            out.data.col(k * substeps + s) = (1.0 - w) * f.data.col(k) + w * f.data.col(k + 1);
        }
    out.data.col(out.num_times() - 1) = f.data.col(f.num_times() - 1);
    return out;
}

SpaceTimeField coarsen(const SpaceTimeField& fine, const std::vector<double>& times, int substeps) {
    SpaceTimeField out(fine.grid, times);
    for (int k = 0; k < out.num_times(); ++k) out.data.col(k) = fine.data.col(k * substeps);
    return out;
}

}  // namespace

SpaceTimeField duhamel_integral(const SpaceTimeField& f, const EquationParams& p, DuhamelRule rule, int substeps) {
    if (substeps < 1) throw InvalidParameter("substeps must be positive");
    if (rule == DuhamelRule::Trapezoid && substeps > 1)
        return coarsen(duhamel_integral(interpolate_in_time(f, substeps), p, rule, 1), f.times, substeps);

    const Grid& g = f.grid;
    const int n = g.num_points;
    const ArrayXd xi = g.frequencies();
    const ArrayXd lambda = p.a * xi.square() + p.b * xi.cube();
    SpaceTimeField out(g, f.times);
    ArrayXcd acc = ArrayXcd::Zero(n);
    ArrayXcd prev = fft(f.data.col(0).array());
    const double inv_n = 1.0 / n;
    for (int k = 0; k + 1 < f.num_times(); ++k) {
        const double h = f.times[k + 1] - f.times[k];
        const ArrayXcd next = fft(f.data.col(k + 1).array());
        for (int j = 0; j < n; ++j) {
            const double ph = lambda(j) * h;
            const cplx prop(std::cos(ph), std::sin(ph));
            cplx w_prev, w_next;
            if (rule == DuhamelRule::Product) {
                cplx e1, e2;
                phi_functions(cplx(0.0, ph), e1, e2);
                w_prev = h * e2;
                w_next = h * (e1 - e2);
            } else {
                w_prev = 0.5 * h * prop;
                w_next = 0.5 * h;
            }
            acc(j) = prop * acc(j) + w_prev * prev(j) + w_next * next(j);
        }
        out.data.col(k + 1) = (inv_n * ifft(acc)).matrix();
        prev = next;
    }
    return out;
}

SpaceTimeField duhamel_apply(const SpaceTimeField& u, const GridFunction& u0, const EquationParams& p,
                             const PicardConfig& cfg) {
    if (!(u.grid == u0.grid)) throw InvalidParameter("field and initial data live on different grids");
    SpaceTimeField out = semigroup_evolve(u0, u.times, p);
    if (p.is_linear()) return out;
    const int sub = cfg.rule == DuhamelRule::Trapezoid ? cfg.substeps : 1;
    const SpaceTimeField uu = sub > 1 ? interpolate_in_time(u, sub) : u;
    SpaceTimeField nl(u.grid, uu.times);
    for (int k = 0; k < uu.num_times(); ++k) {
        GridFunction v = nonlinearity_eval(uu.frame(k), p, cfg.full_derivative_mode);
        if (cfg.dealias) v = dealias(v);
        nl.set_frame(k, v);
    }
    SpaceTimeField w = duhamel_integral(nl, p, cfg.rule, 1);
    if (sub > 1) w = coarsen(w, u.times, sub);
    out.data -= w.data;
    return out;
}

std::pair<SpaceTimeField, ContractionReport> picard_iterate(const GridFunction& u0, double T, const EquationParams& p,
                                                            const PicardConfig& cfg) {
    cfg.validate();
    p.validate();
    if (cfg.full_derivative_mode && !p.derivative_terms_combine())
        throw ModeMismatch("full-derivative form needs d = 2e");
    ContractionReport rep;
    rep.T = T;
    if (boundary_mass_warning(u0)) rep.warnings.push_back("initial data is not negligible near the domain boundary");

    const std::vector<double> times = SpaceTimeField::uniform_times(T, cfg.time_nodes);
    SpaceTimeField u = semigroup_evolve(u0, times, p);
    int increases = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        SpaceTimeField next = duhamel_apply(u, u0, p, cfg);
        const double d = x_norm(next - u, p);
        if (!std::isfinite(d)) throw NonContraction("Picard iterates left the representable range");
        if (!rep.distances.empty()) increases = d > rep.distances.back() ? increases + 1 : 0;
        rep.distances.push_back(d);
        rep.iterations = it + 1;
        u = std::move(next);
        if (d <= cfg.xt_tolerance) {
            rep.converged = true;
            break;
        }
        if (increases >= 3)
            throw NonContraction("X_T distance grew three times in a row (last " + std::to_string(d) +
                                 ") at T = " + std::to_string(T));
    }
    std::vector<double> q;
    for (std::size_t k = 0; k + 1 < rep.distances.size(); ++k)
        if (rep.distances[k] > 0.0) q.push_back(rep.distances[k + 1] / rep.distances[k]);
    if (!q.empty()) {
        std::sort(q.begin(), q.end());
        const std::size_t h = q.size() / 2;
        rep.ratio = q.size() % 2 ? q[h] : 0.5 * (q[h - 1] + q[h]);
    }
    return {std::move(u), std::move(rep)};
}

std::pair<double, double> choose_rho_T(double h_norm, double weighted_norm, double C, double theta, double T_max) {
    if (!(C > 0.0) || !(theta > 0.0)) throw InvalidParameter("C and theta must be positive");
    if (!(T_max > 0.0)) throw InvalidParameter("T_max must be positive");
    const double rho = 2.0 * C * (h_norm + weighted_norm);
    if (rho == 0.0) return {0.0, T_max};
    auto excess = [&](double T) { return C * T * h_norm + C * std::pow(T, theta) * rho * rho * rho - 0.5 * rho; };
    if (excess(T_max) <= 0.0) return {rho, T_max};
    double lo = 0.0, hi = T_max;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) <= 0.0 ? lo : hi) = mid;
    }
    return {rho, lo};
}

std::pair<double, double> choose_rho_T(const GridFunction& u0, const EquationParams& p, double C, double theta,
                                       double T_max) {
    return choose_rho_T(sobolev_norm(u0, p.s), weight_multiply(u0, p.m).l2_norm(), C, theta, T_max);
}

double fit_theta(const std::vector<double>& Ts, const std::vector<double>& ratios) {
    if (Ts.size() != ratios.size() || Ts.size() < 2) throw InvalidParameter("need at least two (T, ratio) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(Ts.size());
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!(Ts[i] > 0.0) || !(ratios[i] > 0.0)) throw InvalidParameter("fit needs positive T and ratios");
        const double x = std::log(Ts[i]), y = std::log(ratios[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ContractionScan contraction_scan(const GridFunction& u0, double T, const EquationParams& p, const PicardConfig& cfg,
                                 int levels) {
    ContractionScan scan;
    for (int i = 0; i < levels; ++i) {
        const double Ti = std::ldexp(T, -i);
        const ContractionReport rep = picard_iterate(u0, Ti, p, cfg).second;
        scan.Ts.push_back(Ti);
        scan.ratios.push_back(rep.ratio);
    }
    bool positive = true;
    for (double r : scan.ratios) positive = positive && r > 0.0;
    if (positive && levels >= 2) scan.theta = fit_theta(scan.Ts, scan.ratios);
    return scan;
}

PersistenceReport persistence_report(const SpaceTimeField& u, const EquationParams& p) {
    PersistenceReport r;
    r.norms = mu_norms(u, p);
    auto spreads = [](const std::vector<double>& h, double& spread, double& mm) {
        spread = 1.0;
        mm = 1.0;
        if (h.empty() || h.front() == 0.0) return;
        const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
        for (double v : h) spread = std::max({spread, v / h.front(), h.front() / v});
        mm = *hi / *lo;
    };
    spreads(r.norms.h_quarter_history, r.h_spread, r.h_max_over_min);
    spreads(r.norms.weighted_history, r.weighted_spread, r.weighted_max_over_min);
    return r;
}

EquationParams soliton_params(const std::string& name) {
    if (name == "NLS") return reduction_preset("NLS", -2.0);
    if (name == "mKdV") return reduction_preset("mKdV");
    throw InvalidParameter("no closed-form soliton named '" + name + "'");
}

namespace {

cplx soliton_value(const std::string& name, double A, double x0, double x, double t) {
    if (name == "NLS") {
        const double ph = A * A * t;
        return A / std::cosh(A * (x - x0)) * cplx(std::cos(ph), std::sin(ph));
    }
    if (name == "mKdV") return std::sqrt(6.0) * A / std::cosh(A * (x - A * A * t - x0));
    throw InvalidParameter("no closed-form soliton named '" + name + "'");
}

}  // namespace

SpaceTimeField soliton_oracle(const std::string& name, double amplitude, double shift, const Grid& g,
                              const std::vector<double>& times) {
    if (!(amplitude > 0.0)) throw InvalidParameter("soliton amplitude must be positive");
    SpaceTimeField out(g, times);
    for (int k = 0; k < out.num_times(); ++k)
        for (int j = 0; j < g.num_points; ++j) out.data(j, k) = soliton_value(name, amplitude, shift, g.point(j), times[k]);
    return out;
}

double soliton_residual(const std::string& name, double amplitude, double shift, const Grid& g, double t) {
    const EquationParams p = soliton_params(name);
    const GridFunction u = GridFunction::sample(g, [&](double x) { return soliton_value(name, amplitude, shift, x, t); });
    const GridFunction ux = derivative(u);
    const GridFunction uxx = derivative(ux);
    const GridFunction uxxx = derivative(uxx);
    // both solutions are travelling or rotating waves with known time derivative
    const ArrayXcd ut = name == "NLS" ? ArrayXcd(cplx(0.0, amplitude * amplitude) * u.values)
                                     : ArrayXcd(-amplitude * amplitude * ux.values);
    const ArrayXcd res = ut + cplx(0.0, p.a) * uxx.values + p.b * uxxx.values + nonlinearity_eval(u, p, false).values;
    return res.abs().maxCoeff() / u.max_abs();
}

}  // namespace nlsa
