#include "nlsa/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nlsa/errors.hpp"
#include "nlsa/parallel.hpp"
#include "nlsa/quadrature.hpp"

namespace nlsa {

namespace {

using cld = std::complex<long double>;

constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;
constexpr int kBaseNodes = 1024;
constexpr int kNodeLevels = 6;
constexpr double kScanStep = 0.02;
constexpr double kScanRange = 5000.0;

std::complex<double> cexp_ld(long double phase) {
    const long double turns = static_cast<long double>(static_cast<long long>(phase / kTwoPiL));
    const long double r = phase - kTwoPiL * turns;
    const double x = static_cast<double>(r);
    return {std::cos(x), std::sin(x)};
}

double next_pow2(double x) {
    double p = 1.0;
    while (p < x) p *= 2.0;
    return p;
}

// P(z) - P(xi) expanded around xi, with s = z - xi.
template <class T>
T relative_phase_poly(const ProbeParams& p, T s) {
    const double p1 = 2.0 * p.a * p.xi + 3.0 * p.b * p.xi * p.xi;
    const double p2 = p.a + 3.0 * p.b * p.xi;
    return s * (p1 + s * (p2 + s * p.b));
}

// e^{i t P(xi)} with the reduction done in extended precision.
std::complex<double> reference_phase(const ProbeParams& p) {
    const long double xi = p.xi;
    const long double phase = static_cast<long double>(p.t) * (p.a * xi * xi + p.b * xi * xi * xi);
    return cexp_ld(phase);
}

// log of omega * g(z) / e^{i t P(xi)} for complex z.
std::complex<double> log_weight(const ProbeParams& p, std::complex<double> z) {
    const std::complex<double> s = z - p.xi;
    const std::complex<double> rel = relative_phase_poly(p, s);
    std::complex<double> out = std::complex<double>(0.0, p.t) * rel + std::log(p.omega);
    if (p.m != 0.0) out -= p.m * std::log(1.0 + z * z);
    return out;
}

double max_abs_derivative(const ProbeParams& p, double lo, double hi) {
    auto dP = [&](double z) { return std::abs(2.0 * p.a * z + 3.0 * p.b * z * z); };
    double best = std::max(dP(lo), dP(hi));
    if (p.b != 0.0) {
        const double vertex = -p.a / (3.0 * p.b);
        if (vertex > lo && vertex < hi) best = std::max(best, dP(vertex));
    }
    return best;
}

}  // namespace

std::string label_name(RegionLabel r) {
    switch (r) {
        case RegionLabel::Near: return "Near";
        case RegionLabel::Intermediate: return "Intermediate";
        case RegionLabel::Far: return "Far";
    }
    return "?";
}

bool hypothesis_holds(double a, double b, double t, double omega) {
    if (b == 0.0 || !(t > 0.0)) return false;
    const double A = a / (2.0 * b);
    const double lhs = omega / (std::abs(b) * t);
    return lhs >= std::max(1.0, 1e4 * A * A);
}

RegionLabel classify_xi(double xi, double a, double b, double t, double omega) {
    if (b == 0.0) throw InvalidParameter("region classification needs b != 0");
    if (!(t > 0.0)) throw InvalidParameter("region classification needs t > 0");
    if (!(omega > 0.0)) throw InvalidParameter("region classification needs omega > 0");
    const double A = a / (2.0 * b);
    const double base = omega / (std::abs(b) * t);
    const double r = (xi + A) * (xi + A);
    if (r <= base / 100.0 + A * A) return RegionLabel::Near;
    if (r <= 100.0 * base + A * A) return RegionLabel::Intermediate;
    return RegionLabel::Far;
}

// ---------------------------------------------------------------------------
// PhiProfile

PhiProfile::PhiProfile(double m, double scale, double tail_rel) : m_(m), scale_(scale), tail_rel_(tail_rel) {
    if (!(m >= 0.0)) throw InvalidParameter("profile exponent m must be nonnegative");
    if (!(tail_rel > 0.0 && tail_rel < 1.0)) throw InvalidParameter("tail threshold must lie in (0, 1)");

    hat_nodes_.resize(kNodeLevels);
    for (int k = 0; k < kNodeLevels; ++k) {
        const int n = kBaseNodes << k;
        std::vector<double>& v = hat_nodes_[k];
        v.resize(n + 1);
        for (int l = 0; l <= n; ++l) v[l] = hat(0.5 + 1.5 * l / n);
    }
    if (scale_ == 0.0) {
        abs_table_.assign(1, 0.0);
        return;
    }

    const long J = static_cast<long>(kScanRange / kScanStep);
    const std::vector<std::complex<double>> tab = table(kScanStep, J);
    peak_ = std::abs(tab[J]);
    long last = 0;
    for (long q = 0; q <= J; ++q)
        if (std::abs(tab[J + q]) >= tail_rel_ * peak_) last = q;
    radius_ = 1.02 * (last + 1) * kScanStep;
    const long keep = static_cast<long>(std::ceil(radius_ / kScanStep)) + 1;
    abs_table_.resize(keep);
    for (long q = 0; q < keep; ++q) abs_table_[q] = std::abs(tab[J + q]);
    abs_step_ = kScanStep;
}

double PhiProfile::hat(double x) const {
    static const EtaProfile eta;
    const double e = eta(x);
    if (e == 0.0) return 0.0;
    return scale_ * (m_ == 0.0 ? e : std::pow(std::abs(x), m_) * e);
}

const std::vector<double>& PhiProfile::nodes_for(int n) const {
    for (int k = 0; k < kNodeLevels; ++k)
        if ((kBaseNodes << k) == n) return hat_nodes_[k];
    throw InvalidParameter("unsupported profile node count");
}

std::complex<double> PhiProfile::eval(std::complex<double> w) const { return eval_scaled(w, 0.0); }

std::complex<double> PhiProfile::eval_scaled(std::complex<double> w, std::complex<double> log_factor) const {
    if (scale_ == 0.0) return 0.0;
    const double need = 1.5 * (std::abs(w.real()) + 2.0 * radius_ + 400.0) / kTwoPi;
    int n = kBaseNodes, level = 0;
    while (n < need) {
        n *= 2;
        if (++level >= kNodeLevels) throw InvalidParameter("argument too far out for the profile quadrature");
    }
    const std::vector<double>& hat_v = nodes_for(n);
    const double h = 1.5 / n;
    const std::complex<double> iw(-w.imag(), w.real());  // i w
    const std::complex<double> step = std::exp(iw * h);
    constexpr int block = 16;
    std::complex<double> sum = 0.0;
    for (int l0 = 1; l0 < n; l0 += block) {
        std::complex<double> e = std::exp(iw * (0.5 + l0 * h) + log_factor);
        const int stop = std::min(n, l0 + block);
        std::complex<double> part = 0.0;
        for (int l = l0; l < stop; ++l) {
            part += hat_v[l] * e;
            e *= step;
        }
        sum += part;
    }
    return sum * (h / kTwoPi);
}

std::vector<std::complex<double>> PhiProfile::table(double dw, long J) const {
    if (!(dw > 0.0) || J < 0) throw InvalidParameter("table needs dw > 0 and J >= 0");
    std::vector<std::complex<double>> out(2 * J + 1, 0.0);
    if (scale_ == 0.0) return out;
    const double alias_span = (radius_ > 0.0 ? radius_ : kScanRange) + 1200.0;
    const double P = next_pow2(std::max<double>(J + 1, alias_span / dw));
    const long n = static_cast<long>(P);
    const double hx = kTwoPi / (P * dw);
    ArrayXcd samples = ArrayXcd::Zero(n);
    const long first = static_cast<long>(std::floor(0.5 / hx));
    const long stop = std::min<long>(n - 1, static_cast<long>(std::ceil(2.0 / hx)));
    for (long l = std::max<long>(first, 0); l <= stop; ++l) samples(l) = hat(l * hx);
    const ArrayXcd raw = ifft(samples);
    const double c = hx / kTwoPi;
    for (long q = 0; q <= J; ++q) {
        const std::complex<double> v = c * raw(q);
        out[J + q] = v;
        out[J - q] = std::conj(v);
    }
    return out;
}

double PhiProfile::mass(double xi, double omega) const {
    if (scale_ == 0.0) return 0.0;
    const long K = static_cast<long>(abs_table_.size());
    double total = 0.0;
    for (long q = -(K - 1); q <= K - 1; ++q) {
        const double w = q * abs_step_;
        const double z = xi - w / omega;
        const double weight = m_ == 0.0 ? 1.0 : std::pow(1.0 + z * z, -m_);
        total += abs_table_[std::abs(q)] * weight;
    }
    return total * abs_step_;
}

std::complex<double> phi_eval_complex(const PhiProfile& profile, std::complex<double> z) { return profile.eval(z); }

std::complex<double> phi_omega(const PhiProfile& profile, double omega, std::complex<double> z) {
    return omega * profile.eval(omega * z);
}

// ---------------------------------------------------------------------------
// Direct quadrature on the real axis

namespace {

struct DirectSum {
    std::complex<double> coarse, fine;
    double mass;
    long nodes;
};

// Trapezoid sums at steps 2h and h from one table; the coarse nodes are the
// even fine nodes.
DirectSum direct_pass(const ProbeParams& p, const PhiProfile& profile, double W, double h) {
    const long J = 2 * static_cast<long>(std::ceil(W / (2.0 * h)));
    const std::vector<std::complex<double>> tab = profile.table(p.omega * h, J);
    const long double p1 = 2.0L * p.a * p.xi + 3.0L * p.b * static_cast<long double>(p.xi) * p.xi;
    const long double p2 = p.a + 3.0L * p.b * p.xi;
    const long double bt = p.b;
    const long double t = p.t;
    cld even = 0.0L, odd = 0.0L;
    long double mass = 0.0L;
    for (long j = -J; j <= J; ++j) {
        const std::complex<double> k = tab[J - j];  // phi(-omega s_j)
        if (k == 0.0) continue;
        const long double s = static_cast<long double>(j) * h;
        const long double phase = t * s * (p1 + s * (p2 + s * bt));
        const double z = p.xi + static_cast<double>(s);
        const double weight = p.m == 0.0 ? 1.0 : std::pow(1.0 + z * z, -p.m);
        const std::complex<double> term = k * cexp_ld(phase) * weight;
        (j % 2 == 0 ? even : odd) += cld(term.real(), term.imag());
        mass += std::abs(k) * weight;
    }
    const double scale = p.omega * h;
    auto to_d = [](cld v) { return std::complex<double>(static_cast<double>(v.real()), static_cast<double>(v.imag())); };
    return {to_d(even) * (2.0 * scale), to_d(even + odd) * scale, static_cast<double>(mass) * scale, 2 * J + 1};
}

}  // namespace

QuadratureResult osc_integral_direct(const ProbeParams& p, const PhiProfile& profile, const DirectOptions& opt) {
    if (!(p.omega > 0.0)) throw InvalidParameter("omega must be positive");
    if (!(p.t >= 0.0)) throw InvalidParameter("t must be nonnegative");
    QuadratureResult out;
    if (profile.scale() == 0.0) return out;

    const double W = profile.tail_radius() / p.omega;
    const double f_g = p.t * max_abs_derivative(p, p.xi - W, p.xi + W);
    const double dz = kTwoPi / (opt.points_per_period * (f_g + 2.0 * p.omega));

    const DirectSum pass = direct_pass(p, profile, W, 0.5 * dz);
    const std::complex<double> ref = reference_phase(p);

    out.value = ref * pass.fine;
    out.error = std::abs(pass.fine - pass.coarse);
    out.mass = pass.mass;
    out.evaluations = pass.nodes;
    const double scale = std::max(std::abs(pass.fine), opt.floor_rel * pass.mass);
    out.converged = out.error <= opt.converge_rel * scale;
    if (out.error > opt.fail_rel * scale)
        throw NonConvergence("direct quadrature: step halving changed the result by " +
                             std::to_string(out.error / scale) + " (relative)");
    return out;
}

// ---------------------------------------------------------------------------
// Contour route

double contour_radius(const ProbeParams& p, double epsilon_near) {
    const RegionLabel label = classify(p);
    if (label == RegionLabel::Near) return epsilon_near;
    if (label == RegionLabel::Far) return std::sqrt(p.omega / (std::abs(p.b) * p.t));
    throw InvalidParameter("no contour is defined for Intermediate points");
}

void check_contour(double xi, double epsilon) {
    if (std::abs(xi) < epsilon && epsilon * epsilon - xi * xi >= 1.0)
        throw ContourViolation("semicircle of radius " + std::to_string(epsilon) + " around " + std::to_string(xi) +
                               " encloses part of {Re z = 0, |Im z| >= 1}");
}

namespace {

// omega phi(omega (xi - z)) g(z) / e^{i t P(xi)}; zero where |Re w| > R.
std::complex<double> integrand_rel(const ProbeParams& p, const PhiProfile& profile, std::complex<double> z) {
    const std::complex<double> w = p.omega * (p.xi - z);
    if (std::abs(w.real()) > profile.tail_radius()) return 0.0;
    const std::complex<double> L = log_weight(p, z);
    const double v = w.imag();
    const double bound = L.real() + std::max(-0.5 * v, -2.0 * v) + std::log(std::max(profile.peak(), 1e-300));
    if (bound < -740.0) return 0.0;
    return profile.eval_scaled(w, L);
}

struct SegmentSum {
    std::complex<double> value{0, 0};
    double error = 0.0;
    long evaluations = 0;
};

// GL panels on a real interval; each panel spans about 25 radians of phase.
SegmentSum real_segment(const ProbeParams& p, const PhiProfile& profile, double lo, double hi) {
    SegmentSum out;
    if (!(hi > lo)) return out;
    const double rate = 2.0 * p.omega + p.t * max_abs_derivative(p, lo, hi);
    const int panels = std::max(1, static_cast<int>(std::ceil(rate * (hi - lo) / 25.0)));
    auto f = [&](double s) { return integrand_rel(p, profile, {s, 0.0}); };
    const std::complex<double> coarse = integrate_gl<std::complex<double>>(f, lo, hi, panels);
    const std::complex<double> fine = integrate_gl<std::complex<double>>(f, lo, hi, 2 * panels);
    out.value = fine;
    out.error = std::abs(fine - coarse);
    out.evaluations = 3L * panels * 64;
    return out;
}

}  // namespace

ContourResult osc_integral_contour(const ProbeParams& p, const PhiProfile& profile, const ContourOptions& opt) {
    const RegionLabel label = classify(p);
    if (label == RegionLabel::Intermediate) throw InvalidParameter("contour route applies to Near and Far points only");
    ContourResult out;
    out.epsilon = contour_radius(p, opt.epsilon_near);
    if (label == RegionLabel::Near && !(out.epsilon < 1.0)) throw InvalidParameter("Near-case radius must be below 1");
    check_contour(p.xi, out.epsilon);
    out.contour = (label == RegionLabel::Near || p.b < 0.0) ? 1 : 2;
    if (profile.scale() == 0.0) return out;

    const double eps = out.epsilon;
    const double W = profile.tail_radius() / p.omega;
    out.mass = profile.mass(p.xi, p.omega);

    SegmentSum tails;
    if (eps < W) {
        const SegmentSum left = real_segment(p, profile, p.xi - W, p.xi - eps);
        const SegmentSum right = real_segment(p, profile, p.xi + eps, p.xi + W);
        tails.value = left.value + right.value;
        tails.error = left.error + right.error;
        tails.evaluations = left.evaluations + right.evaluations;
    }

    // Outside |cos th| <= R / (omega eps) every node is truncated to zero.
    const double c0 = std::min(1.0, profile.tail_radius() / (p.omega * eps));
    const double th0 = std::acos(c0);
    const double lo = out.contour == 1 ? -kPi + th0 : th0;
    const double hi = out.contour == 1 ? -th0 : kPi - th0;
    auto arc = [&](double th) {
        const std::complex<double> e(std::cos(th), std::sin(th));
        const std::complex<double> z = p.xi + eps * e;
        return integrand_rel(p, profile, z) * std::complex<double>(0.0, eps) * e;
    };
    auto arc_bound = [&](double th) {
        const std::complex<double> z = p.xi + eps * std::complex<double>(std::cos(th), std::sin(th));
        const double v = -p.omega * eps * std::sin(th);
        return log_weight(p, z).real() + std::max(-0.5 * v, -2.0 * v) + std::log(std::max(profile.peak(), 1e-300));
    };
    const double reach = std::abs(p.xi) + eps;
    const double rate = 2.0 * p.omega * eps + p.t * eps * (2.0 * std::abs(p.a) * reach + 3.0 * std::abs(p.b) * reach * reach);
    const int panels = hi > lo ? std::max(4, static_cast<int>(std::ceil(rate * (hi - lo) / 25.0))) : 0;
    const double tol = 0.1 * opt.converge_rel * opt.floor_rel * std::max(out.mass, 1e-300) / std::max(panels, 1);
    std::complex<double> gamma = 0.0;
    double gamma_err = 0.0;
    bool gamma_ok = true;
    long evals = 0;
    for (int k = 0; k < panels; ++k) {
        const double a0 = lo + (hi - lo) * k / panels;
        const double a1 = lo + (hi - lo) * (k + 1) / panels;
        // the log bound moves by at most about 12.5 between these samples
        if (std::max({arc_bound(a0), arc_bound(0.5 * (a0 + a1)), arc_bound(a1)}) < -760.0) continue;
        const AdaptiveResult r = integrate_adaptive(arc, a0, a1, tol, 64, 8);
        gamma += r.value;
        gamma_err += r.error;
        gamma_ok = gamma_ok && r.converged;
        evals += 64L * (1 + r.panels);
    }
    if (out.contour == 2) gamma = -gamma;

    const std::complex<double> ref = reference_phase(p);
    out.gamma_piece = ref * gamma;
    out.tail_piece = ref * tails.value;
    out.value = out.gamma_piece + out.tail_piece;
    out.error = gamma_err + tails.error;
    out.evaluations = evals + tails.evaluations;

    const double scale = std::max(std::abs(out.value), opt.floor_rel * out.mass);
    out.converged = gamma_ok && out.error <= opt.converge_rel * scale;

    if (opt.with_segment) {
        const double half = std::min(eps, W);
        const SegmentSum seg = real_segment(p, profile, p.xi - half, p.xi + half);
        out.segment_piece = ref * seg.value;
        out.segment_evaluated = true;
        out.evaluations += seg.evaluations;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole-line deformation

namespace {

struct Deformation {
    double beta = 1.0;
    double kappa = 0.5;
    double s0 = std::numeric_limits<double>::infinity();

    double sigma(double s) const { return std::isinf(s0) ? 0.0 : kappa * std::max(std::abs(s) - s0, 0.0); }
    std::complex<double> z(double s) const { return {s, beta * sigma(s)}; }
    std::complex<double> dz(double s) const {
        if (std::isinf(s0) || std::abs(s) <= s0) return 1.0;
        return {1.0, beta * kappa * (s > 0 ? 1.0 : -1.0)};
    }
};

double log_bound(const ProbeParams& p, const PhiProfile& profile, const Deformation& d, double s) {
    const std::complex<double> z = d.z(s);
    const std::complex<double> L = log_weight(p, z);
    const double v = p.omega * (-z.imag());
    return L.real() + std::max(-0.5 * v, -2.0 * v) + std::log(std::max(profile.peak(), 1e-300)) +
           std::log(std::abs(d.dz(s)));
}

// Outermost point beyond `from` (moving in direction `dir`) at which the
// bound still exceeds `thr`; the bound decays monotonically past s0.
double outer_limit(const ProbeParams& p, const PhiProfile& profile, const Deformation& d, double from, double dir,
                   double limit, double thr) {
    double step = 0.25;
    double inside = from;
    double s = from + dir * step;
    while (dir * (s - limit) < 0.0) {
        if (log_bound(p, profile, d, s) < thr) {
            double a = inside, b = s;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (a + b);
                if (log_bound(p, profile, d, mid) < thr) b = mid; else a = mid;
            }
            return b;
        }
        inside = s;
        step *= 2.0;
        s = from + dir * step;
    }
    return limit;
}

}  // namespace

QuadratureResult osc_integral_global(const ProbeParams& p, const PhiProfile& profile, const GlobalOptions& opt) {
    if (!(p.omega > 0.0)) throw InvalidParameter("omega must be positive");
    if (!(opt.kappa > 0.0 && opt.kappa < 1.0)) throw InvalidParameter("deformation slope must lie in (0, 1)");
    QuadratureResult out;
    if (profile.scale() == 0.0) return out;

    Deformation d;
    d.kappa = opt.kappa;
    d.beta = p.b >= 0.0 ? 1.0 : -1.0;
    if (p.t > 0.0 && p.b != 0.0) {
        const double qa = p.t * (3.0 - opt.kappa * opt.kappa) * std::abs(p.b);
        const double qb = 2.0 * p.t * std::abs(p.a);
        const double root = (qb + std::sqrt(qb * qb + 12.0 * qa * p.omega)) / (2.0 * qa);
        d.s0 = opt.s0_scale * root + opt.s0_shift;
    }

    const double W = profile.tail_radius() / p.omega;
    double lo = p.xi - W, hi = p.xi + W;
    if (opt.allow_direct && lo >= -d.s0 && hi <= d.s0) {
        // the whole window stays on the real axis
        DirectOptions dop;
        dop.converge_rel = opt.rel_tol;
        return osc_integral_direct(p, profile, dop);
    }
    constexpr double thr = -80.0;
    if (!std::isinf(d.s0)) {
        const double right_from = std::max(d.s0, lo);
        const double left_from = std::min(-d.s0, hi);
        if (hi > right_from) hi = outer_limit(p, profile, d, right_from, 1.0, hi, thr);
        if (lo < left_from) lo = outer_limit(p, profile, d, left_from, -1.0, lo, thr);
    }
    out.mass = profile.mass(p.xi, p.omega);
    if (!(hi > lo)) return out;

    std::vector<double> cuts{lo};
    for (double c : {-d.s0, d.s0})
        if (std::isfinite(c) && c > lo && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    auto f = [&](double s) {
        const std::complex<double> z = d.z(s);
        return integrand_rel(p, profile, z) * d.dz(s);
    };
    const GaussLegendre& rule = gauss_legendre(64);
    auto panel_sum = [&](double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        std::complex<double> acc = 0.0;
        for (int i = 0; i < 64; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
        return half * acc;
    };

    std::complex<double> coarse = 0.0, fine = 0.0;
    long evals = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double a = cuts[c];
        const double end = cuts[c + 1];
        while (a < end) {
            const double rate0 = 2.0 * p.omega + p.t * max_abs_derivative(p, a, a);
            double width = std::min(end - a, 25.0 / rate0);
            const double rate1 = 2.0 * p.omega + p.t * max_abs_derivative(p, a, a + width);
            width = std::min(end - a, 25.0 / rate1);
            const double b = (end - a - width < 1e-12 * std::max(1.0, std::abs(end))) ? end : a + width;
            const double bnd = std::max({log_bound(p, profile, d, a), log_bound(p, profile, d, 0.5 * (a + b)),
                                         log_bound(p, profile, d, b)});
            if (bnd > thr - 10.0) {
                coarse += panel_sum(a, b);
                const double m = 0.5 * (a + b);
                fine += panel_sum(a, m) + panel_sum(m, b);
                evals += 192;
            }
            a = b;
        }
    }
    const std::complex<double> ref = reference_phase(p);
    out.value = ref * fine;
    out.error = std::abs(fine - coarse);
    out.evaluations = evals;
    const double scale = std::max(std::abs(fine), 1e-12 * out.mass);
    out.converged = out.error <= opt.rel_tol * scale;
    return out;
}

// ---------------------------------------------------------------------------
// Bound checks

double bound_scale(RegionLabel label, double omega, double m) {
    return label == RegionLabel::Intermediate ? std::pow(omega, m) : omega;
}

ProbeRecord evaluate_probe(const ProbeParams& p, const PhiProfile& profile, double epsilon_near) {
    if (!hypothesis_holds(p))
        throw InvalidParameter("probe violates omega/(|b|t) >= max{1, 1e4 (a/2b)^2}");
    ProbeRecord r;
    r.params = p;
    r.label = classify(p);
    std::complex<double> value;
    if (r.label == RegionLabel::Far) {
        ContourOptions co;
        co.epsilon_near = epsilon_near;
        const ContourResult c = osc_integral_contour(p, profile, co);
        r.contour = c.value;
        r.has_contour = true;
        r.error = c.error;
        r.converged = c.converged;
        value = c.value;
    } else {
        const QuadratureResult d = osc_integral_direct(p, profile);
        r.direct = d.value;
        r.has_direct = true;
        r.error = d.error;
        r.converged = d.converged;
        value = d.value;
    }
    r.mass = profile.mass(p.xi, p.omega);
    const double scale = bound_scale(r.label, p.omega, p.m) / (1.0 + p.t);
    const double eps = std::numeric_limits<double>::epsilon();
    r.ratio = std::abs(value) * scale;
    r.ratio_certified = (std::abs(value) + r.error + 64.0 * eps * r.mass) * scale;
    return r;
}

SweepSpec SweepSpec::prop31_default() {
    SweepSpec s;
    for (int k = 8; k <= 16; ++k) s.omegas.push_back(std::ldexp(1.0, k));
    return s;
}

SweepSpec SweepSpec::refined() const {
    SweepSpec s = *this;
    s.near_per_combo *= 2;
    s.intermediate_per_combo *= 2;
    s.band_intervals *= 2;
    s.far_per_combo *= 2;
    return s;
}

std::vector<ProbeParams> sweep_probes(const SweepSpec& spec) {
    std::vector<ProbeParams> out;
    for (double m : spec.ms)
        for (double a : spec.as)
            for (double b : spec.bs)
                for (double t : spec.ts)
                    for (double omega : spec.omegas) {
                        if (!hypothesis_holds(a, b, t, omega)) continue;
                        const double A = a / (2.0 * b);
                        const double base = omega / (std::abs(b) * t);
                        auto push = [&](double q) {
                            ProbeParams p{a, b, t, omega, m, -A + std::sqrt(A * A + q * base)};
                            out.push_back(p);
                        };
                        for (int j = 0; j < spec.near_per_combo; ++j)
                            push(0.01 * (j + 1) / spec.near_per_combo);
                        for (int j = 0; j < spec.intermediate_per_combo; ++j)
                            push(0.01 * std::pow(1e4, double(j + 1) / spec.intermediate_per_combo));
                        for (int j = 1; j < spec.band_intervals; ++j) {
                            // t P'(xi) = sign(b) omega r, root farthest along xi + A > 0
                            const double r = 0.5 + 1.5 * j / spec.band_intervals;
                            const double disc = 4.0 * a * a + 12.0 * std::abs(b) * omega * r / t;
                            const double r1 = (-2.0 * a + std::sqrt(disc)) / (6.0 * b);
                            const double r2 = (-2.0 * a - std::sqrt(disc)) / (6.0 * b);
                            const double xi = (r1 + A > r2 + A) ? r1 : r2;
                            if (classify_xi(xi, a, b, t, omega) == RegionLabel::Intermediate)
                                out.push_back(ProbeParams{a, b, t, omega, m, xi});
                        }
                        for (int j = 0; j < spec.far_per_combo; ++j)
                            push(100.0 * std::pow(2.0, double(j + 1) / spec.far_per_combo));
                    }
    return out;
}

BoundCheckResult bound_check_probes(const std::vector<ProbeParams>& probes, double epsilon_near,
                                    double ceiling_near_far, double ceiling_intermediate, int threads) {
    for (const ProbeParams& p : probes)
        if (!hypothesis_holds(p)) throw InvalidParameter("probe violates omega/(|b|t) >= max{1, 1e4 (a/2b)^2}");
    std::map<double, PhiProfile> profiles;
    for (const ProbeParams& p : probes)
        if (!profiles.count(p.m)) profiles.emplace(p.m, PhiProfile(p.m));

    BoundCheckResult res;
    res.records.resize(probes.size());
    parallel_for(static_cast<int>(probes.size()), threads, [&](int i) {
        res.records[i] = evaluate_probe(probes[i], profiles.at(probes[i].m), epsilon_near);
    });
    for (const ProbeRecord& r : res.records) {
        res.all_converged = res.all_converged && r.converged;
        if (r.label == RegionLabel::Intermediate) {
            res.max_intermediate = std::max(res.max_intermediate, r.ratio_certified);
            res.max_intermediate_raw = std::max(res.max_intermediate_raw, r.ratio);
        } else {
            res.max_near_far = std::max(res.max_near_far, r.ratio_certified);
            res.max_near_far_raw = std::max(res.max_near_far_raw, r.ratio);
        }
    }
    res.within_ceiling = res.max_near_far <= ceiling_near_far && res.max_intermediate <= ceiling_intermediate;
    return res;
}

BoundCheckResult bound_check_prop31(const SweepSpec& spec, int threads) {
    BoundCheckResult res = bound_check_probes(sweep_probes(spec), spec.epsilon_near, spec.ceiling_near_far,
                                              spec.ceiling_intermediate, threads);
    for (double m : spec.ms)
        for (double a : spec.as)
            for (double b : spec.bs)
                for (double t : spec.ts)
                    for (double omega : spec.omegas) {
                        (void)m;
                        if (!hypothesis_holds(a, b, t, omega)) ++res.skipped_combos;
                    }
    return res;
}

std::vector<ProbeParams> cauchy_probe_set() {
    std::vector<ProbeParams> out;
    for (double m : {0.0, 1.0 / 16, 1.0 / 8})
        for (double a : {0.0, 1.0, 2.0})
            for (double b : {1.0, -1.0})
                for (int k = 8; k <= 16; ++k) {
                    const double omega = std::ldexp(1.0, k);
                    const double A = a / (2.0 * b);
                    const double t = std::min(1.0, omega / (std::abs(b) * std::max(1.0, 1e4 * A * A)));
                    const double base = omega / (std::abs(b) * t);
                    out.push_back({a, b, t, omega, m, -A + std::sqrt(A * A + 0.005 * base)});
                    if (k % 2 == 0) out.push_back({a, b, t, omega, m, -A + std::sqrt(A * A + 120.0 * base)});
                }
    return out;
}

CauchyRecord cauchy_probe(const ProbeParams& p, const PhiProfile& profile, const CauchyOptions& opt) {
    if (!hypothesis_holds(p)) throw InvalidParameter("probe violates omega/(|b|t) >= max{1, 1e4 (a/2b)^2}");
    CauchyRecord r;
    r.params = p;
    r.label = classify(p);
    const QuadratureResult d = osc_integral_direct(p, profile);
    ContourOptions co;
    co.epsilon_near = opt.epsilon_near;
    // For Far points the replaced segment covers the whole window.
    co.with_segment = r.label == RegionLabel::Near;
    const ContourResult c = osc_integral_contour(p, profile, co);
    r.direct = d.value;
    r.contour = c.value;
    r.mass = d.mass;
    r.converged = d.converged && c.converged;
    r.difference = std::abs(d.value - c.value);
    const double big = std::max(std::abs(d.value), std::abs(c.value));
    r.tolerance = opt.rel * std::max(big, opt.floor_rel * r.mass);
    r.agree = r.difference <= r.tolerance;
    r.resolved = big > opt.floor_rel * r.mass;
    const double seg = std::abs(c.segment_piece);
    if (c.segment_evaluated && seg >= opt.piece_floor * r.mass) {
        r.piece_checked = true;
        r.piece_rel = std::abs(c.gamma_piece - c.segment_piece) / seg;
        r.piece_agree = r.piece_rel <= opt.rel;
    }
    return r;
}

CauchyCheckResult cauchy_check(const std::vector<ProbeParams>& probes, const CauchyOptions& opt, int threads) {
    std::map<double, PhiProfile> profiles;
    for (const ProbeParams& p : probes)
        if (!profiles.count(p.m)) profiles.emplace(p.m, PhiProfile(p.m));
    CauchyCheckResult res;
    res.records.resize(probes.size());
    parallel_for(static_cast<int>(probes.size()), threads,
                 [&](int i) { res.records[i] = cauchy_probe(probes[i], profiles.at(probes[i].m), opt); });
    for (const CauchyRecord& r : res.records) {
        (r.label == RegionLabel::Near ? res.near : res.far) += 1;
        res.agreeing += r.agree && r.piece_agree;
        res.resolved += r.resolved;
        res.pieces_checked += r.piece_checked;
        res.pieces_agreeing += r.piece_checked && r.piece_agree;
        res.worst_scaled_difference = std::max(res.worst_scaled_difference, r.difference / r.tolerance);
        res.all_agree = res.all_agree && r.agree && r.piece_agree;
    }
    return res;
}

GammaBoundReport gamma_integrand_bound_check(const ProbeParams& p, int samples, double epsilon_near) {
    GammaBoundReport rep;
    rep.label = classify(p);
    if (rep.label == RegionLabel::Intermediate) throw InvalidParameter("no contour bound for Intermediate points");
    rep.samples = samples;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const double A = p.a / (2.0 * p.b);
    const double xab = p.xi + A;
    const double eps = contour_radius(p, epsilon_near);
    for (int k = 1; k <= samples; ++k) {
        const double th = kPi * k / (samples + 1);
        const double c = std::cos(th), s = std::sin(th);
        const std::complex<double> z = p.xi + eps * std::complex<double>(c, -s);
        const std::complex<double> P = p.a * z * z + p.b * z * z * z;
        const double re = -p.t * P.imag();  // Re[i t P(z)]
        double margin;
        if (rep.label == RegionLabel::Near) {
            const double rhs = 0.25 * p.omega * eps * s;
            margin = rhs - std::abs(re);
            if (margin < -1e-12 * rhs) ++rep.violations;
        } else {
            const double bracket = 2.0 * std::pow(xab + 1.5 * eps * c, 2) + std::pow(xab - A, 2) +
                                   std::pow(A - eps * c, 2) - 3.0 * A * A - 1.5 * eps * eps * c * c - eps * eps;
            const double lower = 3.0 * p.omega / (std::abs(p.b) * p.t);
            margin = bracket - lower;
            if (!(margin > 0.0)) ++rep.violations;
            const double ident = p.t * p.b * eps * s * bracket;
            rep.identity_error = std::max(rep.identity_error, std::abs(re - ident) / std::max(std::abs(ident), 1e-300));
        }
        rep.min_margin = std::min(rep.min_margin, margin);
    }
    rep.holds = rep.violations == 0;
    return rep;
}

double phi_growth_constant(const PhiProfile& profile, double omega, double xi,
                           const std::vector<std::complex<double>>& zs) {
    double best = 0.0;
    for (const std::complex<double>& z : zs) {
        const double y = z.imag();
        if (y == 0.0) continue;
        const std::complex<double> diff = xi - z;
        const double lhs = std::abs(phi_omega(profile, omega, diff));
        const double den = std::abs(std::exp(2.0 * omega * y) - std::exp(0.5 * omega * y));
        const double rhs = den / (omega * omega * std::abs(y) * std::norm(diff));
        best = std::max(best, lhs / rhs);
    }
    return best;
}

double sine_exponential_ratio(double alpha, double beta) {
    if (!(alpha < beta && beta < 0.0)) throw InvalidParameter("need alpha < beta < 0");
    auto f = [&](double th) -> std::complex<double> {
        const double s = std::sin(th);
        if (s == 0.0) return beta - alpha;
        return std::exp(alpha * s) * std::expm1((beta - alpha) * s) / s;
    };
    const AdaptiveResult lhs = integrate_adaptive(f, 0.0, kPi, 1e-13 * (beta - alpha), 32, 30);
    const double r = alpha / beta;
    const double rhs = (kPi * r - 1.0) + 1.0 + (1.0 / (kPi * r)) * std::exp(-kPi * r);
    return lhs.value.real() / rhs;
}

}  // namespace nlsa
