#include "nlsa/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nlsa/errors.hpp"
#include "nlsa/parallel.hpp"
#include "nlsa/picard.hpp"

namespace nlsa {

void ExponentTuple::validate(bool allow_q1_inf) const {
    auto open = [](double v) { return v > 1.0 && std::isfinite(v); };
    if (!open(p) || !open(q) || !open(p1) || !open(p2) || !open(q2))
        throw ExponentMismatch("exponents p, q, p1, p2, q2 must lie in (1, inf)");
    if (!(q1 > 1.0) || (!allow_q1_inf && !std::isfinite(q1)))
        throw ExponentMismatch("exponent q1 must lie in (1, inf]");
    if (std::abs(1.0 / p - (1.0 / p1 + 1.0 / p2)) > 1e-12)
        throw ExponentMismatch("1/p must equal 1/p1 + 1/p2");
    if (std::abs(1.0 / q - (1.0 / q1 + 1.0 / q2)) > 1e-12)
        throw ExponentMismatch("1/q must equal 1/q1 + 1/q2");
}

const std::vector<std::string>& estimate_names() {
    static const std::vector<std::string> names{"smoothing",  "staffilani",  "commutator",    "chain_rule",
                                                "chain_rule_spacetime", "leibniz_kpv", "leibniz_nlem32"};
    return names;
}

namespace {

ArrayXcd abs_power_symbol(const Grid& g, double alpha) {
    return symbol_values(g, [alpha](double xi) { return cplx(alpha == 0.0 ? 1.0 : std::pow(std::abs(xi), alpha), 0.0); });
}

SpaceTimeField frac(const SpaceTimeField& u, double alpha) {
    if (alpha == 0.0) return u;
    return apply_multiplier(u, abs_power_symbol(u.grid, alpha));
}

SpaceTimeField pointwise(const SpaceTimeField& u, const Eigen::ArrayXXcd& v) {
    return SpaceTimeField(u.grid, u.times, v.matrix());
}

}  // namespace

std::pair<double, double> smoothing_pair(const SpaceTimeField& f, const EquationParams& p) {
    const SpaceTimeField w = duhamel_integral(f, p);
    const double nyq = f.grid.nyquist();
    const ArrayXcd dsym = symbol_values(f.grid, [nyq](double xi) { return xi == -nyq ? cplx(0.0) : cplx(0.0, xi); });
    return {mixed_norm_t_x(apply_multiplier(w, dsym), kInf, 2), mixed_norm_x_t(f, 1, 2)};
}

std::pair<double, double> staffilani_pair(const SpaceTimeField& f) {
    const double lhs = mixed_norm_t_x(f, 5, kInf);
    const double rhs = mixed_norm_x_t(f, 5, 10) + mixed_norm_x_t(frac(f, 0.25), 5, 10);
    return {lhs, rhs};
}

std::pair<double, double> commutator_pair(const GridFunction& phi, double phi_x_sup, const GridFunction& f,
                                          double alpha) {
    const GridFunction a = GridFunction(f.grid, phi.values * fractional_derivative(f, alpha).values);
    const GridFunction b = fractional_derivative(GridFunction(f.grid, phi.values * f.values), alpha);
    return {(a - b).l2_norm(), phi_x_sup * f.l2_norm()};
}

std::pair<double, double> chain_rule_pair(const GridFunction& u, double alpha) {
    const GridFunction F(u.grid, u.values.abs2() * u.values);
    const double lhs = fractional_derivative(F, alpha).l2_norm();
    const double top = u.max_abs();
    return {lhs, top * top * fractional_derivative(u, alpha).l2_norm()};
}

std::pair<double, double> chain_rule_spacetime_pair(const SpaceTimeField& u, double alpha, const ExponentTuple& ex) {
    ex.validate(true);
    const Eigen::ArrayXXcd v = u.data.array();
    const SpaceTimeField F = pointwise(u, v.abs2() * v);
    const SpaceTimeField Fp = pointwise(u, v.abs2().cast<cplx>());
    const double lhs = mixed_norm_x_t(frac(F, alpha), ex.p, ex.q);
    const double rhs = mixed_norm_x_t(Fp, ex.p1, ex.q1) * mixed_norm_x_t(frac(u, alpha), ex.p2, ex.q2);
    return {lhs, rhs};
}

std::pair<double, double> leibniz_kpv_pair(const SpaceTimeField& f, const SpaceTimeField& g, double alpha1,
                                           double alpha2, const ExponentTuple& ex) {
    ex.validate(true);
    if (!(alpha1 >= 0.0 && alpha2 >= 0.0)) throw ExponentMismatch("alpha1 and alpha2 must be nonnegative");
    const double alpha = alpha1 + alpha2;
    const Eigen::ArrayXXcd fv = f.data.array(), gv = g.data.array();
    const SpaceTimeField fg = pointwise(f, fv * gv);
    const Eigen::ArrayXXcd diff =
        frac(fg, alpha).data.array() - fv * frac(g, alpha).data.array() - gv * frac(f, alpha).data.array();
    const double lhs = mixed_norm_x_t(pointwise(f, diff), ex.p, ex.q);
    const double rhs = mixed_norm_x_t(frac(f, alpha1), ex.p1, ex.q1) * mixed_norm_x_t(frac(g, alpha2), ex.p2, ex.q2);
    return {lhs, rhs};
}

std::pair<double, double> leibniz_nlem32_pair(const GridFunction& f, const GridFunction& g, double alpha,
                                              double* tail_fraction) {
    const GridFunction fg(f.grid, f.values * g.values);
    const GridFunction lhs_f = fractional_derivative(fg, alpha) - GridFunction(f.grid, g.values * fractional_derivative(f, alpha).values);
    const GridFunction dg = fractional_derivative(g, alpha);
    const auto [n_lo, n_hi] = qn_resolvable_range(g.grid);
    ArrayXd total = ArrayXd::Zero(g.grid.num_points);
    ArrayXd edge = ArrayXd::Zero(g.grid.num_points);
    for (int N = n_lo; N <= n_hi; ++N) {
        const ArrayXd piece = qn_apply(dg, N).values.abs();
        total += piece;
        if (N <= n_lo + 1 || N >= n_hi - 1) edge += piece;
    }
    if (tail_fraction) {
        Eigen::Index at = 0;
        const double top = total.maxCoeff(&at);
        *tail_fraction = top > 0.0 ? edge(at) / top : 0.0;
    }
    return {lhs_f.l2_norm(), total.maxCoeff() * f.l2_norm()};
}

namespace {

// Independent streams for the first and second field of a sample.
constexpr std::uint64_t kSecondStream = 0x9e3779b97f4a7c15ULL;

struct PhiSample {
    double slope, center;
};

PhiSample draw_phi(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x70u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {0.5 + 1.5 * u(rng), -4.0 + 8.0 * u(rng)};
}

}  // namespace

EstimateRun run_estimate_once(const std::string& name, const EstimateConfig& cfg) {
    const auto& names = estimate_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw InvalidParameter("unknown estimate '" + name + "'");
    if (cfg.samples < 1) throw InvalidParameter("need at least one sample");

    EstimateRun run;
    run.grid = cfg.grid;
    run.samples = cfg.samples;
    run.records.resize(cfg.samples);
    const Grid& g = cfg.grid;
    const std::vector<double> times = SpaceTimeField::uniform_times(cfg.T, cfg.time_nodes);
    const std::uint64_t s2 = cfg.seed ^ kSecondStream;

    int levels = name == "staffilani" ? std::max(2, cfg.staffilani_levels) : 1;
    std::vector<std::vector<double>> level_ratio(levels, std::vector<double>(cfg.samples, 0.0));
    std::vector<double> tails(cfg.samples, 0.0);

    parallel_for(cfg.samples, cfg.threads, [&](int i) {
        std::pair<double, double> lr{0.0, 0.0};
        const FieldSample a = draw_field(cfg.field, cfg.seed, i);
        if (name == "smoothing") {
            lr = smoothing_pair(sample_field(a, g, times), cfg.params);
        } else if (name == "staffilani") {
            for (int l = 0; l < levels; ++l) {
                const double Tl = std::ldexp(cfg.T, -l);
                const auto pr = staffilani_pair(sample_field(a, g, SpaceTimeField::uniform_times(Tl, cfg.time_nodes)));
                if (l == 0) lr = pr;
                level_ratio[l][i] = pr.second > 0.0 ? pr.first / pr.second : 0.0;
            }
        } else if (name == "commutator") {
            const PhiSample ps = draw_phi(cfg.seed, i);
            const GridFunction phi = GridFunction::sample(g, [&](double x) { return cplx(std::tanh(ps.slope * (x - ps.center)), 0.0); });
            lr = commutator_pair(phi, ps.slope, sample_field(a, g), cfg.alpha);
        } else if (name == "chain_rule") {
            lr = chain_rule_pair(sample_field(a, g), cfg.alpha);
        } else if (name == "chain_rule_spacetime") {
            lr = chain_rule_spacetime_pair(sample_field(a, g, times), cfg.alpha, cfg.chain_exponents);
        } else if (name == "leibniz_kpv") {
            const FieldSample b = draw_field(cfg.field, s2, i);
            lr = leibniz_kpv_pair(sample_field(a, g, times), sample_field(b, g, times), cfg.kpv_alpha1,
                                  cfg.kpv_alpha2, cfg.kpv_exponents);
        } else {
            const FieldSample b = draw_field(cfg.field, s2, i);
            lr = leibniz_nlem32_pair(sample_field(a, g), sample_field(b, g), cfg.alpha, &tails[i]);
        }
        EstimateSample& rec = run.records[i];
        rec.sample_id = i;
        rec.lhs = lr.first;
        rec.rhs = lr.second;
        rec.discarded = !(lr.second > 0.0);
        rec.ratio = rec.discarded ? 0.0 : lr.first / lr.second;
    });

    for (const EstimateSample& r : run.records) {
        run.discarded += r.discarded;
        if (!r.discarded) run.max_ratio = std::max(run.max_ratio, r.ratio);
    }
    if (name == "staffilani") {
        for (int l = 0; l < levels; ++l) {
            run.horizons.push_back(std::ldexp(cfg.T, -l));
            run.max_ratio_by_horizon.push_back(*std::max_element(level_ratio[l].begin(), level_ratio[l].end()));
        }
        run.theta = fit_theta(run.horizons, run.max_ratio_by_horizon);
        // fitted constant C in ratio <= C T^theta
        run.max_ratio = 0.0;
        for (int l = 0; l < levels; ++l)
            run.max_ratio = std::max(run.max_ratio, run.max_ratio_by_horizon[l] / std::pow(run.horizons[l], run.theta));
    }
    if (name == "leibniz_nlem32") {
        const double worst = *std::max_element(tails.begin(), tails.end());
        if (worst > 0.01)
            run.warnings.push_back("outermost dyadic bands carry " + std::to_string(100.0 * worst) + "% of the sum");
    }
    return run;
}

EstimateSweepResult run_estimate(const std::string& name, const EstimateConfig& cfg) {
    EstimateSweepResult res;
    res.name = name;
    res.seed = cfg.seed;
    res.base = run_estimate_once(name, cfg);
    EstimateConfig fine = cfg;
    fine.grid = Grid(2 * cfg.grid.num_points, cfg.grid.length);
    fine.samples = 2 * cfg.samples;
    fine.time_nodes = 2 * cfg.time_nodes;
    res.refined = run_estimate_once(name, fine);
    const double base = res.base.max_ratio;
    res.drift = base > 0.0 ? std::abs(res.refined.max_ratio - base) / base : (res.refined.max_ratio == 0.0 ? 0.0 : kInf);
    auto discards_ok = [](const EstimateRun& r) { return r.discarded * 20 <= r.samples; };
    res.theta_positive = name != "staffilani" || (res.base.theta > 0.0 && res.refined.theta > 0.0);
    res.stable = std::isfinite(base) && res.drift < cfg.stability_tolerance && discards_ok(res.base) &&
                 discards_ok(res.refined) && res.theta_positive;
    return res;
}

}  // namespace nlsa
