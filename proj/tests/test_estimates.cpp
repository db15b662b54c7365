#include <doctest.h>

#include <cmath>

#include "nlsa/errors.hpp"
#include "nlsa/estimates.hpp"
#include "nlsa/picard.hpp"

using namespace nlsa;

namespace {

EstimateConfig small_config() {
    EstimateConfig cfg;
    cfg.grid = Grid(256, 40.0);
    cfg.samples = 6;
    cfg.time_nodes = 8;
    cfg.T = 0.5;
    cfg.staffilani_levels = 3;
    return cfg;
}

ExponentTuple tuple(double p, double q, double p1, double q1, double p2, double q2) {
    return ExponentTuple{p, q, p1, q1, p2, q2};
}

SpaceTimeField constant_in_time(const GridFunction& f, double T, int K) {
    SpaceTimeField u(f.grid, SpaceTimeField::uniform_times(T, K));
    for (int k = 0; k < u.num_times(); ++k) u.set_frame(k, f);
    return u;
}

GridFunction gauss(const Grid& g, double c = 0.0) {
    return GridFunction::sample(g, [c](double x) { return cplx(std::exp(-(x - c) * (x - c)), 0.0); });
}

}  // namespace

TEST_CASE("exponent tuples") {
    CHECK_NOTHROW(tuple(2, 2, 4, 4, 4, 4).validate(false));
    CHECK_NOTHROW(tuple(2, 2, 4, kInf, 4, 2).validate(true));
    CHECK_THROWS_AS(tuple(2, 2, 4, kInf, 4, 2).validate(false), ExponentMismatch);
    CHECK_THROWS_AS(tuple(2, 2, 4, 4, 4, 3).validate(true), ExponentMismatch);
    CHECK_THROWS_AS(tuple(2, 2, 3, 4, 4, 4).validate(true), ExponentMismatch);
    CHECK_THROWS_AS(tuple(0.5, 2, 1, 4, 1, 4).validate(true), ExponentMismatch);
}

TEST_CASE("closed-form pairs") {
    const Grid g(256, kTwoPi * 8);
    const double xi = 24 * g.frequency_step();  // 3
    const GridFunction mode = GridFunction::sample(g, [xi](double x) { return std::exp(cplx(0.0, xi * x)); });

    SUBCASE("single mode saturates the pointwise chain rule") {
        const auto [lhs, rhs] = chain_rule_pair(mode, 0.5);
        CHECK(lhs == doctest::Approx(std::sqrt(3.0) * std::sqrt(g.length)).epsilon(1e-12));
        CHECK(lhs / rhs == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("a constant multiplier commutes with D^alpha") {
        const GridFunction phi(g, ArrayXcd::Constant(g.num_points, cplx(2.5, 0.0)));
        const auto [lhs, rhs] = commutator_pair(phi, 0.0, gauss(g), 0.5);
        CHECK(lhs < 1e-13);
        CHECK(rhs == 0.0);
    }
    SUBCASE("Leibniz remainder vanishes against a constant") {
        const GridFunction c(g, ArrayXcd::Constant(g.num_points, cplx(0.7, 0.0)));
        const auto [lhs, rhs] =
            leibniz_kpv_pair(constant_in_time(gauss(g), 0.3, 4), constant_in_time(c, 0.3, 4), 0.25, 0.0,
                             tuple(2, 2, 4, 4, 4, 4));
        CHECK(lhs < 1e-12);
        CHECK(rhs > 0.0);
        CHECK_THROWS_AS(leibniz_kpv_pair(constant_in_time(gauss(g), 0.3, 4), constant_in_time(c, 0.3, 4), -0.1,
                                         0.0, tuple(2, 2, 4, 4, 4, 4)),
                        ExponentMismatch);

        double tail = -1.0;
        const auto [l2, r2] = leibniz_nlem32_pair(gauss(g), c, 0.5, &tail);
        CHECK(l2 < 1e-12);
        CHECK(r2 < 1e-12);
    }
    SUBCASE("smoothing and maximal function pairs scale homogeneously") {
        const EquationParams p;
        const SpaceTimeField f = constant_in_time(gauss(g, 1.0), 0.4, 8);
        SpaceTimeField f3 = f;
        f3.data *= 3.0;
        const auto [l1, r1] = smoothing_pair(f, p);
        const auto [l3, r3] = smoothing_pair(f3, p);
        CHECK(l3 == doctest::Approx(3.0 * l1).epsilon(1e-12));
        CHECK(r3 == doctest::Approx(3.0 * r1).epsilon(1e-12));
        const auto [s1, t1] = staffilani_pair(f);
        const auto [s3, t3] = staffilani_pair(f3);
        CHECK(s3 / t3 == doctest::Approx(s1 / t1).epsilon(1e-12));
    }
    SUBCASE("spacetime chain rule on a unit mode") {
        // |u|^2 u = u and |u|^2 = 1, so both sides carry the same factors
        const SpaceTimeField u = constant_in_time(mode, 0.2, 4);
        const auto [lhs, rhs] = chain_rule_spacetime_pair(u, 0.5, tuple(2, 2, 4, kInf, 4, 2));
        CHECK(lhs / rhs == doctest::Approx(std::pow(g.length, 0.25 - 0.5 + 0.25)).epsilon(1e-12));
    }
}

TEST_CASE("sample runs") {
    EstimateConfig cfg = small_config();
    CHECK(estimate_names().size() == 7);
    CHECK_THROWS_AS(run_estimate_once("bogus", cfg), InvalidParameter);

    SUBCASE("zero fields are discarded, not counted") {
        cfg.field.amplitude = 0.0;
        const EstimateRun r = run_estimate_once("chain_rule", cfg);
        CHECK(r.discarded == cfg.samples);
        CHECK(r.max_ratio == 0.0);
    }
    SUBCASE("every estimate runs and is deterministic across thread counts") {
        for (const std::string& name : estimate_names()) {
            if (name == "staffilani") continue;
            cfg.threads = 1;
            const EstimateRun a = run_estimate_once(name, cfg);
            cfg.threads = 3;
            const EstimateRun b = run_estimate_once(name, cfg);
            REQUIRE(a.records.size() == b.records.size());
            for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].ratio == b.records[i].ratio);
            CHECK(a.max_ratio > 0.0);
            CHECK(std::isfinite(a.max_ratio));
        }
    }
    SUBCASE("the maximal function run fits a horizon exponent") {
        const EstimateRun r = run_estimate_once("staffilani", cfg);
        CHECK(r.horizons.size() == 3);
        CHECK(r.max_ratio_by_horizon.size() == 3);
        CHECK(r.horizons[1] == doctest::Approx(0.5 * r.horizons[0]));
        CHECK(std::isfinite(r.theta));
    }
    SUBCASE("refinement doubles the grid and the samples") {
        const EstimateSweepResult s = run_estimate("chain_rule", cfg);
        CHECK(s.refined.grid.num_points == 2 * s.base.grid.num_points);
        CHECK(s.refined.samples == 2 * s.base.samples);
        CHECK(s.drift == doctest::Approx(std::abs(s.refined.max_ratio - s.base.max_ratio) / s.base.max_ratio));
    }
}
