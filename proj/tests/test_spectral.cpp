#include <doctest.h>

#include <cmath>

#include "nlsa/errors.hpp"
#include "nlsa/random_fields.hpp"
#include "nlsa/spectral.hpp"

using namespace nlsa;

namespace {

double max_diff(const GridFunction& f, const GridFunction& g) { return (f.values - g.values).abs().maxCoeff(); }

GridFunction gaussian(const Grid& g, double width = 1.0) {
    return GridFunction::sample(g, [&](double x) { return cplx(std::exp(-0.5 * x * x / (width * width)), 0.0); });
}

GridFunction mode(const Grid& g, int k) {
    const double xi = k * g.frequency_step();
    return GridFunction::sample(g, [&](double x) { return std::exp(cplx(0.0, xi * x)); });
}

}  // namespace

TEST_CASE("grid frequencies are symmetric with Nyquist on the negative side") {
    const Grid g(16, 8.0);
    const ArrayXd xi = g.frequencies();
    CHECK(xi(0) == 0.0);
    CHECK(xi(8) == doctest::Approx(-g.nyquist()));
    for (int k = 1; k < 8; ++k) CHECK(xi(k) == doctest::Approx(-xi(16 - k)));
    CHECK(g.spacing() * g.num_points == doctest::Approx(g.length));
}

TEST_CASE("gaussian transform matches the closed form") {
    const Grid g(1024, 80.0);
    const GridFunction F = dft_forward(gaussian(g));
    const Grid d = g.dual();
    double err = 0.0;
    for (int k = 0; k < d.num_points; ++k) {
        const double xi = d.point(k);
        err = std::max(err, std::abs(F.values(k) - std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi)));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("single grid mode lands on one bin with value length") {
    const Grid g(64, 10.0);
    const GridFunction F = dft_forward(mode(g, 3));
    const Grid d = g.dual();
    for (int k = 0; k < d.num_points; ++k) {
        const double expect = std::abs(d.point(k) - 3 * g.frequency_step()) < 1e-9 ? g.length : 0.0;
        CHECK(std::abs(F.values(k) - expect) < 1e-10);
    }
}

TEST_CASE("inverse transform of a zero-frequency bin is constant") {
    const Grid g(32, 5.0);
    GridFunction F(g.dual());
    F.values(g.num_points / 2) = g.length;  // dual grid is ascending, xi = 0 in the middle
    const GridFunction f = dft_inverse(F);
    CHECK((f.values - cplx(1.0, 0.0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("round trip and Plancherel on random fields") {
    const Grid g(1024, 80.0);
    for (int i = 0; i < 10; ++i) {
        const GridFunction f = random_field({}, 3, i, g);
        const GridFunction F = dft_forward(f);
        CHECK(max_diff(dft_inverse(F), f) < 1e-12 * f.max_abs());
        const double lhs = f.l2_norm() * f.l2_norm();
        const double rhs = F.values.abs2().sum() * F.grid.spacing() / kTwoPi;
        CHECK(std::abs(lhs - rhs) < 1e-10 * lhs);
    }
}

TEST_CASE("propagator is unitary and obeys the group law") {
    const Grid g(512, 40.0);
    const EquationParams p = reduction_preset("NLSA-default");
    const GridFunction f = random_field({}, 5, 0, g);
    CHECK(max_diff(propagator_apply(f, 0.0, p), f) == 0.0);
    const GridFunction a = propagator_apply(propagator_apply(f, 0.3, p), 0.45, p);
    const GridFunction b = propagator_apply(f, 0.75, p);
    CHECK(max_diff(a, b) < 1e-10 * f.max_abs());
    CHECK(std::abs(b.l2_norm() - f.l2_norm()) < 1e-10 * f.l2_norm());
}

TEST_CASE("single mode picks up the dispersive phase") {
    // 2 pi k / L = 2 with L = 2 pi, k = 2; phase t (4 + 8) = 2 pi at t = pi / 6
    const Grid g(64, kTwoPi);
    EquationParams p;
    p.a = 1.0;
    p.b = 1.0;
    const GridFunction u = mode(g, 2);
    CHECK(max_diff(propagator_apply(u, kPi / 6.0, p), u) < 1e-12);
    const GridFunction v = propagator_apply(u, 0.1, p);
    CHECK(max_diff(v, GridFunction(g, u.values * std::exp(cplx(0.0, 0.1 * 12.0)))) < 1e-12);
}

TEST_CASE("Airy flow of a gaussian agrees with direct quadrature of the inversion integral") {
    const Grid g(1024, 80.0);
    EquationParams p;
    p.a = 0.0;
    p.b = 1.0;
    const double t = 0.5;
    const GridFunction u = propagator_apply(gaussian(g), t, p);
    for (int j : {470, 500, 512, 530, 560}) {
        const double x = g.point(j);
        // (1/2pi) int e^{i x xi} sqrt(2pi) e^{-xi^2/2} e^{i t xi^3} dxi, Simpson on [-12, 12]
        const int n = 24000;
        const double h = 24.0 / n;
        cplx acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double xi = -12.0 + j * h;
            const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += w * std::exp(cplx(-0.5 * xi * xi, x * xi + t * xi * xi * xi));
        }
        const cplx ref = acc * h / 3.0 * std::sqrt(kTwoPi) / kTwoPi;
        CHECK(std::abs(u.values(j) - ref) < 1e-6 * std::abs(ref));
    }
}

TEST_CASE("fractional derivatives") {
    const Grid g(256, kTwoPi * 4);
    const GridFunction s = GridFunction::sample(g, [](double x) { return cplx(std::sin(3.0 * x), 0.0); });
    CHECK(max_diff(fractional_derivative(s, 1.0), 3.0 * s) < 1e-12);
    const GridFunction f = random_field({}, 9, 1, Grid(1024, 80.0));
    CHECK(max_diff(fractional_derivative(f, 0.0), f) < 1e-15);
    const GridFunction twice = fractional_derivative(fractional_derivative(f, 0.5), 0.5);
    CHECK(max_diff(twice, fractional_derivative(f, 1.0)) < 1e-10);
}

TEST_CASE("Japanese bracket multiplier") {
    const Grid g(64, kTwoPi * 2);
    const GridFunction u = mode(g, 4);  // xi = 2
    CHECK(max_diff(bracket_multiplier(u, 2.0), 5.0 * u) < 1e-12);
    const GridFunction f = random_field({}, 2, 0, Grid(512, 40.0));
    CHECK(max_diff(bracket_multiplier(bracket_multiplier(f, 0.7), -0.7), f) < 1e-10);
    CHECK(max_diff(bracket_multiplier(f, 0.0), f) < 1e-15);
}

TEST_CASE("eta is supported in [1/2, 2] and partitions unity") {
    const EtaProfile eta;
    CHECK(eta(0.5) == 0.0);
    CHECK(eta(2.0) == 0.0);
    CHECK(eta(0.4) == 0.0);
    CHECK(eta(1.0) > 0.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, -6.0 + 12.0 * i / 999.0);
        worst = std::max({worst, std::abs(eta.dyadic_sum(x) - 1.0), std::abs(eta.dyadic_sum(-x) - 1.0)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("dyadic cutoffs") {
    const Grid g(1024, 80.0);
    const auto [lo, hi] = qn_resolvable_range(g);
    CHECK_THROWS_AS(qn_apply(random_field({}, 1, 0, g), hi + 3), BandOutOfRange);
    CHECK_THROWS_AS(qn_apply(random_field({}, 1, 0, g), lo - 3), BandOutOfRange);

    SUBCASE("sum over the range recovers the field minus its mean mode") {
        const GridFunction F = random_field({}, 4, 2, g);
        GridFunction total(g);
        for (int N = lo; N <= hi; ++N) total = total + qn_apply(F, N);
        const ArrayXcd hat = fft(F.values);
        ArrayXcd mean = ArrayXcd::Zero(g.num_points);
        mean(0) = hat(0);
        const GridFunction expect(g, F.values - ifft(mean) / double(g.num_points));
        CHECK(max_diff(total, expect) < 1e-8);
    }
    SUBCASE("a mode inside the flat part of the band passes unchanged") {
        // eta(2^-N x) = 1 exactly at x = 2^N
        const Grid h(256, kTwoPi * 8);  // frequency step 1/8
        const GridFunction u = mode(h, 16);  // xi = 2
        CHECK(max_diff(qn_apply(u, 1), u) < 1e-13);
    }
    SUBCASE("Q_N D^m = 2^{Nm} Q_N^m") {
        for (int i = 0; i < 20; ++i) {
            const GridFunction F = random_field({}, 6, i, g);
            for (int N = -3; N <= 6; ++N) {
                const GridFunction a = qn_apply(fractional_derivative(F, 0.125), N);
                const GridFunction b = std::pow(2.0, N * 0.125) * qn_m_apply(F, N, 0.125);
                CHECK(max_diff(a, b) <= 1e-12 * F.max_abs());
            }
        }
        const GridFunction F = random_field({}, 6, 0, g);
        CHECK(max_diff(qn_m_apply(F, 2, 0.0), qn_apply(F, 2)) == 0.0);
    }
}

TEST_CASE("weights and dealiasing") {
    const Grid g(1024, 80.0);
    const GridFunction f = gaussian(g);
    // int |x| e^{-x^2} dx = 1; the kink of |x| at a node costs O(h^2)
    auto weighted_err = [](const Grid& h) {
        const double w = weight_multiply(gaussian(h), 0.5).l2_norm();
        return std::abs(w * w - 1.0);
    };
    const double coarse = weighted_err(g), fine = weighted_err(Grid(4096, 80.0));
    CHECK(coarse < 2e-3);
    CHECK(coarse / fine == doctest::Approx(16.0).epsilon(0.05));
    CHECK(max_diff(weight_multiply(f, 0.0), f) == 0.0);

    const GridFunction top = mode(g, g.num_points / 2 - 1);
    CHECK(dealias(top).max_abs() < 1e-12);
    const GridFunction r = random_field({}, 8, 0, g);
    CHECK(max_diff(dealias(r), r) < 1e-12);
    const GridFunction d = dealias(GridFunction(g, r.values + top.values));
    CHECK(max_diff(dealias(d), d) < 1e-14);
}

TEST_CASE("weight in x matches D^m of the transform") {
    // |x|^m f and D^m_xi f^ are a transform pair, so the ratio is 1 up to discretization
    const Grid g(1024, 80.0);
    for (int i = 0; i < 20; ++i) {
        const GridFunction f = random_field({}, 12, i, g);
        const double lhs = weight_multiply(f, 0.125).l2_norm();
        const double rhs = fractional_derivative(dft_forward(f), 0.125).l2_norm() / std::sqrt(kTwoPi);
        CHECK(lhs / rhs > 0.5);
        CHECK(lhs / rhs < 2.0);
        CHECK(lhs / rhs == doctest::Approx(1.0).epsilon(1e-3));
    }
}
