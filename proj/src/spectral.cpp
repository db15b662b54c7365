#include "nlsa/spectral.hpp"

#include <fftw3.h>
#include <unsupported/Eigen/FFT>

#include <cmath>

#include "nlsa/errors.hpp"

namespace nlsa {

namespace {

struct PlannerGuard {
    PlannerGuard() { fftw_make_planner_thread_safe(); }
};

Eigen::FFT<double>& engine() {
    static PlannerGuard guard;
    thread_local Eigen::FFT<double> fft = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return fft;
}

inline double parity(long k) { return (k & 1) ? -1.0 : 1.0; }

}  // namespace

Grid::Grid(int n, double len) : num_points(n), length(len) {
    if (n < 2 || n % 2 != 0)
        throw InvalidParameter("grid size must be a positive even integer");
    if (!(len > 0.0) || !std::isfinite(len))
        throw InvalidParameter("grid length must be positive");
}

ArrayXd Grid::points() const {
    return ArrayXd::LinSpaced(num_points, 0, num_points - 1) * spacing() - 0.5 * length;
}

ArrayXd Grid::frequencies() const {
    ArrayXd xi(num_points);
    const int half = num_points / 2;
    for (int k = 0; k < num_points; ++k) xi(k) = (k < half ? k : k - num_points) * frequency_step();
    return xi;
}

Grid Grid::dual() const { return Grid(num_points, kTwoPi * num_points / length); }

GridFunction::GridFunction(const Grid& g) : grid(g), values(ArrayXcd::Zero(g.num_points)) {}

GridFunction::GridFunction(const Grid& g, ArrayXcd v) : grid(g), values(std::move(v)) {
    if (values.size() != g.num_points)
        throw InvalidParameter("sample count does not match grid size");
}

double GridFunction::l2_norm() const {
    return std::sqrt(grid.spacing() * values.abs2().sum());
}

GridFunction operator+(const GridFunction& f, const GridFunction& g) {
    return GridFunction(f.grid, f.values + g.values);
}

GridFunction operator-(const GridFunction& f, const GridFunction& g) {
    return GridFunction(f.grid, f.values - g.values);
}

GridFunction operator*(cplx s, const GridFunction& f) { return GridFunction(f.grid, s * f.values); }

ArrayXcd fft(const ArrayXcd& v) {
    ArrayXcd out(v.size());
    engine().fwd(out.data(), v.data(), static_cast<int>(v.size()));
    return out;
}

ArrayXcd ifft(const ArrayXcd& v) {
    ArrayXcd out(v.size());
    engine().inv(out.data(), v.data(), static_cast<int>(v.size()));
    return out;
}

GridFunction dft_forward(const GridFunction& f) {
    const int n = f.grid.num_points;
    const int half = n / 2;
    const ArrayXcd raw = fft(f.values);
    ArrayXcd out(n);
    const double dx = f.grid.spacing();
    for (int j = 0; j < n; ++j) {
        const long k = j - half;
        out(j) = dx * parity(k) * raw((k + n) % n);
    }
    return GridFunction(f.grid.dual(), std::move(out));
}

GridFunction dft_inverse(const GridFunction& F) {
    const int n = F.grid.num_points;
    const int half = n / 2;
    ArrayXcd shuffled(n);
    for (int j = 0; j < n; ++j) {
        const long k = j - half;
        shuffled((k + n) % n) = parity(k) * F.values(j);
    }
    const double scale = F.grid.spacing() / kTwoPi;
    return GridFunction(F.grid.dual(), scale * ifft(shuffled));
}

GridFunction apply_multiplier(const GridFunction& f, const ArrayXcd& symbol) {
    const double inv_n = 1.0 / f.grid.num_points;
    return GridFunction(f.grid, inv_n * ifft(symbol * fft(f.values)));
}

ArrayXcd propagator_symbol(const Grid& g, double t, const EquationParams& p) {
    return symbol_values(g, [&](double xi) {
        const double phase = t * (p.a * xi * xi + p.b * xi * xi * xi);
        return cplx(std::cos(phase), std::sin(phase));
    });
}

GridFunction propagator_apply(const GridFunction& f, double t, const EquationParams& p) {
    if (t == 0.0) return f;
    return apply_multiplier(f, propagator_symbol(f.grid, t, p));
}

GridFunction fractional_derivative(const GridFunction& f, double alpha) {
    if (alpha == 0.0) return f;
    return apply_symbol(f, [alpha](double xi) { return cplx(std::pow(std::abs(xi), alpha), 0.0); });
}

GridFunction derivative(const GridFunction& f) {
    const double nyq = f.grid.nyquist();
    return apply_symbol(f, [nyq](double xi) {
        return xi == -nyq ? cplx(0.0) : cplx(0.0, xi);
    });
}

GridFunction bracket_multiplier(const GridFunction& f, double sigma) {
    if (sigma == 0.0) return f;
    return apply_symbol(f, [sigma](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.5 * sigma), 0.0); });
}

namespace {

double h_fn(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double step_fn(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double p = h_fn(x), q = h_fn(1.0 - x);
    return p / (p + q);
}

}  // namespace

double EtaProfile::operator()(double x) const {
    if (x <= 0.5 || x >= 2.0) return 0.0;
    return step_fn(2.0 * x - 1.0) - step_fn(x - 1.0);
}

double EtaProfile::dyadic_sum(double x) const {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    const int centre = static_cast<int>(std::floor(std::log2(ax)));
    double total = 0.0;
    for (int N = centre - 2; N <= centre + 2; ++N) total += (*this)(std::ldexp(ax, -N));
    return total;
}

double qn_symbol(double x, int N, const EtaProfile& eta) {
    const double y = std::ldexp(x, -N);
    return eta(y) + eta(-y);
}

double qn_m_symbol(double x, int N, double m, const EtaProfile& eta) {
    const double q = qn_symbol(x, N, eta);
    if (q == 0.0 || m == 0.0) return q;
    return std::pow(std::abs(std::ldexp(x, -N)), m) * q;
}

std::pair<int, int> qn_resolvable_range(const Grid& g) {
    const double lowest = g.frequency_step();
    const double highest = g.nyquist();
    const int lo = static_cast<int>(std::floor(std::log2(lowest) - 1.0)) + 1;
    const int hi = static_cast<int>(std::ceil(std::log2(highest) + 1.0)) - 1;
    return {lo, hi};
}

namespace {

void require_band(const Grid& g, int N) {
    const auto [lo, hi] = qn_resolvable_range(g);
    if (N < lo || N > hi)
        throw BandOutOfRange("dyadic band N=" + std::to_string(N) + " outside resolvable range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

GridFunction qn_apply(const GridFunction& F, int N, const EtaProfile& eta) {
    require_band(F.grid, N);
    return apply_symbol(F, [&](double x) { return cplx(qn_symbol(x, N, eta), 0.0); });
}

GridFunction qn_m_apply(const GridFunction& F, int N, double m, const EtaProfile& eta) {
    require_band(F.grid, N);
    return apply_symbol(F, [&](double x) { return cplx(qn_m_symbol(x, N, m, eta), 0.0); });
}

GridFunction weight_multiply(const GridFunction& f, double m) {
    if (m == 0.0) return f;
    const ArrayXd w = f.grid.points().abs().pow(m);
    return GridFunction(f.grid, f.values * w.cast<cplx>());
}

GridFunction dealias(const GridFunction& f) {
    const int n = f.grid.num_points;
    const int keep = n / 3;
    ArrayXcd hat = fft(f.values);
    for (int k = 0; k < n; ++k) {
        const int kk = k < n / 2 ? k : k - n;
        if (std::abs(kk) > keep) hat(k) = 0.0;
    }
    return GridFunction(f.grid, ifft(hat) / double(n));
}

GridFunction band_limit(const GridFunction& f, double cutoff) {
    const ArrayXd xi = f.grid.frequencies();
    ArrayXcd hat = fft(f.values);
    for (Eigen::Index k = 0; k < hat.size(); ++k)
        if (std::abs(xi(k)) > cutoff) hat(k) = 0.0;
    return GridFunction(f.grid, ifft(hat) / double(f.grid.num_points));
}

}  // namespace nlsa
