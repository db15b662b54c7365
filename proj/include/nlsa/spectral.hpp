#pragma once

#include <Eigen/Core>

#include <complex>
#include <utility>

#include "nlsa/params.hpp"

namespace nlsa {

using cplx = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform periodic grid on [-length/2, length/2).
///
/// Frequencies xi_k = 2 pi k / length are stored in FFT order
/// (k = 0, 1, ..., n/2-1, -n/2, ..., -1); the Nyquist mode sits on the
/// negative side.
struct Grid {
    int num_points = 1024;
    double length = 80.0;

    Grid() = default;
    Grid(int n, double len);

    double spacing() const { return length / num_points; }
    double point(int j) const { return -0.5 * length + j * spacing(); }
    double frequency_step() const { return kTwoPi / length; }
    double nyquist() const { return kPi / spacing(); }

    ArrayXd points() const;
    ArrayXd frequencies() const;

    /// Grid carrying the transform side: same size, spacing 2 pi / length,
    /// samples in ascending order starting at -nyquist().
    Grid dual() const;

    bool operator==(const Grid& o) const = default;
};

struct GridFunction {
    Grid grid;
    ArrayXcd values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g);
    GridFunction(const Grid& g, ArrayXcd v);

    template <class Fn>
    static GridFunction sample(const Grid& g, Fn&& fn) {
        GridFunction out(g);
        for (int j = 0; j < g.num_points; ++j) out.values(j) = fn(g.point(j));
        return out;
    }

    /// sqrt(spacing * sum |f_j|^2)
    double l2_norm() const;
    double max_abs() const { return values.abs().maxCoeff(); }
};

GridFunction operator+(const GridFunction& f, const GridFunction& g);
GridFunction operator-(const GridFunction& f, const GridFunction& g);
GridFunction operator*(cplx s, const GridFunction& f);

// Unscaled FFT pair on raw coefficient arrays (FFT order on the frequency side).
ArrayXcd fft(const ArrayXcd& v);
ArrayXcd ifft(const ArrayXcd& v);

/// f^(xi) = int e^{-i x xi} f(x) dx as a spacing-weighted DFT.  The result
/// lives on grid.dual(), ordered by ascending xi.
GridFunction dft_forward(const GridFunction& f);

/// Inverse of dft_forward, carrying the 1/(2 pi) of the inversion formula.
GridFunction dft_inverse(const GridFunction& F);

/// Multiply the transform of f by a symbol given in FFT order.
GridFunction apply_multiplier(const GridFunction& f, const ArrayXcd& symbol);

template <class Fn>
ArrayXcd symbol_values(const Grid& g, Fn&& fn) {
    const ArrayXd xi = g.frequencies();
    ArrayXcd out(xi.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) out(k) = fn(xi(k));
    return out;
}

template <class Fn>
GridFunction apply_symbol(const GridFunction& f, Fn&& fn) {
    return apply_multiplier(f, symbol_values(f.grid, std::forward<Fn>(fn)));
}

ArrayXcd propagator_symbol(const Grid& g, double t, const EquationParams& p);
GridFunction propagator_apply(const GridFunction& f, double t, const EquationParams& p);

/// D^alpha, symbol |xi|^alpha (with 0^0 = 1).
GridFunction fractional_derivative(const GridFunction& f, double alpha);
/// d/dx, symbol i xi.  The Nyquist mode is dropped.
GridFunction derivative(const GridFunction& f);
/// <xi>^sigma = (1 + xi^2)^(sigma/2)
GridFunction bracket_multiplier(const GridFunction& f, double sigma);

/// Smooth bump supported in [1/2, 2] with sum_N eta(2^-N x) = 1 for x > 0.
struct EtaProfile {
    double operator()(double x) const;
    /// sum over N of eta(2^-N x) + eta(-2^-N x) over the (at most two) active terms
    double dyadic_sum(double x) const;
};

double qn_symbol(double x, int N, const EtaProfile& eta = {});
double qn_m_symbol(double x, int N, double m, const EtaProfile& eta = {});

/// Inclusive range of N whose band [2^{N-1}, 2^{N+1}] meets the nonzero
/// frequencies of the grid.
std::pair<int, int> qn_resolvable_range(const Grid& g);

/// Q_N on a function sampled on g; the symbol is evaluated at the
/// conjugate variable of g.  Throws BandOutOfRange outside
/// qn_resolvable_range(g).
GridFunction qn_apply(const GridFunction& F, int N, const EtaProfile& eta = {});
GridFunction qn_m_apply(const GridFunction& F, int N, double m, const EtaProfile& eta = {});

/// Pointwise |x|^m f(x).
GridFunction weight_multiply(const GridFunction& f, double m);

/// 2/3 rule: keep |k| <= n/3, zero the rest.
GridFunction dealias(const GridFunction& f);
/// Keep |xi| <= cutoff.
GridFunction band_limit(const GridFunction& f, double cutoff);

}  // namespace nlsa
