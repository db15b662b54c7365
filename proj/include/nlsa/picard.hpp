#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlsa/norms.hpp"
#include "nlsa/params.hpp"
#include "nlsa/spectral.hpp"

namespace nlsa {

enum class DuhamelRule {
    Product,    // exact exponential weights for N linear between nodes
    Trapezoid,  // trapezoid over nodes, optionally refined by substeps
};

struct PicardConfig {
    int max_iterations = 30;
    double xt_tolerance = 1e-10;
    int time_nodes = 64;  // K; the grid has K + 1 nodes
    int substeps = 1;     // trapezoid refinement, u interpolated linearly in t
    bool dealias = true;
    bool full_derivative_mode = false;
    DuhamelRule rule = DuhamelRule::Product;

    void validate() const;
};

struct ContractionReport {
    std::vector<double> distances;  // d_k = ||u^{k+1} - u^k||_X
    double ratio = 0.0;             // median of d_{k+1} / d_k
    double rho = 0.0;
    double T = 0.0;
    bool converged = false;
    int iterations = 0;
    double theta_fit = 0.0;
    bool theta_fitted = false;
    std::vector<std::string> warnings;
};

/// True when |u0| exceeds 1e-8 max|u0| on the outer 5% of either end.
bool boundary_mass_warning(const GridFunction& u0);

/// Frames S(t_k) u0 with S(t) the free propagator.
SpaceTimeField semigroup_evolve(const GridFunction& u0, const std::vector<double>& times,
                                const EquationParams& p);

/// i c |u|^2 u + d |u|^2 u_x + e u^2 conj(u)_x, or i c |u|^2 u + e (|u|^2 u)_x
/// in full-derivative mode (which requires d = 2e).
GridFunction nonlinearity_eval(const GridFunction& u, const EquationParams& p, bool full_derivative_mode);

/// Max residual, relative to the largest left-hand side entry, of
///   |v|^2 v - |u|^2 u = (|v|^2 + u conj(v)) (v - u) + u^2 conj(v - u)
///   |v|^2 v_x - |u|^2 u_x = |v|^2 (v - u)_x + v u_x conj(v - u) + conj(u) u_x (v - u)
///   v^2 conj(v)_x - u^2 conj(u)_x = v^2 conj(v - u)_x + (v + u) conj(u)_x (v - u)
struct DifferenceResiduals {
    double cubic = 0.0;
    double d_term = 0.0;
    double e_term = 0.0;
};
DifferenceResiduals difference_identity_residuals(const GridFunction& u, const GridFunction& v);

/// w(t_k) = int_0^{t_k} S(t_k - s) f(s) ds
SpaceTimeField duhamel_integral(const SpaceTimeField& f, const EquationParams& p,
                                DuhamelRule rule = DuhamelRule::Product, int substeps = 1);

/// Phi(u)(t_k) = S(t_k) u0 - int_0^{t_k} S(t_k - s) N(u(s)) ds
SpaceTimeField duhamel_apply(const SpaceTimeField& u, const GridFunction& u0, const EquationParams& p,
                             const PicardConfig& cfg);

/// Iterates Phi from the free flow until ||u^{k+1} - u^k||_X <= tolerance.
/// Throws NonContraction after three consecutive increases of d_k.
std::pair<SpaceTimeField, ContractionReport> picard_iterate(const GridFunction& u0, double T,
                                                            const EquationParams& p, const PicardConfig& cfg);

/// rho = 2 C (||u0||_{H^s} + |||x|^m u0||) and the largest T <= T_max with
///   C T ||u0||_{H^s} + C T^theta rho^3 <= rho / 2.
std::pair<double, double> choose_rho_T(const GridFunction& u0, const EquationParams& p, double C, double theta,
                                       double T_max);
/// Same inequality from the two norms directly.
std::pair<double, double> choose_rho_T(double h_norm, double weighted_norm, double C, double theta,
                                       double T_max);

/// Least-squares slope of log r against log T.
double fit_theta(const std::vector<double>& Ts, const std::vector<double>& ratios);

struct ContractionScan {
    std::vector<double> Ts;
    std::vector<double> ratios;
    double theta = 0.0;
};

/// Contraction ratios at T, T/2, ..., T/2^(levels-1) and the fitted exponent.
ContractionScan contraction_scan(const GridFunction& u0, double T, const EquationParams& p,
                                 const PicardConfig& cfg, int levels = 3);

struct PersistenceReport {
    NormReport norms;
    double h_spread = 0.0;         // max over t of max(h/h0, h0/h)
    double weighted_spread = 0.0;
    double h_max_over_min = 0.0;
    double weighted_max_over_min = 0.0;
};

PersistenceReport persistence_report(const SpaceTimeField& u, const EquationParams& p);

/// Closed-form solutions: "NLS" sech(x - x0) e^{i amplitude^2 t} scaled for
/// the (-1, 0, -2, 0, 0) coefficients, "mKdV" sqrt(6) A sech(A (x - A^2 t - x0))
/// for the (0, 1, 0, 1, 0) coefficients.
SpaceTimeField soliton_oracle(const std::string& name, double amplitude, double shift, const Grid& g,
                              const std::vector<double>& times);
/// Coefficients the named soliton solves.
EquationParams soliton_params(const std::string& name);

/// Spectral residual u_t + i a u_xx + b u_xxx + N(u) of the closed form at time t,
/// relative to max |u|.
double soliton_residual(const std::string& name, double amplitude, double shift, const Grid& g, double t);

}  // namespace nlsa
