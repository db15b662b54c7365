#pragma once

#include <Eigen/Core>

#include <limits>
#include <vector>

#include "nlsa/spectral.hpp"

namespace nlsa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Samples u(x_j, t_k); column k holds the frame at times[k].
struct SpaceTimeField {
    Grid grid;
    std::vector<double> times;
    Eigen::MatrixXcd data;

    SpaceTimeField() = default;
    SpaceTimeField(const Grid& g, std::vector<double> t);
    SpaceTimeField(const Grid& g, std::vector<double> t, Eigen::MatrixXcd d);

    int num_times() const { return static_cast<int>(times.size()); }
    double horizon() const { return times.back(); }
    GridFunction frame(int k) const;
    void set_frame(int k, const GridFunction& f);

    /// Uniform nodes t_k = k T / K, k = 0..K.
    static std::vector<double> uniform_times(double T, int K);
};

SpaceTimeField operator-(const SpaceTimeField& u, const SpaceTimeField& v);

/// Apply a Fourier symbol (FFT order) to every frame.
SpaceTimeField apply_multiplier(const SpaceTimeField& u, const ArrayXcd& symbol);

struct NormReport {
    double mu1 = 0, mu2 = 0, mu3 = 0, mu4 = 0, mu5 = 0;
    double y_norm = 0;
    double weighted_sup = 0;
    double x_norm = 0;
    std::vector<double> h_quarter_history;
    std::vector<double> weighted_history;
};

double lp_norm(const GridFunction& f, double p);
double sobolev_norm(const GridFunction& f, double s);

/// L^p_x L^q_T: inner norm over t, outer over x.
double mixed_norm_x_t(const SpaceTimeField& u, double p, double q);
/// L^q_T L^p_x: inner norm over x, outer over t.
double mixed_norm_t_x(const SpaceTimeField& u, double q, double p);

double weighted_sup_norm(const SpaceTimeField& u, double m);

NormReport mu_norms(const SpaceTimeField& u, const EquationParams& p);
double x_norm(const SpaceTimeField& u, const EquationParams& p);

/// Trapezoid weights for the node sequence.
Eigen::ArrayXd trapezoid_weights(const std::vector<double>& times);

}  // namespace nlsa
