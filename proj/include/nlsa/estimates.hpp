#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlsa/norms.hpp"
#include "nlsa/params.hpp"
#include "nlsa/random_fields.hpp"

namespace nlsa {

/// Exponents of a product estimate in L^p_x L^q_T, with
/// 1/p = 1/p1 + 1/p2 and 1/q = 1/q1 + 1/q2.
struct ExponentTuple {
    double p = 2, q = 2;
    double p1 = 4, q1 = 4;
    double p2 = 4, q2 = 4;

    /// Throws ExponentMismatch when the Hoelder relations or the ranges fail.
    /// q1 may be infinite when allow_q1_inf is set.
    void validate(bool allow_q1_inf) const;
};

struct EstimateSample {
    int sample_id = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool discarded = false;
};

struct EstimateRun {
    Grid grid;
    int samples = 0;
    int discarded = 0;
    std::vector<EstimateSample> records;
    double max_ratio = 0.0;
    double theta = 0.0;                     // staffilani only
    std::vector<double> horizons;           // staffilani only
    std::vector<double> max_ratio_by_horizon;
    std::vector<std::string> warnings;
};

struct EstimateSweepResult {
    std::string name;
    std::uint64_t seed = 0;
    EstimateRun base;
    EstimateRun refined;   // doubled grid and sample count
    double drift = 0.0;    // |refined.max - base.max| / base.max
    bool stable = false;   // drift < tolerance and discards <= 5 %
    bool theta_positive = true;
};

struct EstimateConfig {
    Grid grid{1024, 80.0};
    int samples = 200;
    std::uint64_t seed = 7;
    double T = 1.0;
    int time_nodes = 32;
    RandomFieldSpec field;
    EquationParams params{};          // a = 0, b = 1
    double alpha = 0.5;               // commutator, chain rules, nlem32
    double kpv_alpha1 = 0.125, kpv_alpha2 = 0.125;
    ExponentTuple kpv_exponents{2, 2, 4, 4, 4, 4};
    ExponentTuple chain_exponents{2, 2, 4, kInf, 4, 2};
    int staffilani_levels = 5;        // T, T/2, ..., T/2^(levels-1)
    double stability_tolerance = 0.2;
    int threads = 1;
};

/// Names accepted by run_estimate.
const std::vector<std::string>& estimate_names();

// One (lhs, rhs) pair per estimate.
std::pair<double, double> smoothing_pair(const SpaceTimeField& f, const EquationParams& p);
std::pair<double, double> staffilani_pair(const SpaceTimeField& f);
/// phi_x_sup is sup |phi'|; phi is passed by values.
std::pair<double, double> commutator_pair(const GridFunction& phi, double phi_x_sup, const GridFunction& f,
                                          double alpha);
std::pair<double, double> chain_rule_pair(const GridFunction& u, double alpha);
std::pair<double, double> chain_rule_spacetime_pair(const SpaceTimeField& u, double alpha, const ExponentTuple& ex);
std::pair<double, double> leibniz_kpv_pair(const SpaceTimeField& f, const SpaceTimeField& g, double alpha1,
                                           double alpha2, const ExponentTuple& ex);
/// RHS uses sup_x sum_N |Q_N D^alpha g| over the resolvable N range;
/// tail_fraction receives the share of the two outermost N at each end, taken where the sum peaks.
std::pair<double, double> leibniz_nlem32_pair(const GridFunction& f, const GridFunction& g, double alpha,
                                              double* tail_fraction = nullptr);

/// Throws InvalidParameter for an unknown name.
EstimateRun run_estimate_once(const std::string& name, const EstimateConfig& cfg);
EstimateSweepResult run_estimate(const std::string& name, const EstimateConfig& cfg);

}  // namespace nlsa
