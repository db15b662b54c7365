#pragma once

#include <cstdint>
#include <vector>

#include "nlsa/norms.hpp"
#include "nlsa/spectral.hpp"

namespace nlsa {

/// Sums of a few random plane waves under a Gaussian envelope,
///   f(x, t) = env(x - x0) sum_j c_j e^{i (k_j x + nu_j t)}.
/// The field is a function of continuous (x, t), so sampling it on a finer
/// grid refines the same function.  Sample i of a stream depends only on
/// (seed, i).
struct RandomFieldSpec {
    int modes = 6;
    double max_wavenumber = 3.0;
    double envelope_width = 3.0;
    double max_shift = 4.0;
    double max_time_frequency = 3.0;
    double amplitude = 1.0;
};

struct FieldSample {
    std::vector<cplx> coeffs;
    std::vector<double> wavenumbers;
    std::vector<double> time_frequencies;
    double shift = 0.0;
    double width = 1.0;

    cplx operator()(double x, double t = 0.0) const;
};

FieldSample draw_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index);

GridFunction sample_field(const FieldSample& s, const Grid& g, double t = 0.0);
SpaceTimeField sample_field(const FieldSample& s, const Grid& g, const std::vector<double>& times);

GridFunction random_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index, const Grid& g);
SpaceTimeField random_space_time_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index,
                                       const Grid& g, const std::vector<double>& times);

}  // namespace nlsa
