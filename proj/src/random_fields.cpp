#include "nlsa/random_fields.hpp"

#include <cmath>
#include <random>

namespace nlsa {

cplx FieldSample::operator()(double x, double t) const {
    const double y = (x - shift) / width;
    const double env = std::exp(-0.5 * y * y);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double ph = wavenumbers[j] * x + time_frequencies[j] * t;
        sum += coeffs[j] * cplx(std::cos(ph), std::sin(ph));
    }
    return env * sum;
}

FieldSample draw_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    FieldSample s;
    s.width = spec.envelope_width * (0.75 + 0.25 * unit(rng));
    s.shift = spec.max_shift * unit(rng);
    const double norm = spec.amplitude / std::sqrt(static_cast<double>(spec.modes));
    for (int j = 0; j < spec.modes; ++j) {
        s.coeffs.push_back(norm * cplx(unit(rng), unit(rng)));
        s.wavenumbers.push_back(spec.max_wavenumber * unit(rng));
        s.time_frequencies.push_back(spec.max_time_frequency * unit(rng));
    }
    return s;
}

GridFunction sample_field(const FieldSample& s, const Grid& g, double t) {
    return GridFunction::sample(g, [&](double x) { return s(x, t); });
}

SpaceTimeField sample_field(const FieldSample& s, const Grid& g, const std::vector<double>& times) {
    SpaceTimeField out(g, times);
    for (int k = 0; k < out.num_times(); ++k)
        for (int j = 0; j < g.num_points; ++j) out.data(j, k) = s(g.point(j), times[k]);
    return out;
}

GridFunction random_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index, const Grid& g) {
    return sample_field(draw_field(spec, seed, index), g);
}

SpaceTimeField random_space_time_field(const RandomFieldSpec& spec, std::uint64_t seed, std::uint64_t index,
                                       const Grid& g, const std::vector<double>& times) {
    return sample_field(draw_field(spec, seed, index), g, times);
}

}  // namespace nlsa
