#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nlsa {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// Cached n-point rule (Newton iteration on P_n).
const GaussLegendre& gauss_legendre(int n);

/// Composite rule on [lo, hi] with `panels` equal panels.
template <class T, class Fn>
T integrate_gl(Fn&& fn, double lo, double hi, int panels, int order = 64) {
    const GaussLegendre& rule = gauss_legendre(order);
    const double width = (hi - lo) / panels;
    T total{};
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        T part{};
        for (int i = 0; i < order; ++i) part += rule.weights[i] * fn(mid + 0.5 * width * rule.nodes[i]);
        total += 0.5 * width * part;
    }
    return total;
}

struct AdaptiveResult {
    std::complex<double> value;
    double error = 0.0;
    int panels = 0;
    bool converged = true;
};

/// Adaptive panel split: a panel is accepted when one order-point rule and
/// its two-halves refinement agree to `abs_tol` (scaled by panel length).
AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& fn,
                                  double lo, double hi, double abs_tol,
                                  int order = 64, int max_depth = 40);

}  // namespace nlsa
