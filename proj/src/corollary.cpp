#include <algorithm>
#include <cmath>

#include "nlsa/errors.hpp"
#include "nlsa/oscillatory.hpp"
#include "nlsa/parallel.hpp"

namespace nlsa {

int corollary_n0(double a, double b, double t) {
    if (b == 0.0 || !(t > 0.0)) throw InvalidParameter("dyadic split needs b != 0 and t > 0");
    const double A = a / (2.0 * b);
    const double need = std::abs(b) * t * std::max(1.0, 1e4 * A * A);
    int n = 0;
    while (std::ldexp(1.0, n) < need) ++n;
    return n;
}

std::complex<double> qnm_of_symbol(double a, double b, double t, int N, double xi, const PhiProfile& profile,
                                   const GlobalOptions& opt) {
    const double omega = std::ldexp(1.0, N);
    const ProbeParams plus{a, b, t, omega, profile.m(), xi};
    const ProbeParams minus{a, -b, t, omega, profile.m(), -xi};
    return osc_integral_global(plus, profile, opt).value + osc_integral_global(minus, profile, opt).value;
}

CorollaryResult corollary_sum(double a, double b, double t, double m, const std::vector<double>& xi_grid,
                              int n_min, int n_max, const PhiProfile& profile, const GlobalOptions& opt,
                              int threads) {
    if (n_max < n_min + 3) throw InvalidParameter("dyadic range too short");
    if (std::abs(profile.m() - m) > 0.0) throw InvalidParameter("profile exponent differs from m");
    CorollaryResult res;
    res.xi = xi_grid;
    res.n_min = n_min;
    res.n_max = n_max;
    res.n0 = (b != 0.0 && t > 0.0) ? corollary_n0(a, b, t) : 0;
    const int count = static_cast<int>(xi_grid.size());
    res.terms.assign(count, std::vector<double>(n_max - n_min + 1, 0.0));
    parallel_for(count, threads, [&](int i) {
        for (int N = n_min; N <= n_max; ++N)
            res.terms[i][N - n_min] =
                std::pow(2.0, N * m) * std::abs(qnm_of_symbol(a, b, t, N, xi_grid[i], profile, opt));
    });
    std::vector<int> all(count);
    for (int i = 0; i < count; ++i) all[i] = i;
    CorollaryResult stats = corollary_restrict(res, all, n_min, n_max, t);
    stats.n0 = res.n0;
    return stats;
}

CorollaryResult corollary_restrict(const CorollaryResult& r, const std::vector<int>& xi_indices, int n_min,
                                   int n_max, double t) {
    if (n_min < r.n_min || n_max > r.n_max || n_max < n_min + 3) throw InvalidParameter("dyadic range not covered");
    CorollaryResult out;
    out.n_min = n_min;
    out.n_max = n_max;
    out.n0 = r.n0;
    for (int i : xi_indices) {
        const std::vector<double>& row = r.terms.at(i);
        double total = 0.0, edge = 0.0;
        std::vector<double> kept;
        for (int N = n_min; N <= n_max; ++N) {
            const double term = row[N - r.n_min];
            kept.push_back(term);
            total += term;
            if (N <= n_min + 1 || N >= n_max - 1) edge += term;
        }
        out.xi.push_back(r.xi.at(i));
        out.sums.push_back(total);
        out.terms.push_back(std::move(kept));
        out.sup = std::max(out.sup, total);
        out.tail_fraction = std::max(out.tail_fraction, total > 0.0 ? edge / total : 0.0);
    }
    out.ratio = out.sup / (1.0 + t);
    out.tail_warning = out.tail_fraction > 0.01;
    return out;
}

int corollary_n_max(double a, double b, double t, const std::vector<double>& xi_grid, int margin) {
    int top = corollary_n0(a, b, t);
    for (double xi : xi_grid) {
        const double rate = t * std::abs(2.0 * a * xi + 3.0 * b * xi * xi);
        if (rate > 1.0) top = std::max(top, static_cast<int>(std::ceil(std::log2(rate))));
    }
    return top + margin;
}

int intermediate_count_by_label(double xi, double a, double b, double t, int n_lo, int n_hi) {
    int count = 0;
    for (int N = n_lo; N <= n_hi; ++N)
        if (classify_xi(xi, a, b, t, std::ldexp(1.0, N)) == RegionLabel::Intermediate) ++count;
    return count;
}

int intermediate_count_closed_form(double xi, double a, double b, double t, int n_lo, int n_hi) {
    const double A = a / (2.0 * b);
    const double D = (xi + A) * (xi + A) - A * A;
    if (!(D > 0.0)) return 0;
    const double scale = std::abs(b) * t * D;
    // base/100 < D <= 100 base  <=>  scale/100 <= omega < 100 scale
    const int first = static_cast<int>(std::ceil(std::log2(scale / 100.0)));
    const int last = static_cast<int>(std::ceil(std::log2(100.0 * scale))) - 1;
    const int lo = std::max(first, n_lo), hi = std::min(last, n_hi);
    return hi >= lo ? hi - lo + 1 : 0;
}

}  // namespace nlsa
