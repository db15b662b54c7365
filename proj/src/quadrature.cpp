#include "nlsa/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "nlsa/errors.hpp"

namespace nlsa {

namespace {

GaussLegendre build_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const long double pi = 3.14159265358979323846264338327950288L;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) break;
        }
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        rule.nodes[i] = -static_cast<double>(x);
        rule.nodes[n - 1 - i] = static_cast<double>(x);
        rule.weights[i] = rule.weights[n - 1 - i] = static_cast<double>(w);
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw InvalidParameter("Gauss-Legendre order must be positive");
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

namespace {

std::complex<double> panel(const std::function<std::complex<double>(double)>& fn, const GaussLegendre& rule,
                           double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * fn(mid + half * rule.nodes[i]);
    return half * s;
}

void refine(const std::function<std::complex<double>(double)>& fn, const GaussLegendre& rule, double lo,
            double hi, std::complex<double> coarse, double tol_density, int depth, AdaptiveResult& out) {
    const double mid = 0.5 * (lo + hi);
    const std::complex<double> left = panel(fn, rule, lo, mid);
    const std::complex<double> right = panel(fn, rule, mid, hi);
    const double diff = std::abs(left + right - coarse);
    if (diff <= tol_density * (hi - lo) || depth == 0) {
        if (diff > tol_density * (hi - lo)) out.converged = false;
        out.value += left + right;
        out.error += diff;
        out.panels += 2;
        return;
    }
    refine(fn, rule, lo, mid, left, tol_density, depth - 1, out);
    refine(fn, rule, mid, hi, right, tol_density, depth - 1, out);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& fn, double lo,
                                  double hi, double abs_tol, int order, int max_depth) {
    AdaptiveResult out;
    out.value = 0.0;
    if (hi == lo) return out;
    const GaussLegendre& rule = gauss_legendre(order);
    const double tol_density = abs_tol / std::abs(hi - lo);
    refine(fn, rule, lo, hi, panel(fn, rule, lo, hi), tol_density, max_depth, out);
    return out;
}

}  // namespace nlsa
