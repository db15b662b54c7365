#include "nlsa/norms.hpp"

#include <cmath>

#include "nlsa/errors.hpp"

namespace nlsa {

SpaceTimeField::SpaceTimeField(const Grid& g, std::vector<double> t)
    : SpaceTimeField(g, t, Eigen::MatrixXcd::Zero(g.num_points, static_cast<Eigen::Index>(t.size()))) {}

SpaceTimeField::SpaceTimeField(const Grid& g, std::vector<double> t, Eigen::MatrixXcd d)
    : grid(g), times(std::move(t)), data(std::move(d)) {
    if (times.empty()) throw InvalidParameter("space-time field needs at least one time node");
    if (times.front() != 0.0) throw InvalidParameter("time nodes must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InvalidParameter("time nodes must increase");
    if (data.rows() != g.num_points || data.cols() != static_cast<Eigen::Index>(times.size()))
        throw InvalidParameter("field shape does not match grid and time nodes");
}

GridFunction SpaceTimeField::frame(int k) const { return GridFunction(grid, data.col(k).array()); }

void SpaceTimeField::set_frame(int k, const GridFunction& f) { data.col(k) = f.values.matrix(); }

std::vector<double> SpaceTimeField::uniform_times(double T, int K) {
    if (!(T > 0.0) || K < 1) throw InvalidParameter("need T > 0 and K >= 1");
    std::vector<double> t(K + 1);
    for (int k = 0; k <= K; ++k) t[k] = T * k / K;
    t[K] = T;
    return t;
}

SpaceTimeField operator-(const SpaceTimeField& u, const SpaceTimeField& v) {
    return SpaceTimeField(u.grid, u.times, u.data - v.data);
}

SpaceTimeField apply_multiplier(const SpaceTimeField& u, const ArrayXcd& symbol) {
    SpaceTimeField out = u;
    const double inv_n = 1.0 / u.grid.num_points;
    for (int k = 0; k < u.num_times(); ++k) {
        const ArrayXcd col = u.data.col(k).array();
        out.data.col(k) = (inv_n * ifft(symbol * fft(col))).matrix();
    }
    return out;
}

Eigen::ArrayXd trapezoid_weights(const std::vector<double>& times) {
    const Eigen::Index n = static_cast<Eigen::Index>(times.size());
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double h = times[k + 1] - times[k];
        w(k) += 0.5 * h;
        w(k + 1) += 0.5 * h;
    }
    return w;
}

namespace {

// (sum_i w_i |v_i|^p)^(1/p), scaled by the max to keep large p finite.
double weighted_lp(const Eigen::ArrayXd& mag, const Eigen::ArrayXd& w, double p) {
    const double top = mag.maxCoeff();
    if (top == 0.0) return 0.0;
    if (std::isinf(p)) return top;
    const double s = (w * (mag / top).pow(p)).sum();
    return top * std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const GridFunction& f, double p) {
    const Eigen::ArrayXd w = Eigen::ArrayXd::Constant(f.grid.num_points, f.grid.spacing());
    return weighted_lp(f.values.abs(), w, p);
}

double sobolev_norm(const GridFunction& f, double s) {
    const GridFunction hat = dft_forward(f);
    const Eigen::ArrayXd xi = hat.grid.points();
    const Eigen::ArrayXd weight = (1.0 + xi.square()).pow(s);
    const double total = hat.grid.spacing() * (weight * hat.values.abs2()).sum() / kTwoPi;
    return std::sqrt(total);
}

double mixed_norm_x_t(const SpaceTimeField& u, double p, double q) {
    const Eigen::ArrayXd wt = trapezoid_weights(u.times);
    const Eigen::ArrayXXd mag = u.data.array().abs();
    Eigen::ArrayXd inner(u.grid.num_points);
    for (int j = 0; j < u.grid.num_points; ++j) inner(j) = weighted_lp(mag.row(j).transpose(), wt, q);
    const Eigen::ArrayXd wx = Eigen::ArrayXd::Constant(u.grid.num_points, u.grid.spacing());
    return weighted_lp(inner, wx, p);
}

double mixed_norm_t_x(const SpaceTimeField& u, double q, double p) {
    const Eigen::ArrayXd wt = trapezoid_weights(u.times);
    const Eigen::ArrayXXd mag = u.data.array().abs();
    const Eigen::ArrayXd wx = Eigen::ArrayXd::Constant(u.grid.num_points, u.grid.spacing());
    Eigen::ArrayXd inner(u.num_times());
    for (int k = 0; k < u.num_times(); ++k) inner(k) = weighted_lp(mag.col(k), wx, p);
    return weighted_lp(inner, wt, q);
}

double weighted_sup_norm(const SpaceTimeField& u, double m) {
    double best = 0.0;
    for (int k = 0; k < u.num_times(); ++k) best = std::max(best, weight_multiply(u.frame(k), m).l2_norm());
    return best;
}

NormReport mu_norms(const SpaceTimeField& u, const EquationParams& p) {
    const Grid& g = u.grid;
    const double nyq = g.nyquist();
    const ArrayXcd d_sym = symbol_values(g, [nyq](double xi) { return xi == -nyq ? cplx(0.0) : cplx(0.0, xi); });
    const ArrayXcd q_sym = symbol_values(g, [](double xi) { return cplx(std::pow(std::abs(xi), 0.25), 0.0); });

    const SpaceTimeField ux = apply_multiplier(u, d_sym);
    const SpaceTimeField dq = apply_multiplier(u, q_sym);
    const SpaceTimeField dqx = apply_multiplier(ux, q_sym);

    NormReport r;
    r.mu1 = mixed_norm_t_x(u, kInf, 2) + mixed_norm_t_x(dq, kInf, 2);
    r.mu2 = mixed_norm_x_t(ux, kInf, 2) + mixed_norm_x_t(dqx, kInf, 2);
    r.mu3 = mixed_norm_x_t(ux, 20, 2.5);
    r.mu4 = mixed_norm_x_t(u, 5, 10) + mixed_norm_x_t(dq, 5, 10);
    r.mu5 = mixed_norm_x_t(u, 4, kInf);
    r.y_norm = r.mu1 + r.mu2 + r.mu3 + r.mu4 + r.mu5;

    r.h_quarter_history.resize(u.num_times());
    r.weighted_history.resize(u.num_times());
    for (int k = 0; k < u.num_times(); ++k) {
        const GridFunction f = u.frame(k);
        r.h_quarter_history[k] = sobolev_norm(f, p.s);
        r.weighted_history[k] = weight_multiply(f, p.m).l2_norm();
        r.weighted_sup = std::max(r.weighted_sup, r.weighted_history[k]);
    }
    r.x_norm = r.y_norm + r.weighted_sup;
    return r;
}

double x_norm(const SpaceTimeField& u, const EquationParams& p) { return mu_norms(u, p).x_norm; }

}  // namespace nlsa
