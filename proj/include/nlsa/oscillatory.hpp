#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlsa/spectral.hpp"

namespace nlsa {

enum class RegionLabel { Near, Intermediate, Far };

std::string label_name(RegionLabel r);

/// One evaluation instance of
///   I = int phi_w(xi - z) e^{i t (a z^2 + b z^3)} <z>^{-2m} dz.
struct ProbeParams {
    double a = 0.0;
    double b = 1.0;
    double t = 1.0;
    double omega = 1024.0;
    double m = 0.125;
    double xi = 0.0;
};

/// omega / (|b| t) >= max{1, 1e4 (a / 2b)^2}
bool hypothesis_holds(double a, double b, double t, double omega);
inline bool hypothesis_holds(const ProbeParams& p) { return hypothesis_holds(p.a, p.b, p.t, p.omega); }

RegionLabel classify_xi(double xi, double a, double b, double t, double omega);
inline RegionLabel classify(const ProbeParams& p) { return classify_xi(p.xi, p.a, p.b, p.t, p.omega); }

/// phi^(x) = scale |x|^m eta(x) and its inverse transform
///   phi(w) = (1/2pi) int_{1/2}^{2} e^{i w x} phi^(x) dx.
class PhiProfile {
public:
    explicit PhiProfile(double m = 0.0, double scale = 1.0, double tail_rel = 1e-14);

    double m() const { return m_; }
    double scale() const { return scale_; }
    double hat(double x) const;

    double peak() const { return peak_; }            // phi(0) = max |phi|
    double tail_radius() const { return radius_; }   // |phi(w)| < tail_rel * peak for |w| > R
    double tail_rel() const { return tail_rel_; }

    /// Trapezoid quadrature in x; resolution grows with |Re w|.
    std::complex<double> eval(std::complex<double> w) const;
    /// exp(log_factor) * phi(w), with the factor merged into every term so
    /// that large growth and decay never overflow separately.
    std::complex<double> eval_scaled(std::complex<double> w, std::complex<double> log_factor) const;

    /// phi(q dw) for q = -J..J (entry q + J), one FFT.
    std::vector<std::complex<double>> table(double dw, long J) const;

    /// int |omega phi(omega (xi - z))| <z>^{-2m} dz over the real window.
    double mass(double xi, double omega) const;

private:
    const std::vector<double>& nodes_for(int n) const;

    double m_, scale_, tail_rel_;
    double peak_ = 0.0, radius_ = 0.0;
    std::vector<double> abs_table_;   // |phi(j * abs_step_)|, j >= 0
    double abs_step_ = 0.02;
    std::vector<std::vector<double>> hat_nodes_;  // hat values at trapezoid nodes, n = 1024 * 2^k
};

std::complex<double> phi_eval_complex(const PhiProfile& profile, std::complex<double> z);
/// phi_omega(z) = omega phi(omega z)
std::complex<double> phi_omega(const PhiProfile& profile, double omega, std::complex<double> z);

struct QuadratureResult {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;       // |I_h - I_{h/2}| or the adaptive estimate
    double mass = 0.0;        // real-axis L1 mass of the integrand
    bool converged = true;
    long evaluations = 0;
};

struct DirectOptions {
    double points_per_period = 20.0;
    double converge_rel = 1e-6;
    double fail_rel = 1e-4;
    /// Relative tolerances are taken against max(|I|, floor_rel * mass).
    double floor_rel = 1e-8;
};

QuadratureResult osc_integral_direct(const ProbeParams& p, const PhiProfile& profile,
                                     const DirectOptions& opt = {});

struct ContourOptions {
    double epsilon_near = 0.1;
    double floor_rel = 1e-8;
    double converge_rel = 1e-6;
    bool with_segment = false;   // also integrate the replaced real segment
};

struct ContourResult : QuadratureResult {
    double epsilon = 0.0;
    int contour = 1;                          // 1 lower, 2 upper semicircle
    std::complex<double> gamma_piece{0, 0};   // -int_{Gamma2} or int_{Gamma1}
    std::complex<double> tail_piece{0, 0};
    std::complex<double> segment_piece{0, 0}; // int over [xi - eps, xi + eps] when requested
    bool segment_evaluated = false;
};

/// Semicircle radius: epsilon_near for Near, sqrt(omega / (|b| t)) for Far.
double contour_radius(const ProbeParams& p, double epsilon_near = 0.1);
/// Throws ContourViolation when the half disk reaches {Re z = 0, |Im z| >= 1}.
void check_contour(double xi, double epsilon);

ContourResult osc_integral_contour(const ProbeParams& p, const PhiProfile& profile,
                                   const ContourOptions& opt = {});

/// Whole-line deformation z = s + i sign(b) kappa max(|s| - s0, 0), used for
/// dyadic sums where omega ranges down to 2^-10.
struct GlobalOptions {
    double kappa = 0.5;
    double s0_scale = 1.5;
    double s0_shift = 0.5;
    double rel_tol = 1e-9;
    /// Hand windows that need no deformation to the uniform trapezoid route.
    bool allow_direct = true;
};

QuadratureResult osc_integral_global(const ProbeParams& p, const PhiProfile& profile,
                                     const GlobalOptions& opt = {});

// ---- bounds -------------------------------------------------------------

struct ProbeRecord {
    ProbeParams params;
    RegionLabel label = RegionLabel::Near;
    std::complex<double> direct{0, 0};
    std::complex<double> contour{0, 0};
    bool has_direct = false;
    bool has_contour = false;
    double mass = 0.0;
    double error = 0.0;
    double ratio = 0.0;            // |I| * scale / (1 + t)
    double ratio_certified = 0.0;  // (|I| + error + 64 eps mass) * scale / (1 + t)
    bool converged = true;
};

double bound_scale(RegionLabel label, double omega, double m);

struct SweepSpec {
    std::vector<double> omegas;
    std::vector<double> ts{0.1, 1.0};
    std::vector<double> as{0.0, 1.0};
    std::vector<double> bs{1.0, -1.0};
    std::vector<double> ms{1.0 / 16, 1.0 / 8};
    int near_per_combo = 1;
    int intermediate_per_combo = 6;
    /// Intervals of r = t |P'(xi)| / omega over [1/2, 2]; I is negligible
    /// unless r lies in the support of the profile transform.
    int band_intervals = 16;
    int far_per_combo = 1;
    double epsilon_near = 0.1;
    double ceiling_near_far = 1.0;
    double ceiling_intermediate = 10.0;

    static SweepSpec prop31_default();
    SweepSpec refined() const;  // doubled xi density
};

/// xi samples of one (a, b, t, omega) combination in the three regions.
std::vector<ProbeParams> sweep_probes(const SweepSpec& spec);

struct BoundCheckResult {
    std::vector<ProbeRecord> records;
    double max_near_far = 0.0;          // certified
    double max_intermediate = 0.0;      // certified
    double max_near_far_raw = 0.0;
    double max_intermediate_raw = 0.0;
    int skipped_combos = 0;
    bool within_ceiling = true;
    bool all_converged = true;
};

/// Near and Intermediate by direct quadrature, Far by the contour route.
ProbeRecord evaluate_probe(const ProbeParams& p, const PhiProfile& profile, double epsilon_near = 0.1);

BoundCheckResult bound_check_prop31(const SweepSpec& spec, int threads = 1);
BoundCheckResult bound_check_probes(const std::vector<ProbeParams>& probes, double epsilon_near,
                                    double ceiling_near_far, double ceiling_intermediate, int threads = 1);

struct GammaBoundReport {
    RegionLabel label = RegionLabel::Near;
    int samples = 0;
    int violations = 0;
    double min_margin = 0.0;
    double identity_error = 0.0;  // Far: completing-the-square identity residual
    bool holds = true;
};

GammaBoundReport gamma_integrand_bound_check(const ProbeParams& p, int samples = 1000,
                                             double epsilon_near = 0.1);

/// max over samples of |phi_w(xi - z)| w^2 |y| |xi - z|^2 / |e^{2wy} - e^{wy/2}|
double phi_growth_constant(const PhiProfile& profile, double omega, double xi,
                           const std::vector<std::complex<double>>& zs);

/// int_0^pi (e^{beta sin} - e^{alpha sin}) / sin dtheta divided by
/// (pi alpha / beta - 1) + 1 + (beta / (pi alpha)) e^{-pi alpha / beta}, alpha < beta < 0.
double sine_exponential_ratio(double alpha, double beta);

/// Contour against direct quadrature.  Agreement means
///   |I_direct - I_contour| <= rel * max(|I_direct|, |I_contour|, floor_rel * mass).
/// Where the replaced real segment carries at least piece_floor * mass, the
/// arc and the segment are also compared to rel.
struct CauchyOptions {
    double epsilon_near = 0.1;
    double rel = 1e-6;
    double floor_rel = 1e-8;
    double piece_floor = 1e-6;
};

struct CauchyRecord {
    ProbeParams params;
    RegionLabel label = RegionLabel::Near;
    std::complex<double> direct{0, 0}, contour{0, 0};
    double mass = 0.0;
    double difference = 0.0;
    double tolerance = 0.0;
    bool agree = false;
    bool resolved = false;          // |I| above the floor
    bool piece_checked = false;
    double piece_rel = 0.0;         // |arc - segment| / |segment|
    bool piece_agree = true;
    bool converged = true;
};

struct CauchyCheckResult {
    std::vector<CauchyRecord> records;
    int near = 0, far = 0;
    int agreeing = 0;
    int resolved = 0;
    int pieces_checked = 0, pieces_agreeing = 0;
    double worst_scaled_difference = 0.0;  // max difference / tolerance
    bool all_agree = true;
};

/// Near and Far probes over (a, b) in {0,1,2} x {+-1}, m in {0, 1/16, 1/8},
/// omega = 2^8..2^16 (Far at even exponents), t chosen so the hypothesis holds.
std::vector<ProbeParams> cauchy_probe_set();

CauchyRecord cauchy_probe(const ProbeParams& p, const PhiProfile& profile, const CauchyOptions& opt = {});
CauchyCheckResult cauchy_check(const std::vector<ProbeParams>& probes, const CauchyOptions& opt = {}, int threads = 1);

// ---- dyadic sums --------------------------------------------------------

/// Smallest N >= 0 with 2^N >= |b| t max{1, 1e4 (a/2b)^2}.
int corollary_n0(double a, double b, double t);

struct CorollaryResult {
    std::vector<double> xi;
    std::vector<double> sums;
    double sup = 0.0;
    double ratio = 0.0;          // sup / (1 + t)
    int n0 = 0;
    int n_min = 0, n_max = 0;
    double tail_fraction = 0.0;  // largest share of the two extreme N at any xi
    bool tail_warning = false;
    std::vector<std::vector<double>> terms;  // terms[i][N - n_min] = 2^{Nm} |Q_N^m g(xi_i)|
};

/// Same statistics restricted to a subset of xi indices and a narrower N range,
/// from the stored terms.
CorollaryResult corollary_restrict(const CorollaryResult& r, const std::vector<int>& xi_indices, int n_min,
                                   int n_max, double t);

/// Upper end of a dyadic range that reaches past N0 and past the stationary
/// band t |P'(xi)| of every xi in the grid, plus margin.
int corollary_n_max(double a, double b, double t, const std::vector<double>& xi_grid, int margin = 4);

/// sum_N 2^{N m} |Q_N^m g(xi)| with
///   Q_N^m g(xi) = I(a, b, t, 2^N, m, xi) + I(a, -b, t, 2^N, m, -xi).
CorollaryResult corollary_sum(double a, double b, double t, double m, const std::vector<double>& xi_grid,
                              int n_min, int n_max, const PhiProfile& profile,
                              const GlobalOptions& opt = {}, int threads = 1);

std::complex<double> qnm_of_symbol(double a, double b, double t, int N, double xi, const PhiProfile& profile,
                                   const GlobalOptions& opt = {});

/// Number of N in [n_lo, n_hi] for which xi is Intermediate at omega = 2^N,
/// by classify_xi and by solving the two threshold inequalities for N.
int intermediate_count_by_label(double xi, double a, double b, double t, int n_lo, int n_hi);
int intermediate_count_closed_form(double xi, double a, double b, double t, int n_lo, int n_hi);

}  // namespace nlsa
