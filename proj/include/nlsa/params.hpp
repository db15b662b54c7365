#pragma once

#include <complex>
#include <string>

namespace nlsa {

/// Coefficients of
///   u_t + i a u_xx + b u_xxx + i c |u|^2 u + d |u|^2 u_x + e u^2 conj(u)_x = 0
/// together with the weight exponent m and the Sobolev index s.
struct EquationParams {
    double a = 0.0;
    double b = 1.0;
    std::complex<double> c{0.0, 0.0};
    std::complex<double> d{0.0, 0.0};
    std::complex<double> e{0.0, 0.0};
    double m = 0.125;
    double s = 0.25;

    bool airy_enabled() const { return b != 0.0; }
    bool is_linear() const;
    bool derivative_terms_combine() const { return d == 2.0 * e; }

    /// Throws InvalidParameter when m is outside [0, 1).
    void validate() const;
};

/// Named coefficient sets: "NLS" (-1,0,c,0,0), "mKdV" (0,1,0,1,0),
/// "DNLS" (-1,0,0,2e,e), "NLSA-default" (1,1,1,2,1), "linear" (1,1,0,0,0).
/// `coupling` fills the free coefficient c (NLS) or e (DNLS).
EquationParams reduction_preset(const std::string& name,
                                std::complex<double> coupling = 1.0);

}  // namespace nlsa
