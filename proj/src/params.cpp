#include "nlsa/params.hpp"

#include <cmath>

#include "nlsa/errors.hpp"

namespace nlsa {

bool EquationParams::is_linear() const {
    return c == 0.0 && d == 0.0 && e == 0.0;
}

void EquationParams::validate() const {
    if (!(m >= 0.0 && m < 1.0)) throw InvalidParameter("weight exponent m must lie in [0, 1)");
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidParameter("a and b must be finite");
}

EquationParams reduction_preset(const std::string& name, std::complex<double> coupling) {
    EquationParams p;
    if (name == "NLS") {
        p.a = -1.0; p.b = 0.0; p.c = coupling; p.d = 0.0; p.e = 0.0;
    } else if (name == "mKdV") {
        p.a = 0.0; p.b = 1.0; p.c = 0.0; p.d = 1.0; p.e = 0.0;
    } else if (name == "DNLS") {
        p.a = -1.0; p.b = 0.0; p.c = 0.0; p.d = 2.0 * coupling; p.e = coupling;
    } else if (name == "NLSA-default") {
        p.a = 1.0; p.b = 1.0; p.c = 1.0; p.d = 2.0; p.e = 1.0;
    } else if (name == "linear") {
        p.a = 1.0; p.b = 1.0; p.c = 0.0; p.d = 0.0; p.e = 0.0;
    } else {
        throw InvalidParameter("unknown preset '" + name + "'");
    }
    return p;
}

}  // namespace nlsa
