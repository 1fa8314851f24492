#pragma once

#include <complex>

namespace bianchi {

using cplx = std::complex<double>;

// Lanczos approximation, reflection for Re(z) < 1/2.
cplx gamma(cplx z);
cplx log_gamma(cplx z);

// Upper incomplete gamma Γ(a, x) for complex a and real x > 0.
cplx upper_incomplete_gamma(cplx a, double x);

// Riemann zeta for real s > 1 (used only by tests and sanity checks).
double riemann_zeta_real(double s);

}  // namespace bianchi
