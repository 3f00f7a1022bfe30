#pragma once

#include "sie/common.hpp"

namespace sie::bessel {

// Modified Bessel functions of integer order, real argument.
// Domain: 0 <= m <= 200, x in (1e-8, 700].  Values that would overflow
// the double range raise NumericError.
double mod_bessel_i(int m, double x);
double mod_bessel_k(int m, double x);
double mod_bessel_i_prime(int m, double x);
double mod_bessel_k_prime(int m, double x);

// Bessel functions of the first/second kind and the outgoing Hankel
// function H_m^(1) = J_m + i Y_m.  Domain: 0 <= m <= 200, x in (1e-8, 1e4].
double bessel_j(int m, double x);
double bessel_y(int m, double x);
double bessel_j_prime(int m, double x);
double bessel_y_prime(int m, double x);
cplx hankel1(int m, double x);
cplx hankel1_prime(int m, double x);

// Logarithmic derivative K_m'(z)/K_m(z) for complex z with Re z > 0,
// evaluated by a continued fraction (Lentz); NumericError if the fraction
// fails to converge within 10^4 terms.
cplx k_ratio(int m, cplx z);

// Complex-argument modified Bessel functions (Re z > 0 for K).
// Used by the exterior evaluator and the radial reference solver.
cplx mod_bessel_i_cplx(int m, cplx z);
cplx mod_bessel_k_cplx(int m, cplx z);
cplx mod_bessel_i_prime_cplx(int m, cplx z);
cplx mod_bessel_k_prime_cplx(int m, cplx z);

}  // namespace sie::bessel
