#include "sie/bessel.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace sie::bessel {

namespace {

using ld = long double;
using cld = std::complex<long double>;

constexpr ld kGammaE = 0.577215664901532860606512090082402431L;
constexpr ld kPiL = 3.141592653589793238462643383279502884L;

void check_real_domain(int m, double x, double xmin, double xmax, const char* fn,
                       const char* bounds) {
  if (m < 0 || m > 200 || !std::isfinite(x) || !(x > xmin) || !(x <= xmax))
    throw NumericError(std::string(fn) + ": domain is 0 <= m <= 200 and x in " + bounds);
}

// ---------------------------------------------------------------------------
// Modified Bessel I: ascending series (all terms positive for real z, no
// cancellation) and Miller backward recurrence for large arguments.  All
// paths accumulate in long double so the double result keeps ~1e-15
// relative accuracy.
// ---------------------------------------------------------------------------

template <class T>
T series_i(int m, T z) {
  T half = z / T(2);
  T term(1);
  for (int j = 1; j <= m; ++j) term *= half / T(j);
  T sum = term;
  T q = half * half;
  for (int k = 1; k < 5000; ++k) {
    term *= q / (T(k) * T(k + m));
    sum += term;
    using std::abs;
    if (abs(term) <= abs(sum) * 1e-21L) return sum;
  }
  throw NumericError("mod_bessel_i: series did not converge");
}

// I_k for k = 0..m by backward recurrence, normalized by e^z = I_0 + 2 sum I_k.
template <class T>
void miller_i(T z, int m, std::vector<T>& out) {
  using std::abs;
  double az = (double)abs(z);
  // Start well past the j ~ |z| turning point: the contaminating (dominant)
  // solution decays like exp(-c ((j-|z|)/|z|^{1/3})^{3/2}) there, so the
  // safety margin has to scale with |z|^{1/3}.
  int start = std::max<int>(m, static_cast<int>(az)) + 40 +
              static_cast<int>(12.0 * std::cbrt(std::max(az, 1.0))) +
              static_cast<int>(4.0 * std::sqrt(std::max<double>(m, 16.0)));
  out.assign(m + 1, T(0));
  T kp1(0), kk(1e-280L);
  T sum(0);
  for (int k = start; k >= 0; --k) {
    T km1 = kp1 + (T(2 * (k + 1)) / z) * kk;
    kp1 = kk;
    kk = km1;
    if (k <= m) out[k] = kk;
    sum += (k == 0 ? T(1) : T(2)) * kk;
    if (abs(kk) > 1e260L) {
      kp1 *= T(1e-260L);
      kk *= T(1e-260L);
      sum *= T(1e-260L);
      for (auto& v : out) v *= T(1e-260L);
    }
  }
  using std::exp;
  T scale = exp(z) / sum;
  for (auto& v : out) v *= scale;
}

template <class T>
T mod_i_any(int m, T z) {
  using std::abs;
  if (abs(z) <= 25.0L) return series_i<T>(m, z);
  std::vector<T> v;
  miller_i<T>(z, m, v);
  return v[m];
}

// ---------------------------------------------------------------------------
// Modified Bessel K: power series seeds near zero, continued fraction plus
// the Wronskian I_0 K_1 + I_1 K_0 = 1/z elsewhere, then upward recurrence
// in the order (K is the dominant solution, so forward recursion is stable).
// ---------------------------------------------------------------------------

// Continued fraction for K_{nu+1}(z)/K_nu(z) at nu = 0:
//   K_1/K_0 = (1/2 + z + w)/z,  w = a_1/(b_1 + a_2/(b_2 + ...)),
//   a_k = -(2k-1)^2/4, b_k = 2(z+k).   Valid for Re z > 0.
template <class T>
T k_ratio_cf0(T z) {
  using std::abs;
  const T tiny = T(1e-290L);
  T f = tiny, C = f, D = T(0);
  for (int k = 1; k <= 10000; ++k) {
    T a = T(-(2.0L * k - 1) * (2.0L * k - 1) / 4.0L);
    T b = T(2) * (z + T(k));
    D = b + a * D;
    if (abs(D) == 0) D = tiny;
    C = b + a / C;
    if (abs(C) == 0) C = tiny;
    D = T(1) / D;
    T delta = C * D;
    f *= delta;
    if (abs(delta - T(1)) < 1e-19L) return (T(0.5L) + z + f) / z;
  }
  throw NumericError("k_ratio: continued fraction did not converge");
}

template <class T>
void k_seeds(T z, T& k0, T& k1) {
  using std::abs;
  using std::log;
  if (abs(z) <= 2.0L) {
    // Ascending series with harmonic-number coefficients.
    T half = z / T(2), q = half * half;
    T i0 = series_i<T>(0, z), i1 = series_i<T>(1, z);
    T lg = log(half);
    T sum0(0), term(1);
    ld hk = 0.0L;
    for (int k = 1; k < 200; ++k) {
      term *= q / (T(k) * T(k));
      hk += 1.0L / k;
      T add = term * T(hk);
      sum0 += add;
      if (abs(add) <= abs(sum0) * 1e-21L && k > 4) break;
    }
    k0 = -(lg + T(kGammaE)) * i0 + sum0;
    // K_1 = 1/z + ln(z/2) I_1 - (z/4) sum_k (H_k + H_{k+1} - 2 gamma) q^k/(k!(k+1)!)
    T sum1(0);
    term = T(1);
    ld hk1 = 0.0L, hk2 = 1.0L;
    for (int k = 0; k < 200; ++k) {
      if (k > 0) {
        term *= q / (T(k) * T(k + 1));
        hk1 += 1.0L / k;
        hk2 += 1.0L / (k + 1);
      }
      T add = term * T(hk1 + hk2 - 2.0L * kGammaE);
      sum1 += add;
      if (abs(add) <= abs(sum1) * 1e-21L && k > 4) break;
    }
    k1 = T(1) / z + lg * i1 - (z / T(4)) * sum1;
  } else {
    T rho0 = k_ratio_cf0<T>(z);  // K_1/K_0
    T i0 = mod_i_any<T>(0, z), i1 = mod_i_any<T>(1, z);
    k0 = T(1) / (z * (i1 + rho0 * i0));  // Wronskian I_0 K_1 + I_1 K_0 = 1/z
    k1 = rho0 * k0;
  }
}

template <class T>
T mod_k_generic(int m, T z) {
  T k0, k1;
  k_seeds<T>(z, k0, k1);
  if (m == 0) return k0;
  T km1 = k0, kk = k1;
  for (int j = 1; j < m; ++j) {
    T kp1 = km1 + (T(2 * j) / z) * kk;
    km1 = kk;
    kk = kp1;
    using std::abs;
    if (!(abs(kk) < 1e300L)) throw NumericError("mod_bessel_k: overflow in order recurrence");
  }
  return kk;
}

// ---------------------------------------------------------------------------
// Bessel J (Miller backward recurrence, normalization J_0 + 2 J_2 + ... = 1)
// and Y (series seeds for x <= 14, Hankel asymptotics beyond, then upward
// recurrence, stable because Y dominates J for growing order).
// ---------------------------------------------------------------------------

void miller_j(ld x, int m, std::vector<ld>& out) {
  int start = std::max<int>(m, static_cast<int>(x)) + 42 +
              static_cast<int>(12.0 * std::cbrt(std::max<double>(x, 1.0))) +
              static_cast<int>(4.0 * std::sqrt(std::max<double>(m, 16.0)));
  if (start % 2) ++start;
  out.assign(m + 1, 0.0L);
  ld jp1 = 0.0L, jj = 1e-280L, sum = 0.0L;
  for (int k = start; k >= 0; --k) {
    ld jm1 = (2.0L * (k + 1) / x) * jj - jp1;
    jp1 = jj;
    jj = jm1;
    if (k <= m) out[k] = jj;
    if (k % 2 == 0) sum += (k == 0 ? 1.0L : 2.0L) * jj;
    if (std::fabs(jj) > 1e260L) {
      jp1 *= 1e-260L;
      jj *= 1e-260L;
      sum *= 1e-260L;
      for (auto& v : out) v *= 1e-260L;
    }
  }
  for (auto& v : out) v /= sum;
}

// Hankel asymptotic amplitude/phase series: for x large,
//   J_n = sqrt(2/(pi x)) (P cos chi - Q sin chi),
//   Y_n = sqrt(2/(pi x)) (P sin chi + Q cos chi),  chi = x - (2n+1) pi/4.
void hankel_pq(int n, ld x, ld& P, ld& Q) {
  ld mu = 4.0L * n * n;
  P = 1.0L;
  Q = 0.0L;
  ld t = 1.0L;
  ld prev = 1e300L;
  for (int k = 1; k <= 60; ++k) {
    ld num = mu - (2.0L * k - 1) * (2.0L * k - 1);
    t *= num / (8.0L * x * k);
    ld mag = std::fabs(t);
    if (mag > prev) break;  // asymptotic tail started growing
    prev = mag;
    int j = k / 2;
    ld sgn = (j % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0)
      P += sgn * t;
    else
      Q += sgn * t;
    if (mag < 1e-21L) break;
  }
}

void jy_seeds(ld x, ld& j0, ld& j1, ld& y0, ld& y1) {
  if (x <= 14.0L) {
    j0 = series_i<cld>(0, cld(0.0L, x)).real();  // J_0(x) = I_0(ix)
    j1 = series_i<cld>(1, cld(0.0L, x)).imag();  // I_1(ix) = i J_1(x)
    ld q = x * x / 4.0L, lg = std::log(x / 2.0L);
    ld sum0 = 0.0L, term = 1.0L, hk = 0.0L;
    for (int k = 1; k < 160; ++k) {
      term *= -q / ((ld)k * k);
      hk += 1.0L / k;
      sum0 -= term * hk;  // sum (-1)^{k+1} H_k q^k/(k!)^2
      if (std::fabs(term) < 1e-24L && k > 6) break;
    }
    y0 = (2.0L / kPiL) * ((lg + kGammaE) * j0 + sum0);
    ld sum1 = 0.0L;
    term = 1.0L;
    ld hk1 = 0.0L, hk2 = 1.0L;
    for (int k = 0; k < 160; ++k) {
      if (k > 0) {
        term *= -q / ((ld)k * (k + 1));
        hk1 += 1.0L / k;
        hk2 += 1.0L / (k + 1);
      }
      sum1 += term * (hk1 + hk2 - 2.0L * kGammaE);
      if (std::fabs(term) < 1e-24L && k > 6) break;
    }
    y1 = (2.0L / kPiL) * (lg * j1) - (2.0L / (kPiL * x)) - (x / (2.0L * kPiL)) * sum1;
  } else {
    ld amp = std::sqrt(2.0L / (kPiL * x));
    ld P, Q;
    hankel_pq(0, x, P, Q);
    ld chi = x - kPiL / 4.0L;
    j0 = amp * (P * std::cos(chi) - Q * std::sin(chi));
    y0 = amp * (P * std::sin(chi) + Q * std::cos(chi));
    hankel_pq(1, x, P, Q);
    chi = x - 3.0L * kPiL / 4.0L;
    j1 = amp * (P * std::cos(chi) - Q * std::sin(chi));
    y1 = amp * (P * std::sin(chi) + Q * std::cos(chi));
  }
}

ld bessel_y_ld(int m, ld x) {
  ld j0, j1, y0, y1;
  jy_seeds(x, j0, j1, y0, y1);
  if (m == 0) return y0;
  ld ym1 = y0, yy = y1;
  for (int j = 1; j < m; ++j) {
    ld yp1 = (2.0L * j / x) * yy - ym1;
    ym1 = yy;
    yy = yp1;
    if (!(std::fabs(yy) < 1e300L)) throw NumericError("bessel_y: overflow in order recurrence");
  }
  return yy;
}

void check_cplx_domain(int m, cplx z, const char* fn, bool need_right_half) {
  if (m < 0 || m > 200 || !std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
      std::abs(z) < 1e-8 || std::abs(z) > 1e4)
    throw NumericError(std::string(fn) + ": domain is 0 <= m <= 200 and 1e-8 <= |z| <= 1e4");
  if (need_right_half && !(z.real() > 1e-8))
    throw NumericError(std::string(fn) + ": requires Re z > 1e-8");
}

cld to_cld(cplx z) { return cld((ld)z.real(), (ld)z.imag()); }

cplx to_cplx(cld z, const char* fn) {
  cplx r{(double)z.real(), (double)z.imag()};
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
    throw NumericError(std::string(fn) + ": overflow");
  return r;
}

}  // namespace

double mod_bessel_i(int m, double x) {
  check_real_domain(m, x, 0.0, 700.0, "mod_bessel_i", "(0, 700]");
  ld v = mod_i_any<ld>(m, (ld)x);
  if (!(std::fabs((double)v) < 1e308)) throw NumericError("mod_bessel_i: overflow");
  return (double)v;
}

double mod_bessel_k(int m, double x) {
  check_real_domain(m, x, 1e-8, 700.0, "mod_bessel_k", "(1e-8, 700]");
  ld v = mod_k_generic<ld>(m, (ld)x);
  if (!(std::fabs((double)v) < 1e308)) throw NumericError("mod_bessel_k: overflow");
  return (double)v;
}

double mod_bessel_i_prime(int m, double x) {
  // I_m' = I_{m+1} + (m/x) I_m
  check_real_domain(m, x, 0.0, 700.0, "mod_bessel_i_prime", "(0, 700]");
  if (x <= 25.0) return (double)(series_i<ld>(m + 1, (ld)x) + (ld)m / (ld)x * series_i<ld>(m, (ld)x));
  std::vector<ld> v;
  miller_i<ld>((ld)x, m + 1, v);
  return (double)(v[m + 1] + (ld)m / (ld)x * v[m]);
}

double mod_bessel_k_prime(int m, double x) {
  // K_m' = (m/x) K_m - K_{m+1}
  check_real_domain(m, x, 1e-8, 700.0, "mod_bessel_k_prime", "(1e-8, 700]");
  ld km = mod_k_generic<ld>(m, (ld)x);
  ld kp = mod_k_generic<ld>(m + 1, (ld)x);
  return (double)((ld)m / (ld)x * km - kp);
}

double bessel_j(int m, double x) {
  check_real_domain(m, x, 1e-8, 1e4, "bessel_j", "(1e-8, 1e4]");
  std::vector<ld> v;
  miller_j((ld)x, m, v);
  return (double)v[m];
}

double bessel_y(int m, double x) {
  check_real_domain(m, x, 1e-8, 1e4, "bessel_y", "(1e-8, 1e4]");
  return (double)bessel_y_ld(m, (ld)x);
}

double bessel_j_prime(int m, double x) {
  check_real_domain(m, x, 1e-8, 1e4, "bessel_j_prime", "(1e-8, 1e4]");
  std::vector<ld> v;
  miller_j((ld)x, m + 1, v);
  ld jm1 = (m == 0) ? -v[1] : v[m - 1];
  return (double)((jm1 - v[m + 1]) / 2.0L);
}

double bessel_y_prime(int m, double x) {
  check_real_domain(m, x, 1e-8, 1e4, "bessel_y_prime", "(1e-8, 1e4]");
  ld ym1 = (m == 0) ? -bessel_y_ld(1, (ld)x) : bessel_y_ld(m - 1, (ld)x);
  ld yp1 = bessel_y_ld(m + 1, (ld)x);
  return (double)((ym1 - yp1) / 2.0L);
}

cplx hankel1(int m, double x) { return {bessel_j(m, x), bessel_y(m, x)}; }

cplx hankel1_prime(int m, double x) { return {bessel_j_prime(m, x), bessel_y_prime(m, x)}; }

cplx k_ratio(int m, cplx z) {
  check_cplx_domain(m, z, "k_ratio", true);
  cld zz = to_cld(z);
  cld rho;
  try {
    if (std::abs(z) <= 2.0) {
      // The continued fraction loses accuracy as z -> 0; the series seeds
      // are exact there.
      cld k0, k1;
      k_seeds<cld>(zz, k0, k1);
      rho = k1 / k0;
    } else {
      rho = k_ratio_cf0<cld>(zz);  // K_1/K_0
    }
  } catch (const NumericError&) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "k_ratio: continued fraction did not converge within 1e4 terms at m=%d, "
                  "z=(%.17g, %.17g)",
                  m, z.real(), z.imag());
    throw NumericError(buf);
  }
  for (int j = 1; j <= m; ++j) rho = cld(2 * j) / zz + cld(1) / rho;
  // K_m'/K_m = m/z - K_{m+1}/K_m
  return to_cplx(cld(m) / zz - rho, "k_ratio");
}

cplx mod_bessel_i_cplx(int m, cplx z) {
  check_cplx_domain(m, z, "mod_bessel_i_cplx", false);
  return to_cplx(mod_i_any<cld>(m, to_cld(z)), "mod_bessel_i_cplx");
}

cplx mod_bessel_k_cplx(int m, cplx z) {
  check_cplx_domain(m, z, "mod_bessel_k_cplx", true);
  return to_cplx(mod_k_generic<cld>(m, to_cld(z)), "mod_bessel_k_cplx");
}

cplx mod_bessel_i_prime_cplx(int m, cplx z) {
  check_cplx_domain(m, z, "mod_bessel_i_prime_cplx", false);
  cld zz = to_cld(z);
  return to_cplx(mod_i_any<cld>(m + 1, zz) + cld(m) / zz * mod_i_any<cld>(m, zz), "mod_bessel_i_prime_cplx");
}

cplx mod_bessel_k_prime_cplx(int m, cplx z) {
  check_cplx_domain(m, z, "mod_bessel_k_prime_cplx", true);
  cld zz = to_cld(z);
  return to_cplx(cld(m) / zz * mod_k_generic<cld>(m, zz) - mod_k_generic<cld>(m + 1, zz), "mod_bessel_k_prime_cplx");
}

}  // namespace sie::bessel
