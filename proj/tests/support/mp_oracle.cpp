#include "mp_oracle.hpp"

#include <mpfr.h>

namespace mporacle {

namespace {

constexpr mpfr_prec_t kPrec = 256;

// Minimal RAII wrapper over mpfr_t with value semantics.
class Mp {
 public:
  Mp() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
  explicit Mp(double x) { mpfr_init2(v_, kPrec); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Mp(long x) { mpfr_init2(v_, kPrec); mpfr_set_si(v_, x, MPFR_RNDN); }
  Mp(const Mp& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp& operator=(const Mp& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  ~Mp() { mpfr_clear(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  friend Mp operator+(const Mp& a, const Mp& b) { Mp r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator-(const Mp& a, const Mp& b) { Mp r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator*(const Mp& a, const Mp& b) { Mp r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator/(const Mp& a, const Mp& b) { Mp r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  Mp operator-() const { Mp r; mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

  static Mp log(const Mp& a) { Mp r; mpfr_log(r.v_, a.v_, MPFR_RNDN); return r; }
  static Mp atan2(const Mp& y, const Mp& x) { Mp r; mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN); return r; }
  static Mp abs(const Mp& a) { Mp r; mpfr_abs(r.v_, a.v_, MPFR_RNDN); return r; }
  static Mp euler() { Mp r; mpfr_const_euler(r.v_, MPFR_RNDN); return r; }

  // |a| <= |b| * 2^shift
  static bool le_shifted(const Mp& a, const Mp& b, long shift) {
    Mp t = Mp::abs(a), s = Mp::abs(b);
    mpfr_mul_2si(s.v_, s.v_, shift, MPFR_RNDN);
    return mpfr_cmp(t.v_, s.v_) <= 0;
  }
  static bool greater_abs(const Mp& a, const Mp& b) { return mpfr_cmpabs(a.v_, b.v_) > 0; }

 private:
  mutable mpfr_t v_;
};

// Complex numbers as mpfr pairs.
struct MpC {
  Mp re, im;
  MpC() = default;
  MpC(const Mp& r, const Mp& i) : re(r), im(i) {}
  explicit MpC(double r, double i = 0.0) : re(r), im(i) {}
  friend MpC operator+(const MpC& a, const MpC& b) { return {a.re + b.re, a.im + b.im}; }
  friend MpC operator-(const MpC& a, const MpC& b) { return {a.re - b.re, a.im - b.im}; }
  friend MpC operator*(const MpC& a, const MpC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend MpC operator/(const MpC& a, const MpC& b) {
    Mp d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  MpC operator-() const { return {-re, -im}; }
  Mp abs2() const { return re * re + im * im; }
  static MpC log(const MpC& z) {
    return {Mp(0.5) * Mp::log(z.abs2()), Mp::atan2(z.im, z.re)};
  }
  std::complex<double> to_cplx() const { return {re.to_double(), im.to_double()}; }
};

MpC from_long(long k) { return MpC(Mp(k), Mp(0L)); }

// I_m(z) ascending series; `peak` tracking makes the stop criterion valid for
// the alternating case (J via I_m(iz)) as well.
MpC series_i_c(int m, const MpC& z) {
  MpC half = z / MpC(2.0);
  MpC term(1.0);
  for (int j = 1; j <= m; ++j) term = term * half / from_long(j);
  MpC sum = term;
  MpC q = half * half;
  Mp peak = term.abs2();
  for (int k = 1; k < 40000; ++k) {
    term = term * q / from_long((long)k * (k + m));
    sum = sum + term;
    Mp a = term.abs2();
    if (Mp::greater_abs(a, peak)) peak = a;
    if (Mp::le_shifted(a, peak, -480)) break;
  }
  return sum;
}

// K_0, K_1 ascending series (irregular solution with log and harmonic terms).
void series_k01_c(const MpC& z, MpC& k0, MpC& k1) {
  MpC half = z / MpC(2.0);
  MpC q = half * half;
  MpC i0 = series_i_c(0, z), i1 = series_i_c(1, z);
  MpC lg = MpC::log(half);
  MpC geuler(Mp::euler(), Mp(0L));

  MpC sum0(0.0), term(1.0);
  Mp hk(0L);
  for (int k = 1; k < 40000; ++k) {
    term = term * q / from_long((long)k * k);
    hk = hk + Mp(1.0) / Mp((long)k);
    MpC add = term * MpC(hk, Mp(0L));
    sum0 = sum0 + add;
    if (k > 4 && Mp::le_shifted(add.abs2(), sum0.abs2(), -480)) break;
  }
  k0 = -(lg + geuler) * i0 + sum0;

  MpC sum1(0.0);
  term = MpC(1.0);
  Mp h1(0L), h2(1L);
  for (int k = 0; k < 40000; ++k) {
    if (k > 0) {
      term = term * q / from_long((long)k * (k + 1));
      h1 = h1 + Mp(1.0) / Mp((long)k);
      h2 = h2 + Mp(1.0) / Mp((long)(k + 1));
    }
    MpC add = term * MpC(h1 + h2 - Mp(2.0) * Mp::euler(), Mp(0L));
    sum1 = sum1 + add;
    if (k > 4 && Mp::le_shifted(add.abs2(), sum1.abs2(), -480)) break;
  }
  k1 = MpC(1.0) / z + lg * i1 - (z / MpC(4.0)) * sum1;
}

MpC bessel_k_c(int m, const MpC& z) {
  MpC k0, k1;
  series_k01_c(z, k0, k1);
  if (m == 0) return k0;
  MpC km1 = k0, kk = k1;
  for (int j = 1; j < m; ++j) {
    MpC kp1 = km1 + (from_long(2L * j) / z) * kk;
    km1 = kk;
    kk = kp1;
  }
  return kk;
}

// Y_0, Y_1 ascending series, real argument.
void series_y01(const Mp& x, Mp& y0, Mp& y1) {
  Mp pi = Mp::atan2(Mp(0.0), Mp(-1.0));

  MpC zi(Mp(0L), x);                       // i x
  Mp j0 = series_i_c(0, zi).re;            // J_0(x) = I_0(ix)
  Mp j1 = series_i_c(1, zi).im;            // I_1(ix) = i J_1(x)
  Mp q = x * x / Mp(4.0);
  Mp lg = Mp::log(x / Mp(2.0));

  Mp sum0(0L), term(1.0), hk(0L), peak(1.0);
  for (int k = 1; k < 40000; ++k) {
    term = term * (-q) / (Mp((long)k) * Mp((long)k));
    hk = hk + Mp(1.0) / Mp((long)k);
    Mp add = term * hk;
    sum0 = sum0 - add;  // sum (-1)^{k+1} H_k q^k/(k!)^2
    if (Mp::greater_abs(add, peak)) peak = add;
    if (k > 4 && Mp::le_shifted(add, peak, -240)) break;
  }
  y0 = (Mp(2.0) / pi) * ((lg + Mp::euler()) * j0 + sum0);

  Mp sum1(0L);
  term = Mp(1.0);
  Mp h1(0L), h2(1L);
  peak = Mp(1.0);
  for (int k = 0; k < 40000; ++k) {
    if (k > 0) {
      term = term * (-q) / (Mp((long)k) * Mp((long)(k + 1)));
      h1 = h1 + Mp(1.0) / Mp((long)k);
      h2 = h2 + Mp(1.0) / Mp((long)(k + 1));
    }
    Mp add = term * (h1 + h2 - Mp(2.0) * Mp::euler());
    sum1 = sum1 + add;
    if (Mp::greater_abs(add, peak)) peak = add;
    if (k > 4 && Mp::le_shifted(add, peak, -240)) break;
  }
  y1 = (Mp(2.0) / pi) * (lg * j1) - Mp(2.0) / (pi * x) - (x / (Mp(2.0) * pi)) * sum1;
}

}  // namespace

double bessel_i(int m, double x) { return series_i_c(m, MpC(x)).re.to_double(); }

double bessel_k(int m, double x) { return bessel_k_c(m, MpC(x)).re.to_double(); }

double bessel_j(int m, double x) {
  MpC v = series_i_c(m, MpC(0.0, x));  // I_m(ix) = i^m J_m(x)
  switch (m % 4) {
    case 0: return v.re.to_double();
    case 1: return v.im.to_double();
    case 2: return (-v.re).to_double();
    default: return (-v.im).to_double();
  }
}

double bessel_y(int m, double x) {
  Mp y0, y1;
  series_y01(Mp(x), y0, y1);
  if (m == 0) return y0.to_double();
  Mp xx(x);
  Mp ym1 = y0, yy = y1;
  for (int j = 1; j < m; ++j) {
    Mp yp1 = (Mp(2.0) * Mp((long)j) / xx) * yy - ym1;
    ym1 = yy;
    yy = yp1;
  }
  return yy.to_double();
}

std::complex<double> k_ratio(int m, std::complex<double> z) {
  MpC zz(z.real(), z.imag());
  MpC km = bessel_k_c(m, zz);
  MpC kp = bessel_k_c(m + 1, zz);
  MpC kmm = (m == 0) ? kp : bessel_k_c(m - 1, zz);  // K_{-1} = K_1
  MpC kprime = -(kmm + kp) / MpC(2.0);
  return (kprime / km).to_cplx();
}

}  // namespace mporacle
