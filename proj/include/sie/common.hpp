#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sie {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Wavenumber context shared by every operator in the lab: the complex
/// frequency s (Re s >= 0, s != 0) and the truncation radius R of the
/// artificial boundary S_R.
struct WaveContext {
  cplx s;
  double R = 1.0;

  /// min{1,|s|}; weights the |s|-scaled norms at low frequency.
  double s_low() const { return std::min(1.0, std::abs(s)); }
  /// 1/s_low; the two weights multiply to 1 by construction.
  double s_upp() const { return 1.0 / s_low(); }
};

/// Raised when user-supplied input (config file, mesh file, CLI flags)
/// violates the documented admissibility conditions.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a numerical routine leaves its validated domain
/// (non-convergent iteration, overflow, singular matching system).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Validates the admissibility condition (C1) on the wavenumber: Re s >= 0,
/// s != 0, and R > 0.  Throws ConfigError naming the violated bound.
void validate_wave(const WaveContext& wave);

/// Deterministic random stream: xorshift* generator with hand-rolled
/// distributions so that output streams are identical across platforms
/// and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift* variant; fixed algorithm, no library dependence.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0,n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  /// Complex with Re,Im uniform in [-1,1).
  cplx complex_unit() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::uint64_t state_;
};

}  // namespace sie
