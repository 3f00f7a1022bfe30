#include <cmath>
#include <cstdio>

#include "sie/common.hpp"

namespace sie {

void validate_wave(const WaveContext& wave) {
  char buf[192];
  if (!(wave.R > 0.0) || !std::isfinite(wave.R)) {
    std::snprintf(buf, sizeof(buf), "truncation radius R = %g must be positive and finite",
                  wave.R);
    throw ConfigError(buf);
  }
  if (!std::isfinite(wave.s.real()) || !std::isfinite(wave.s.imag()) ||
      wave.s == cplx(0.0, 0.0) || wave.s.real() < 0.0) {
    std::snprintf(buf, sizeof(buf),
                  "wavenumber s = (%g, %g) violates admissibility condition (C1): Re s >= 0 "
                  "and s != 0",
                  wave.s.real(), wave.s.imag());
    throw ConfigError(buf);
  }
}

}  // namespace sie
