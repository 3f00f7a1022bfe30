#include "sie/dtn.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "sie/bessel.hpp"

namespace sie::dtn {
namespace {

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// H_m^(1)'(x) / H_m^(1)(x) for real x > 0.
cplx hankel1_ratio(int m, double x) {
  return bessel::hankel1_prime(m, x) / bessel::hankel1(m, x);
}

void check_wave_domain(cplx s, double R, const char* fn) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw NumericError(fmt("%s: truncation radius R = %g must be positive and finite", fn, R));
  if (s == cplx(0.0, 0.0) || s.real() < 0.0 || !std::isfinite(s.real()) ||
      !std::isfinite(s.imag()))
    throw NumericError(
        fmt("%s: wavenumber s = (%g, %g) is outside the admissible set Re s >= 0, s != 0", fn,
            s.real(), s.imag()));
}

// Phi_m(r) for the radial basis of the exterior solution: K_m(s r) continued
// across the imaginary axis.  Only ratios Phi_m(r)/Phi_m(R) are ever used, so
// the proportionality constants of the continuation do not matter.
cplx radial_basis(int m, cplx s, double r) {
  if (s.real() > 0.0) return bessel::mod_bessel_k_cplx(m, s * r);
  const double kappa = std::abs(s.imag());
  const cplx h = bessel::hankel1(m, kappa * r);
  return s.imag() < 0.0 ? h : std::conj(h);
}

}  // namespace

cplx dtn_eigenvalue(int m, cplx s, double R) {
  check_wave_domain(s, R, "dtn_eigenvalue");
  m = std::abs(m);
  cplx d;
  if (s.real() > 0.0) {
    d = s * bessel::k_ratio(m, s * R);
  } else {
    // s = i*beta.  The branch continued from Re s > 0 gives the outgoing
    // Hankel basis H^(1) for beta < 0; beta > 0 follows by conjugation.
    const double kappa = std::abs(s.imag());
    d = kappa * hankel1_ratio(m, kappa * R);
    if (s.imag() > 0.0) d = std::conj(d);
  }
  if (d.real() > 0.0)
    throw NumericError(fmt("dtn_eigenvalue: sign violation Re d_%d = %g > 0 at s=(%g, %g), R=%g",
                           m, d.real(), s.real(), s.imag(), R));
  if (s.imag() != 0.0 && !(s.imag() * d.imag() < 0.0))
    throw NumericError(
        fmt("dtn_eigenvalue: sign violation Im(s) Im(d_%d) = %g >= 0 at s=(%g, %g), R=%g", m,
            s.imag() * d.imag(), s.real(), s.imag(), R));
  return d;
}

DtnOperator make_dtn_operator(const geo::Mesh& mesh, const WaveContext& wave, int mode_cutoff) {
  DtnOperator op;
  op.wave = wave;
  op.nodes = geo::outer_loop(mesh);
  const int n = op.num_nodes();

  op.angles.resize(n);
  for (int i = 0; i < n; ++i) {
    const geo::Vec2 v = mesh.vertices[op.nodes[i]];
    const double r = geo::norm(v);
    if (std::abs(r - wave.R) > 1e-9 * wave.R)
      throw ConfigError(
          fmt("outer boundary node %d sits at radius %.17g, which does not match the "
              "truncation radius R = %.17g of the wave context",
              op.nodes[i], r, wave.R));
    double t = std::atan2(v.y, v.x);
    if (i > 0)
      while (t <= op.angles[i - 1]) t += 2.0 * kPi;
    op.angles[i] = t;
  }
  if (op.angles[n - 1] >= op.angles[0] + 2.0 * kPi)
    throw NumericError("make_dtn_operator: outer boundary loop angles wrap more than once");

  op.mode_cutoff = mode_cutoff < 0 ? std::min(32, n / 4) : mode_cutoff;
  const int nyquist = n / 2 - 1;
  if (op.mode_cutoff > nyquist)
    throw ConfigError(
        fmt("mode cutoff M = %d violates the Nyquist guard M <= n/2 - 1 = %d for n = %d "
            "outer boundary nodes",
            op.mode_cutoff, nyquist, n));

  op.eigenvalues.resize(op.mode_cutoff + 1);
  for (int m = 0; m <= op.mode_cutoff; ++m)
    op.eigenvalues[m] = dtn_eigenvalue(m, wave.s, wave.R);
  return op;
}

Eigen::MatrixXcd hat_fourier_matrix(const DtnOperator& op) {
  const int n = op.num_nodes(), M = op.mode_cutoff;
  Eigen::MatrixXcd C(2 * M + 1, n);
  for (int i = 0; i < n; ++i) {
    // Hat i is the tent in angle over [a, b, c]; the closed-form transform
    // follows from integrating the piecewise-constant derivative by parts.
    const double a = i == 0 ? op.angles[n - 1] - 2.0 * kPi : op.angles[i - 1];
    const double b = op.angles[i];
    const double c = i == n - 1 ? op.angles[0] + 2.0 * kPi : op.angles[i + 1];
    for (int m = -M; m <= M; ++m) {
      cplx v;
      if (m == 0) {
        v = (c - a) / (4.0 * kPi);
      } else {
        const cplx ea = std::exp(cplx(0.0, -m * a));
        const cplx eb = std::exp(cplx(0.0, -m * b));
        const cplx ec = std::exp(cplx(0.0, -m * c));
        v = -((ea - eb) / (b - a) - (eb - ec) / (c - b)) / (2.0 * kPi * m * m);
      }
      C(m + M, i) = v;
    }
  }
  return C;
}

Eigen::VectorXcd trace_modes(const DtnOperator& op, const Eigen::VectorXcd& g) {
  if (g.size() != op.num_nodes())
    throw NumericError(fmt("trace_modes: trace has %d samples, boundary has %d nodes",
                           static_cast<int>(g.size()), op.num_nodes()));
  return hat_fourier_matrix(op) * g;
}

Eigen::VectorXcd apply_dtn_modes(const DtnOperator& op, const Eigen::VectorXcd& modes) {
  const int M = op.mode_cutoff;
  Eigen::VectorXcd out(modes.size());
  for (int m = -M; m <= M; ++m) out[m + M] = op.d(m) * modes[m + M];
  return out;
}

Eigen::VectorXcd apply_ntd_modes(const DtnOperator& op, const Eigen::VectorXcd& modes) {
  const int M = op.mode_cutoff;
  Eigen::VectorXcd out(modes.size());
  for (int m = -M; m <= M; ++m) out[m + M] = modes[m + M] / op.d(m);
  return out;
}

Eigen::MatrixXcd assemble_dtn_form(const DtnOperator& op) {
  const int M = op.mode_cutoff;
  const Eigen::MatrixXcd C = hat_fourier_matrix(op);
  Eigen::VectorXcd d(2 * M + 1);
  for (int m = -M; m <= M; ++m) d[m + M] = op.d(m);
  return 2.0 * kPi * op.wave.R * (C.adjoint() * d.asDiagonal() * C);
}

cplx dtn_quadratic_form(const DtnOperator& op, const Eigen::VectorXcd& x) {
  const int M = op.mode_cutoff;
  const Eigen::VectorXcd modes = trace_modes(op, x);
  cplx q = 0.0;
  for (int m = -M; m <= M; ++m) q += op.d(m) * std::norm(modes[m + M]);
  return 2.0 * kPi * op.wave.R * q;
}

std::vector<cplx> exterior_eval(const Eigen::VectorXcd& boundary_trace, const DtnOperator& op,
                                const std::vector<geo::Vec2>& points) {
  const int M = op.mode_cutoff;
  const double R = op.wave.R;
  const cplx s = op.wave.s;
  const Eigen::VectorXcd modes = trace_modes(op, boundary_trace);

  std::vector<cplx> den(M + 1);
  for (int m = 0; m <= M; ++m) den[m] = radial_basis(m, s, R);

  std::vector<cplx> out;
  out.reserve(points.size());
  for (const geo::Vec2& p : points) {
    const double r = geo::norm(p);
    if (!(r > R))
      throw NumericError(
          fmt("exterior_eval: point (%g, %g) with |x| = %.17g lies inside the closure of the "
              "truncation disk of radius %.17g",
              p.x, p.y, r, R));
    const double theta = std::atan2(p.y, p.x);
    cplx u = 0.0;
    for (int m = -M; m <= M; ++m) {
      const cplx ratio = radial_basis(std::abs(m), s, r) / den[std::abs(m)];
      u += modes[m + M] * ratio * std::exp(cplx(0.0, m * theta));
    }
    out.push_back(u);
  }
  return out;
}

}  // namespace sie::dtn
