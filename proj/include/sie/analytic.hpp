#pragma once

#include <optional>
#include <vector>

#include "sie/common.hpp"
#include "sie/geometry.hpp"

namespace sie::analytic {

/// Boundary condition imposed on the obstacle circle, when present.
enum class ObstacleBc { Dirichlet, Neumann };

/// Concentric radial transmission problem with region-wise constant isotropic
/// coefficients A_j = c_j I and weights p_j.  Region 0 is the outermost
/// annulus (touching the truncation circle r = R) and region indices grow
/// inward, matching the mesh region convention.  Separation of variables
/// reduces each Fourier mode to a small radial matching system, which makes
/// these problems exact references for the discrete solvers.
struct RadialProblem {
  double R = 1.0;                         ///< truncation radius (exact DtN closure at r = R)
  std::vector<double> interfaces;         ///< ascending interface radii, all in (0, R)
  std::optional<double> obstacle_radius;  ///< circular obstacle inside the innermost region
  ObstacleBc obstacle_bc = ObstacleBc::Dirichlet;
  std::vector<double> c;  ///< per-region A_j = c_j I, entry 0 outermost
  std::vector<double> p;  ///< per-region p_j, entry 0 outermost
  cplx s;                 ///< wavenumber with Re s >= 0 and s != 0

  int num_regions() const { return static_cast<int>(interfaces.size()) + 1; }
  /// Region index containing radius r; radii exactly on an interface resolve
  /// to the outer side.
  int region_of(double r) const;
  /// Modified wavenumber s sqrt(p_j / c_j) of region j; it lies on the same
  /// axis as s since p_j / c_j > 0.
  cplx s_hat(int region) const;
  double inner_radius(int region) const;
  double outer_radius(int region) const;
};

/// Drive of a single Fourier mode: jump data on one interface and/or obstacle
/// boundary data.  Jumps are oriented inner side minus outer side,
///   u_in - u_out = a e^{i m t},   c_in du_in/dr - c_out du_out/dr = b e^{i m t},
/// with t the polar angle.
struct ModeDrive {
  cplx a = 0.0;         ///< Dirichlet jump across the drive interface
  cplx b = 0.0;         ///< conormal jump across the drive interface
  int interface = 0;    ///< index into RadialProblem::interfaces
  cplx obstacle = 0.0;  ///< obstacle value (Dirichlet) or conormal c_J du/dr (Neumann)
};

/// Radial factors of one solved mode.  Region j carries
///   w_j(r) = alpha[j] B1(s_hat_j r) / n1[j] + beta[j] B2(s_hat_j r) / n2[j]
/// with (B1, B2) = (I_|m|, K_|m|) off the imaginary axis and (J_|m|, H_|m|)
/// on it.  n1 and n2 are column-scaling normalizers fixed at solve time so
/// the stored coefficients stay O(1) even when the raw Bessel values span
/// hundreds of orders of magnitude.
struct ModeCoefficients {
  int m = 0;
  std::vector<cplx> alpha, beta;
  std::vector<cplx> n1, n2;
};

/// Solves the banded matching system of mode m: value and conormal jump rows
/// at every interface, regularity at the origin (or the obstacle boundary
/// condition) innermost, and the exact DtN closure at r = R.  Requires
/// |m| <= 64.  The solve is verified a posteriori: a rank-deficient matrix
/// raises a resonance error naming the mode, and a relative matching residual
/// above 1e-12 raises NumericError.
ModeCoefficients mie_solve_mode(const RadialProblem& prob, int m, const ModeDrive& drive);

/// Radial factor w_j(r) of a solved mode, pinned to region j so interface
/// radii can be evaluated one-sided.  r must lie within region j's closed
/// radial span.
cplx radial_value(const RadialProblem& prob, const ModeCoefficients& mode, int region, double r);

/// d w_j / dr, pinned to region j; multiply by c_j for the conormal trace.
cplx radial_derivative(const RadialProblem& prob, const ModeCoefficients& mode, int region,
                       double r);

/// Superposition sum_k w^(k)(r) e^{i m_k t} of the given modes at each point.
/// Points must lie in the computational disk r <= R and outside the obstacle;
/// the region is chosen by radius with interface ties resolved outward.
std::vector<cplx> mie_eval(const RadialProblem& prob, const std::vector<ModeCoefficients>& modes,
                           const std::vector<geo::Vec2>& points);

}  // namespace sie::analytic
