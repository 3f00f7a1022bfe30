#pragma once

#include <cstdlib>
#include <vector>

#include <Eigen/Dense>

#include "sie/common.hpp"
#include "sie/geometry.hpp"

namespace sie::dtn {

/// Eigenvalue d_m(s,R) of the Dirichlet-to-Neumann operator of the exterior
/// problem -div(grad u) + s^2 u = 0 outside the disk of radius R, acting on
/// the Fourier mode e^{im theta} of the Dirichlet trace.
///
/// For Re s > 0 the decaying radial solution is K_m(s r), so
///   d_m = s K_m'(sR) / K_m(sR).
/// On the imaginary axis s = i*beta the same branch continues to the outgoing
/// Hankel solution: for beta < 0 (kappa = -beta)
///   d_m = kappa H_m^(1)'(kappa R) / H_m^(1)(kappa R),
/// and beta > 0 follows by the conjugation symmetry d_m(conj s) = conj(d_m(s)).
///
/// Sign facts (enforced, violation raises NumericError): Re d_m <= 0 always,
/// and Im(s) * Im(d_m) < 0 whenever Im s != 0.  d_m is even in m.
/// s = 0 or Re s < 0 is a domain error (NumericError).
cplx dtn_eigenvalue(int m, cplx s, double R);

/// Truncated Fourier realization of the DtN map on the outer boundary
/// polyline of a mesh.  Immutable after construction.
struct DtnOperator {
  WaveContext wave;
  int mode_cutoff = 0;            ///< M; modes |m| <= M are resolved
  std::vector<cplx> eigenvalues;  ///< d_m for m = 0..M (d_{-m} = d_m)
  std::vector<int> nodes;         ///< outer-boundary vertex ids, CCW loop
  std::vector<double> angles;     ///< unwrapped node angles, strictly increasing

  cplx d(int m) const { return eigenvalues[static_cast<size_t>(std::abs(m))]; }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_modes() const { return 2 * mode_cutoff + 1; }
};

/// Builds the operator from the OUTER-tagged boundary loop of `mesh`.
/// `mode_cutoff < 0` selects the default M = min(32, n/4) for n boundary
/// nodes.  Guards: node radii must match wave.R (ConfigError) and M must
/// respect the Nyquist bound M <= n/2 - 1 (ConfigError naming the bound).
DtnOperator make_dtn_operator(const geo::Mesh& mesh, const WaveContext& wave,
                              int mode_cutoff = -1);

/// Fourier coefficients of the piecewise-linear-in-angle nodal hat functions
/// on the boundary polyline, by exact closed-form integration (no quadrature).
/// Entry (m + M, i) holds hat_i^(m) = (1/2pi) Int hat_i(theta) e^{-im theta}.
Eigen::MatrixXcd hat_fourier_matrix(const DtnOperator& op);

/// Mode coefficients g_m (index m + M) of the boundary trace with nodal
/// values `g` ordered like op.nodes.
Eigen::VectorXcd trace_modes(const DtnOperator& op, const Eigen::VectorXcd& g);

/// Mode-wise multiplication by d_m (the discrete DtN map on resolved modes).
Eigen::VectorXcd apply_dtn_modes(const DtnOperator& op, const Eigen::VectorXcd& modes);

/// Mode-wise division by d_m: the NtD map, exact inverse of apply_dtn_modes
/// on resolved modes (d_m never vanishes on the admissible wavenumber set).
Eigen::VectorXcd apply_ntd_modes(const DtnOperator& op, const Eigen::VectorXcd& modes);

/// Dense matrix B of the pairing <DtN v, conj w> over S_R in the nodal hat
/// basis: B[i,k] = 2 pi R Sum_m d_m hat_k^(m) conj(hat_i^(m)).  B is complex
/// symmetric (B = B^T) and Re(x^H B x) <= 0 for every x.
Eigen::MatrixXcd assemble_dtn_form(const DtnOperator& op);

/// Quadratic form x^H B x evaluated mode-wise as 2 pi R Sum_m d_m |g_m|^2.
/// Every summand has nonpositive real part, so the real part of the result
/// is nonpositive exactly, not merely up to rounding.
cplx dtn_quadratic_form(const DtnOperator& op, const Eigen::VectorXcd& x);

/// Exterior solution map: evaluates u(x) = Sum_m g_m Phi_m(|x|)/Phi_m(R)
/// e^{im theta} at the given points, where Phi_m is the decaying/outgoing
/// radial basis matching dtn_eigenvalue's branch.  Points must lie strictly
/// outside the truncation disk (NumericError otherwise).
std::vector<cplx> exterior_eval(const Eigen::VectorXcd& boundary_trace,
                                const DtnOperator& op,
                                const std::vector<geo::Vec2>& points);

}  // namespace sie::dtn
