#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sie/common.hpp"
#include "sie/dtn.hpp"
#include "sie/geometry.hpp"

namespace sie::fem {

/// Per-region material data: a symmetric positive-definite diffusion matrix
/// A and a positive reaction weight p.
struct RegionCoefficients {
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  double p = 1.0;
};

/// Region-wise constant coefficient field with the global spectral bounds
/// used by the coercivity and Garding estimates.
struct CoefficientField {
  std::vector<RegionCoefficients> regions;
  double a_min = 1.0, a_max = 1.0, p_min = 1.0, p_max = 1.0;
};

/// Validates admissibility condition (C2) (symmetric positive-definite A_j,
/// p_j > 0) and computes the spectral bounds.  Throws ConfigError citing the
/// violated condition.
CoefficientField make_coefficients(std::vector<RegionCoefficients> regions);

/// A = I, p = 1 in every region.
CoefficientField constant_coefficients(int num_regions);

/// P1 nodal space on a (possibly crack) mesh.  DOFs are mesh vertices;
/// vertices on DIRICHLET-tagged edges are constrained.
struct FeSpace {
  geo::Mesh mesh;
  std::vector<int> dirichlet;      ///< constrained vertex ids, ascending
  std::vector<int> free_index;     ///< vertex -> free-dof index, -1 if constrained
  std::vector<int> free_vertices;  ///< free-dof index -> vertex

  int num_vertices() const { return static_cast<int>(mesh.vertices.size()); }
  int num_free() const { return static_cast<int>(free_vertices.size()); }
  bool is_constrained(int v) const { return free_index[static_cast<size_t>(v)] < 0; }
};

FeSpace make_fe_space(const geo::Mesh& mesh);

/// Complex nodal field over a space.
struct Field {
  const FeSpace* space = nullptr;
  Eigen::VectorXcd values;  ///< full vertex numbering
};

/// Real P1 mass matrix (p-weighted if a coefficient field is given) and
/// stiffness matrix (A-weighted variant).  Exact per-triangle quadrature.
Eigen::SparseMatrix<double> mass_matrix(const FeSpace& space);
Eigen::SparseMatrix<double> mass_matrix(const FeSpace& space, const CoefficientField& coeff);
Eigen::SparseMatrix<double> stiffness_matrix(const FeSpace& space);
Eigen::SparseMatrix<double> stiffness_matrix(const FeSpace& space,
                                             const CoefficientField& coeff);

/// Discrete operator of the sesquilinear form
///   l(v,w) = Int A grad v . grad conj w + s^2 p v conj w  -  <DtN v, conj w>_{S_R},
/// linear in the trial argument v (columns), conjugate-linear in the test
/// argument w (rows); the matrix is complex symmetric.  Owns the Dirichlet
/// elimination and a cached sparse LU factorization of the free block.
class SystemMatrix {
 public:
  SystemMatrix(const FeSpace& space, Eigen::SparseMatrix<cplx> full);

  const FeSpace& space() const { return *space_; }
  const Eigen::SparseMatrix<cplx>& full() const { return full_; }

  /// Solves l(u, v) = rhs(conj v) for all free test functions v with zero
  /// values on the Dirichlet set.  `rhs` uses full vertex numbering; entries
  /// at constrained vertices are ignored.  The factorization is computed on
  /// first use and cached.  Raises NumericError on singular factorization or
  /// when the solve misses the 1e-10 relative residual contract.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs);

  /// Same with prescribed values at constrained vertices (lifted RHS);
  /// `dirichlet_values` uses full numbering, only constrained entries are read.
  Eigen::VectorXcd solve_lifted(const Eigen::VectorXcd& rhs,
                                const Eigen::VectorXcd& dirichlet_values);

 private:
  void ensure_factorized();

  const FeSpace* space_;
  Eigen::SparseMatrix<cplx> full_;      // all vertices, Dirichlet rows included
  Eigen::SparseMatrix<cplx> free_;      // free x free block
  Eigen::SparseMatrix<cplx> coupling_;  // free x dirichlet block
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu_;
};

/// Assembles the form above.  `dtn_op` may be null for auxiliary interior
/// problems without the truncation boundary term.  With a DtN operator the
/// coefficients must satisfy condition (C3): region 0 (the band touching
/// S_R) carries A = I, p = 1; violations raise ConfigError.  A mesh region
/// id without coefficients raises ConfigError.
SystemMatrix assemble_l(const FeSpace& space, const CoefficientField& coeff,
                        const WaveContext& wave, const dtn::DtnOperator* dtn_op);

/// Newton potential u = N(F) for a P1 source F: solves l(u, v) = (F, conj v).
Field newton_potential(SystemMatrix& matrix, const Eigen::VectorXcd& f_nodal);

/// Generic wrapper returning a Field from a dual-vector right-hand side.
Field solve_newton(SystemMatrix& matrix, const Eigen::VectorXcd& rhs);

/// Weighted norms of a discrete field.  hdiv_s applies to the flux A grad u
/// whose broken divergence vanishes for P1; the divergence content is
/// represented by the inter-element flux-jump functional (see
/// apply_L_strong), making v_norm a discrete surrogate of the graph norm.
struct FieldNorms {
  double l2 = 0.0;
  double h1_s = 0.0;    ///< sqrt(|grad u|^2 + |s|^2 |u|^2)
  double hdiv_s = 0.0;  ///< sqrt(|A grad u|^2 + |s|^-2 flux_jump^2)
  double v_norm = 0.0;  ///< sqrt(h1_s^2 + hdiv_s^2)
};
FieldNorms norms(const Field& field, const WaveContext& wave, const CoefficientField& coeff);

/// Strong-form diagnostic of L u = -div(A grad u) + s^2 p u for P1 fields:
/// the broken second derivatives vanish, so the distributional part of L u
/// is carried by the inter-element flux jumps.  flux_jump is the h-weighted
/// dual-norm estimate sqrt(Sum_e h_e |[A grad u . n]|^2_{L2(e)}) over
/// interior edges (the distance of L u from L^2); l2_bulk is |s^2 p u|_{L2}.
struct StrongResidual {
  double flux_jump = 0.0;
  double l2_bulk = 0.0;
};
StrongResidual apply_L_strong(const Field& field, const CoefficientField& coeff,
                              const WaveContext& wave);

/// Membership diagnostic for V(Omega_R, A, s): the exterior Neumann jump
/// (gamma_N - DtN) u on S_R in a mode-wise H^{-1/2} surrogate norm.  The
/// Neumann trace is read from the raw elementwise flux A grad u . n on the
/// outer boundary edges; the Dirichlet trace enters through the DtN modes.
double v_membership_residual(const Field& field, const dtn::DtnOperator& op,
                             const CoefficientField& coeff);

}  // namespace sie::fem
