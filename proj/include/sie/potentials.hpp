#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sie/common.hpp"
#include "sie/dtn.hpp"
#include "sie/fem.hpp"
#include "sie/geometry.hpp"

namespace sie::potentials {

enum class DensityKind { Dirichlet, Neumann };

/// Nodal P1 density on the boundary Gamma_j of mesh region j.  When Gamma_j
/// consists of several circles, the values stack the circle loops ascending
/// by interface id (that is, ascending by radius).
struct Density {
  int region = 0;
  DensityKind kind = DensityKind::Neumann;
  Eigen::VectorXcd values;
};

/// Interface circle ids composing the boundary of mesh region `region`:
/// one circle for the outermost/innermost regions, two for a band.
std::vector<int> region_circles(const geo::Mesh& mesh, int region);

/// How the region coefficients (A_j, p_j) continue beyond Omega_j.  Constant
/// extends them as globally constant coefficients (realized as a unit
/// coefficient problem at the scaled wavenumber); Physical keeps the given
/// coefficient field everywhere.  Potentials built from either extension
/// agree on Omega_j up to discretization error.
enum class Extension { Constant, Physical };

/// Variational layer potentials for one region boundary Gamma_j.
///
/// With the Constant extension, the region coefficients (c_j I, p_j) are
/// continued as globally constant coefficients on the ball, which turns the
/// potential problems into unit coefficient problems at the scaled
/// wavenumber s_j = s sqrt(p_j / c_j); the conormal weight c_j reappears in
/// every Neumann trace.  With the Physical extension, the crack problems are
/// assembled with the full coefficient field at the physical wavenumber and
/// the conormal weight is one.  Both layer potentials share one factorized
/// crack-mesh system: the single layer ties the duplicated interface nodes
/// and carries the density as interface load, the double layer imposes the
/// Dirichlet jump through inhomogeneous tie offsets.  Fields returned by the
/// crack-route operations live on crack_space(); the variational route
/// returns fields on base_space().
class PotentialSetup {
 public:
  /// `mesh` is a full-ball concentric mesh (no obstacle hole); `region` is a
  /// mesh region id; `coeff` holds the physical region coefficients.  The
  /// Constant extension reads only region j (which must be isotropic); the
  /// Physical extension assembles all regions.  `mode_cutoff` passes through
  /// to the truncation operators.
  PotentialSetup(const geo::Mesh& mesh, int region, const fem::CoefficientField& coeff,
                 const WaveContext& wave, int mode_cutoff = -1,
                 Extension extension = Extension::Constant);

  // Solver handles keep pointers into the embedded spaces.
  PotentialSetup(const PotentialSetup&) = delete;
  PotentialSetup& operator=(const PotentialSetup&) = delete;

  int region() const { return region_; }
  const std::vector<int>& circles() const { return circles_; }
  const WaveContext& wave() const { return wave_; }
  /// Wavenumber of the assembled crack problem (scaled for the Constant
  /// extension, physical otherwise).
  const WaveContext& scaled_wave() const { return scaled_; }
  Extension extension() const { return extension_; }
  double conormal_weight() const { return c_; }

  /// p_j-weighted mass matrix of the crack space for the chosen extension.
  Eigen::SparseMatrix<double> extension_mass() const;

  const fem::FeSpace& base_space() const { return base_space_; }
  const fem::FeSpace& crack_space() const { return crack_space_; }

  /// Stacked Gamma_j node count.
  int num_nodes() const { return static_cast<int>(base_nodes_.size()); }
  /// Gamma_j nodes in the base mesh (equal to the crack-mesh interior copies).
  const std::vector<int>& base_nodes() const { return base_nodes_; }
  /// Crack-mesh node copies on the Omega_j side of Gamma_j.
  const std::vector<int>& omega_nodes() const { return omega_nodes_; }
  /// Crack-mesh node copies on the complement side.
  const std::vector<int>& exterior_nodes() const { return exterior_nodes_; }
  /// 1D P1 mass matrix on the Gamma_j polylines (stacked blocks).
  const Eigen::SparseMatrix<double>& gamma_mass() const { return gamma_mass_; }

  /// Single layer potential by the direct variational route on the
  /// continuous space: l(u, v) = <g, trace of conj v> for all v.
  fem::Field single_layer_variational(const Density& g);

  /// Single layer potential on the crack mesh: duplicated nodes tied (zero
  /// Dirichlet jump), density applied as interface load (Neumann jump g).
  fem::Field single_layer(const Density& g);

  /// Double layer potential on the crack mesh: Dirichlet jump -g imposed
  /// through the tie offsets, natural zero Neumann-jump coupling.
  fem::Field double_layer(const Density& g);

  /// Jump and mean traces of a crack-mesh field, oriented by the outward
  /// normal of Omega_j: [u]_D = u|_Omega - u|_ext, [u]_N = conormal sum,
  /// means with one half.  Neumann traces are extracted variationally (the
  /// one-sided residual of the homogeneous form against the interface mass).
  Eigen::VectorXcd dirichlet_jump(const fem::Field& u) const;
  Eigen::VectorXcd dirichlet_mean(const fem::Field& u) const;
  Eigen::VectorXcd neumann_jump(const fem::Field& u) const;
  Eigen::VectorXcd neumann_mean(const fem::Field& u) const;

  /// Ultraweak consistency residual of u = double_layer(g): the maximum over
  /// `trials` random smooth sources f of
  ///   |<u, L conj v> - <g, conormal trace of conj v>| / scale
  /// with v the discrete Newton potential of f at the conjugated wavenumber.
  double ultraweak_residual(const Density& g, const fem::Field& u, int trials, uint64_t seed);

  /// Green recombination S([u]_N) - D([u]_D) of a crack-mesh field.
  fem::Field green_reconstruct(const fem::Field& u);

 private:
  Eigen::VectorXcd tied_solve(const Eigen::VectorXcd& load, const Eigen::VectorXcd& offsets);
  Eigen::VectorXcd one_sided_residual(const fem::Field& u, bool omega_side) const;
  Eigen::VectorXcd mass_gamma_solve(const Eigen::VectorXcd& rhs) const;
  void check_density(const Density& g, DensityKind kind) const;
  void check_crack_field(const fem::Field& u) const;
  fem::SystemMatrix& base_system();
  fem::SystemMatrix& conj_system();

  int region_ = 0;
  std::vector<int> circles_;
  WaveContext wave_{};
  WaveContext scaled_{};
  Extension extension_ = Extension::Constant;
  fem::CoefficientField coeff_;
  double c_ = 1.0, p_ = 1.0;
  int mode_cutoff_ = -1;

  fem::FeSpace base_space_;
  fem::FeSpace crack_space_;
  std::vector<int> base_nodes_, omega_nodes_, exterior_nodes_;
  std::vector<int> slave_;   // exterior copies, stacked order
  std::vector<int> master_;  // matching interior copies
  std::vector<double> side_sign_;  // +1 when Omega_j is inside the circle

  Eigen::SparseMatrix<cplx> crack_full_;   // l on the crack mesh, scaled wave
  Eigen::SparseMatrix<cplx> tie_;          // reduced -> crack dofs
  Eigen::SparseMatrix<cplx> reduced_;      // tie^T crack_full tie
  std::vector<int> reduced_index_;         // crack vertex -> reduced dof
  Eigen::SparseMatrix<double> gamma_mass_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> tied_lu_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gamma_ldlt_;
  std::unique_ptr<fem::SystemMatrix> base_system_;       // scaled wave, base mesh
  std::unique_ptr<fem::SystemMatrix> conj_system_;       // conjugated wave, base mesh
  Eigen::SparseMatrix<cplx> crack_conj_;                 // l on the crack mesh, conjugated
  bool crack_conj_built_ = false;
};

}  // namespace sie::potentials
