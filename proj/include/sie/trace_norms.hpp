#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "sie/common.hpp"
#include "sie/geometry.hpp"

namespace sie::trace_norms {

/// Which side of the circle hosts the auxiliary extension/Riesz problems.
/// Inner is the bounded side; it keeps the trace inequality constant-free.
enum class Side { Inner, Outer };

/// Dirichlet trace and conormal density on one region boundary, indexed like
/// the loop(s) the owning context was built from.
struct CauchyData {
  Eigen::VectorXcd dirichlet;
  Eigen::VectorXcd neumann;
};

/// Computable weighted trace norms on a region boundary of the skeleton.
///
/// The H^{1/2} norm of g is the energy norm of the discrete minimal
/// extension with respect to -lap v + |s|^2 v (A = I, no p weight), and the
/// H^{-1/2} norm is realized by the Riesz solve of the same operator with
/// Neumann data.  Both auxiliary systems are assembled on the extension
/// domain (one side of a circle, or one mesh region) and factorized once at
/// construction; norm evaluations share the factorizations read-only.
class NormContext {
 public:
  /// Builds the context for the circle formed by `circle` (a closed vertex
  /// loop of `mesh`, e.g. from interface_loop or outer_loop).  The extension
  /// domain is the chosen side of the circle.  Throws ConfigError if the
  /// loop is not concentric or the requested side contains no triangles.
  NormContext(const geo::Mesh& mesh, const std::vector<int>& circle, const WaveContext& wave,
              Side side = Side::Inner);

  /// Builds the context for the boundary of mesh region `region`, given as
  /// one or more concentric circle loops (stacked in the given order).  The
  /// extension domain is the region itself, so the norms realize the trace
  /// space of the region boundary with the region as minimal-extension host.
  NormContext(const geo::Mesh& mesh, const std::vector<std::vector<int>>& loops, int region,
              const WaveContext& wave);

  const WaveContext& wave() const { return wave_; }
  /// All constrained nodes, loops stacked in construction order.
  const std::vector<int>& nodes() const { return nodes_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  /// Minimal-extension H^{1/2} norm of the nodal trace g.
  double h_half_norm(const Eigen::VectorXcd& g) const;

  /// Dual H^{-1/2} norm of the nodal density h via the Riesz solve,
  /// sqrt(<h, conj(w)>) with w the Riesz field.
  double h_minus_half_norm(const Eigen::VectorXcd& h) const;

  /// Boundary trace of the Riesz field of h: the Dirichlet density attaining
  /// equality in |<h, g>| <= h_minus_half_norm(h) h_half_norm(g).
  Eigen::VectorXcd riesz_trace(const Eigen::VectorXcd& h) const;

  /// Duality pairing <h, g> = integral over the boundary of h conj(g).
  cplx pairing(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g) const;

  /// Cauchy-data norm sqrt(h_half^2 + h_minus_half^2).
  double x_norm(const CauchyData& cd) const;

 private:
  template <class Take>
  void init(const geo::Mesh& mesh, const std::vector<std::vector<int>>& loops, Take take);

  Eigen::VectorXcd solve_interior(const Eigen::VectorXcd& rhs) const;
  Eigen::VectorXcd solve_full(const Eigen::VectorXcd& rhs) const;
  void check_size(const Eigen::VectorXcd& v, const char* what) const;

  WaveContext wave_;
  std::vector<int> nodes_;         // stacked loop nodes (mesh ids)
  int num_sub_ = 0;                // submesh vertex count
  std::vector<int> bnd_sub_;       // submesh index of each stacked node
  std::vector<int> interior_sub_;  // remaining submesh indices
  Eigen::SparseMatrix<double> L_;            // K + |s|^2 M on the extension submesh
  Eigen::SparseMatrix<double> L_ib_;         // interior x boundary coupling block
  Eigen::SparseMatrix<double> mass_gamma_;   // 1D P1 mass, block per loop
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> full_ldlt_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> interior_ldlt_;
};

double h_half_norm(const Eigen::VectorXcd& g, const NormContext& ctx);
double h_minus_half_norm(const Eigen::VectorXcd& h, const NormContext& ctx);
double x_norm(const CauchyData& cd, const NormContext& ctx);

/// Multi-trace norm: Euclidean combination over a tuple of boundary contexts.
double x_norm(const std::vector<CauchyData>& tuple, const std::vector<const NormContext*>& ctxs);

}  // namespace sie::trace_norms
