#pragma once

#include <Eigen/Dense>

#include "sie/common.hpp"
#include "sie/fem.hpp"
#include "sie/potentials.hpp"
#include "sie/trace_norms.hpp"

namespace sie::calderon {

/// Cauchy datum g = (g_D, g_N) on the region boundary Gamma_j.
struct CauchyData {
  potentials::Density dirichlet;
  potentials::Density neumann;
};

/// Bundles two nodal vectors into a CauchyData on Gamma_j.
CauchyData make_cauchy(int region, Eigen::VectorXcd dirichlet, Eigen::VectorXcd neumann);

/// Stacked (g_D, g_N) layout used by CalderonMatrix.
Eigen::VectorXcd stack(const CauchyData& g);
CauchyData unstack(int region, const Eigen::VectorXcd& stacked);

/// Dense Calderon operator on Gamma_j acting on stacked (g_D, g_N):
///   C = [-K, V; -W, K'],
/// so that C (g_D, g_N) is the pair of average traces of S g_N - D g_D.
struct CalderonMatrix {
  int region = -1;
  WaveContext wave{};
  Eigen::MatrixXcd V, K, Kdual, W;
  Eigen::MatrixXcd C;

  int num_nodes() const { return static_cast<int>(V.rows()); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& stacked) const { return C * stacked; }
};

/// Average traces of the layer potentials: V g = {S g}_D, K g = {D g}_D,
/// K' g = {S g}_N, W g = {D g}_N (the Calderon blocks carry the signs).
potentials::Density apply_V(potentials::PotentialSetup& setup, const potentials::Density& g_n);
potentials::Density apply_K(potentials::PotentialSetup& setup, const potentials::Density& g_d);
potentials::Density apply_Kdual(potentials::PotentialSetup& setup, const potentials::Density& g_n);
potentials::Density apply_W(potentials::PotentialSetup& setup, const potentials::Density& g_d);

/// Column-by-column dense assembly from 2 #nodes potential solves on the
/// setup's cached factorization.
CalderonMatrix assemble_calderon(potentials::PotentialSetup& setup);

/// Self-dual bilinear pairing <g, h> = <g_D, h_N>_Gamma + <h_D, g_N>_Gamma,
/// computed with the interface mass matrix (no conjugation).
cplx dual_pairing(const potentials::PotentialSetup& setup, const CauchyData& g,
                  const CauchyData& h);

/// The X(Gamma_j) norm for Calderon residuals: minimal-extension trace norms
/// with the extension domain Omega_j itself.
class XNorm {
 public:
  explicit XNorm(const potentials::PotentialSetup& setup);

  double operator()(const CauchyData& g) const;
  double stacked(const Eigen::VectorXcd& v) const;

 private:
  trace_norms::NormContext ctx_;
  int n_;
};

/// || (C^2 - 1/4) g ||_X / ||g||_X.
double calderon_projector_residual(const CauchyData& g, const CalderonMatrix& cmat,
                                   const XNorm& xnorm);

/// || (C - 1/2) g ||_X / ||g||_X; vanishes on interior Cauchy traces.
double calderon_half_residual(const CauchyData& g, const CalderonMatrix& cmat,
                              const XNorm& xnorm);

/// Interior Cauchy trace (gamma_D w, gamma_N w) on Gamma_j of a field on the
/// base mesh, extracted through the zero-extension to the crack mesh so the
/// Neumann part is the one-sided variational conormal trace.
CauchyData interior_cauchy_trace(const potentials::PotentialSetup& setup, const fem::Field& w);

/// Re <(C + T(s)) g, conj g> with T(s) the Garding smoother
///   <T(s) g, conj h> = 2 |s|^2 Int_{B_R} p_j (S g_N - D g_D) conj(S h_N - D h_D);
/// strictly positive for g != 0.
double garding_functional(potentials::PotentialSetup& setup, const CauchyData& g);

}  // namespace sie::calderon
