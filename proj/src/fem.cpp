#include "sie/fem.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <unordered_map>

namespace sie::fem {
namespace {

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// Constant P1 shape gradients and the (positive) area of triangle t.
struct TriGeom {
  Eigen::Vector2d grad[3];
  double area;
};

TriGeom tri_geom(const geo::Mesh& mesh, const geo::Tri& t) {
  const geo::Vec2 a = mesh.vertices[t.v[0]];
  const geo::Vec2 b = mesh.vertices[t.v[1]];
  const geo::Vec2 c = mesh.vertices[t.v[2]];
  const double twice = geo::cross(b - a, c - a);
  TriGeom g;
  g.area = 0.5 * twice;
  // grad phi_a = rot90(c - b) / (2|T|), cyclically
  const geo::Vec2 e0 = c - b, e1 = a - c, e2 = b - a;
  g.grad[0] = Eigen::Vector2d(-e0.y, e0.x) / twice;
  g.grad[1] = Eigen::Vector2d(-e1.y, e1.x) / twice;
  g.grad[2] = Eigen::Vector2d(-e2.y, e2.x) / twice;
  return g;
}

const RegionCoefficients& region_of(const CoefficientField& coeff, int region) {
  if (region < 0 || region >= static_cast<int>(coeff.regions.size()))
    throw ConfigError(fmt("mesh region id %d has no entry among the %zu configured "
                          "coefficient regions (condition (C2))",
                          region, coeff.regions.size()));
  return coeff.regions[static_cast<size_t>(region)];
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_stiffness(Triplets& out, const geo::Mesh& mesh,
                   const std::function<Eigen::Matrix2d(int)>& a_of_region) {
  for (const geo::Tri& t : mesh.triangles) {
    const TriGeom g = tri_geom(mesh, t);
    const Eigen::Matrix2d A = a_of_region(t.region);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        out.emplace_back(t.v[i], t.v[k], g.area * g.grad[i].dot(A * g.grad[k]));
  }
}

void add_mass(Triplets& out, const geo::Mesh& mesh,
              const std::function<double(int)>& p_of_region) {
  for (const geo::Tri& t : mesh.triangles) {
    const double w = p_of_region(t.region) * tri_geom(mesh, t).area / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) out.emplace_back(t.v[i], t.v[k], w * (i == k ? 2.0 : 1.0));
  }
}

Eigen::SparseMatrix<double> from_triplets(int n, const Triplets& trip) {
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

// Complex P1 gradient of the field on triangle t.
Eigen::Vector2cd field_gradient(const geo::Mesh& mesh, const geo::Tri& t, const TriGeom& g,
                                const Eigen::VectorXcd& u) {
  Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
  for (int i = 0; i < 3; ++i) grad += u[t.v[i]] * g.grad[i].cast<cplx>();
  return grad;
}

std::uint64_t ukey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

CoefficientField make_coefficients(std::vector<RegionCoefficients> regions) {
  if (regions.empty()) throw ConfigError("coefficient field needs at least one region");
  CoefficientField field;
  field.a_min = field.p_min = std::numeric_limits<double>::max();
  field.a_max = field.p_max = 0.0;
  for (size_t j = 0; j < regions.size(); ++j) {
    const Eigen::Matrix2d& A = regions[j].A;
    const double p = regions[j].p;
    if (!A.allFinite() || std::abs(A(0, 1) - A(1, 0)) > 1e-12 * A.cwiseAbs().maxCoeff())
      throw ConfigError(fmt("region %zu: diffusion matrix is not symmetric "
                            "(condition (C2))",
                            j));
    // eigenvalues of a symmetric 2x2 matrix
    const double half_tr = 0.5 * (A(0, 0) + A(1, 1));
    const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
    const double lo = half_tr - disc, hi = half_tr + disc;
    if (!(lo > 0.0))
      throw ConfigError(fmt("region %zu: diffusion matrix has a nonpositive eigenvalue "
                            "%g; (C2) requires a positive-definite matrix",
                            j, lo));
    if (!(p > 0.0) || !std::isfinite(p))
      throw ConfigError(
          fmt("region %zu: reaction weight p = %g violates p > 0 (condition (C2))", j, p));
    field.a_min = std::min(field.a_min, lo);
    field.a_max = std::max(field.a_max, hi);
    field.p_min = std::min(field.p_min, p);
    field.p_max = std::max(field.p_max, p);
  }
  field.regions = std::move(regions);
  return field;
}

CoefficientField constant_coefficients(int num_regions) {
  return make_coefficients(
      std::vector<RegionCoefficients>(static_cast<size_t>(num_regions)));
}

FeSpace make_fe_space(const geo::Mesh& mesh) {
  FeSpace space;
  space.mesh = mesh;
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<char> constrained(static_cast<size_t>(n), 0);
  for (const geo::BEdge& e : mesh.boundary_edges)
    if (e.tag == geo::EdgeTag::Dirichlet) constrained[e.a] = constrained[e.b] = 1;

  space.free_index.assign(static_cast<size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (constrained[v]) {
      space.dirichlet.push_back(v);
    } else {
      space.free_index[v] = static_cast<int>(space.free_vertices.size());
      space.free_vertices.push_back(v);
    }
  }
  return space;
}

Eigen::SparseMatrix<double> mass_matrix(const FeSpace& space) {
  Triplets trip;
  add_mass(trip, space.mesh, [](int) { return 1.0; });
  return from_triplets(space.num_vertices(), trip);
}

Eigen::SparseMatrix<double> mass_matrix(const FeSpace& space, const CoefficientField& coeff) {
  Triplets trip;
  add_mass(trip, space.mesh, [&](int r) { return region_of(coeff, r).p; });
  return from_triplets(space.num_vertices(), trip);
}

Eigen::SparseMatrix<double> stiffness_matrix(const FeSpace& space) {
  Triplets trip;
  add_stiffness(trip, space.mesh, [](int) { return Eigen::Matrix2d::Identity().eval(); });
  return from_triplets(space.num_vertices(), trip);
}

Eigen::SparseMatrix<double> stiffness_matrix(const FeSpace& space,
                                             const CoefficientField& coeff) {
  Triplets trip;
  add_stiffness(trip, space.mesh, [&](int r) { return region_of(coeff, r).A; });
  return from_triplets(space.num_vertices(), trip);
}

SystemMatrix::SystemMatrix(const FeSpace& space, Eigen::SparseMatrix<cplx> full)
    : space_(&space), full_(std::move(full)) {
  const int nf = space.num_free(), nd = static_cast<int>(space.dirichlet.size());
  std::vector<int> dir_index(static_cast<size_t>(space.num_vertices()), -1);
  for (int i = 0; i < nd; ++i) dir_index[space.dirichlet[i]] = i;

  std::vector<Eigen::Triplet<cplx>> ff, fd;
  for (int col = 0; col < full_.outerSize(); ++col)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(full_, col); it; ++it) {
      const int i = space.free_index[it.row()];
      if (i < 0) continue;
      const int k = space.free_index[it.col()];
      if (k >= 0)
        ff.emplace_back(i, k, it.value());
      else
        fd.emplace_back(i, dir_index[it.col()], it.value());
    }
  free_.resize(nf, nf);
  free_.setFromTriplets(ff.begin(), ff.end());
  free_.makeCompressed();
  coupling_.resize(nf, nd);
  coupling_.setFromTriplets(fd.begin(), fd.end());
  coupling_.makeCompressed();
}

void SystemMatrix::ensure_factorized() {
  if (lu_) return;
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
  lu_->compute(free_);
  if (lu_->info() != Eigen::Success) {
    std::string detail = lu_->lastErrorMessage();
    lu_.reset();
    throw NumericError("sparse factorization failed (numerically singular system): " + detail);
  }
}

Eigen::VectorXcd SystemMatrix::solve(const Eigen::VectorXcd& rhs) {
  return solve_lifted(rhs, Eigen::VectorXcd::Zero(space_->num_vertices()));
}

Eigen::VectorXcd SystemMatrix::solve_lifted(const Eigen::VectorXcd& rhs,
                                            const Eigen::VectorXcd& dirichlet_values) {
  ensure_factorized();
  const FeSpace& sp = *space_;
  const int nf = sp.num_free(), nd = static_cast<int>(sp.dirichlet.size());

  Eigen::VectorXcd bf(nf), ud(nd);
  for (int i = 0; i < nf; ++i) bf[i] = rhs[sp.free_vertices[i]];
  for (int i = 0; i < nd; ++i) ud[i] = dirichlet_values[sp.dirichlet[i]];
  if (nd > 0) bf -= coupling_ * ud;

  const Eigen::VectorXcd uf = lu_->solve(bf);
  if (lu_->info() != Eigen::Success)
    throw NumericError("sparse triangular solve failed after successful factorization");
  const double resid = (free_ * uf - bf).norm();
  if (resid > 1e-10 * bf.norm() + 1e-300)
    throw NumericError(fmt("solve missed the residual contract: |L u - b| = %g vs |b| = %g",
                           resid, bf.norm()));

  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(sp.num_vertices());
  for (int i = 0; i < nf; ++i) u[sp.free_vertices[i]] = uf[i];
  for (int i = 0; i < nd; ++i) u[sp.dirichlet[i]] = ud[i];
  return u;
}

SystemMatrix assemble_l(const FeSpace& space, const CoefficientField& coeff,
                        const WaveContext& wave, const dtn::DtnOperator* dtn_op) {
  const int n = space.num_vertices();
  for (const geo::Tri& t : space.mesh.triangles) (void)region_of(coeff, t.region);

  if (dtn_op != nullptr) {
    if (dtn_op->wave.s != wave.s || dtn_op->wave.R != wave.R)
      throw ConfigError("assemble_l: the DtN operator was built for a different wave context");
    const RegionCoefficients& outer = region_of(coeff, 0);
    if ((outer.A - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(outer.p - 1.0) > 1e-12)
      throw ConfigError(
          "condition (C3) requires A = I and p = 1 in region 0, the band touching the "
          "truncation boundary S_R");
  }

  const Eigen::SparseMatrix<double> K = stiffness_matrix(space, coeff);
  const Eigen::SparseMatrix<double> M = mass_matrix(space, coeff);
  const cplx s2 = wave.s * wave.s;

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<size_t>(K.nonZeros() + M.nonZeros()));
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it)
      trip.emplace_back(it.row(), it.col(), cplx(it.value(), 0.0));
  for (int col = 0; col < M.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, col); it; ++it)
      trip.emplace_back(it.row(), it.col(), s2 * it.value());

  if (dtn_op != nullptr) {
    const Eigen::MatrixXcd B = dtn::assemble_dtn_form(*dtn_op);
    const int nb = dtn_op->num_nodes();
    for (int i = 0; i < nb; ++i)
      for (int k = 0; k < nb; ++k)
        trip.emplace_back(dtn_op->nodes[i], dtn_op->nodes[k], -B(i, k));
  }

  Eigen::SparseMatrix<cplx> full(n, n);
  full.setFromTriplets(trip.begin(), trip.end());
  full.makeCompressed();
  return SystemMatrix(space, std::move(full));
}

Field newton_potential(SystemMatrix& matrix, const Eigen::VectorXcd& f_nodal) {
  const Eigen::SparseMatrix<double> M = mass_matrix(matrix.space());
  return solve_newton(matrix, M.cast<cplx>() * f_nodal);
}

Field solve_newton(SystemMatrix& matrix, const Eigen::VectorXcd& rhs) {
  return Field{&matrix.space(), matrix.solve(rhs)};
}

FieldNorms norms(const Field& field, const WaveContext& wave, const CoefficientField& coeff) {
  const FeSpace& sp = *field.space;
  const Eigen::VectorXcd& u = field.values;
  const double s_abs2 = std::norm(wave.s);

  double l2_sq = 0.0, grad_sq = 0.0, flux_sq = 0.0;
  for (const geo::Tri& t : sp.mesh.triangles) {
    const TriGeom g = tri_geom(sp.mesh, t);
    const RegionCoefficients& rc = region_of(coeff, t.region);
    cplx sum = 0.0;
    double diag = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += u[t.v[i]];
      diag += std::norm(u[t.v[i]]);
    }
    // exact P1 quadrature: Int |u|^2 = |T|/12 (sum_i |u_i|^2 + |sum_i u_i|^2)
    l2_sq += g.area / 12.0 * (diag + std::norm(sum));
    const Eigen::Vector2cd grad = field_gradient(sp.mesh, t, g, u);
    grad_sq += g.area * grad.squaredNorm();
    flux_sq += g.area * (rc.A.cast<cplx>() * grad).squaredNorm();
  }

  FieldNorms out;
  out.l2 = std::sqrt(l2_sq);
  out.h1_s = std::sqrt(grad_sq + s_abs2 * l2_sq);
  const StrongResidual strong = apply_L_strong(field, coeff, wave);
  out.hdiv_s = std::sqrt(flux_sq + strong.flux_jump * strong.flux_jump / s_abs2);
  out.v_norm = std::sqrt(out.h1_s * out.h1_s + out.hdiv_s * out.hdiv_s);
  return out;
}

StrongResidual apply_L_strong(const Field& field, const CoefficientField& coeff,
                              const WaveContext& wave) {
  const geo::Mesh& mesh = field.space->mesh;
  const Eigen::VectorXcd& u = field.values;

  // elementwise fluxes A grad u and the L2 bulk term
  std::vector<Eigen::Vector2cd> flux(mesh.triangles.size());
  double bulk_sq = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const geo::Tri& tri = mesh.triangles[t];
    const TriGeom g = tri_geom(mesh, tri);
    const RegionCoefficients& rc = region_of(coeff, tri.region);
    flux[t] = rc.A.cast<cplx>() * field_gradient(mesh, tri, g, u);
    cplx sum = 0.0;
    double diag = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += u[tri.v[i]];
      diag += std::norm(u[tri.v[i]]);
    }
    bulk_sq += rc.p * rc.p * g.area / 12.0 * (diag + std::norm(sum));
  }

  // interior edges: two adjacent triangles each
  std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
  edges.reserve(3 * mesh.triangles.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t key =
          ukey(mesh.triangles[t].v[e], mesh.triangles[t].v[(e + 1) % 3]);
      auto [it, fresh] = edges.emplace(key, std::pair<int, int>{static_cast<int>(t), -1});
      if (!fresh) it->second.second = static_cast<int>(t);
    }

  double jump_sq = 0.0;
  for (const auto& [key, pair] : edges) {
    if (pair.second < 0) continue;  // boundary or crack edge
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    const geo::Vec2 d = mesh.vertices[b] - mesh.vertices[a];
    const double len = geo::norm(d);
    const Eigen::Vector2cd diff = flux[pair.first] - flux[pair.second];
    const cplx jump = diff[0] * cplx(d.y, 0.0) / len - diff[1] * cplx(d.x, 0.0) / len;
    jump_sq += len * len * std::norm(jump);  // h_e * Int_e |jump|^2
  }

  StrongResidual out;
  out.flux_jump = std::sqrt(jump_sq);
  out.l2_bulk = std::norm(wave.s) * std::sqrt(bulk_sq);
  return out;
}

double v_membership_residual(const Field& field, const dtn::DtnOperator& op,
                             const CoefficientField& coeff) {
  const geo::Mesh& mesh = field.space->mesh;
  const Eigen::VectorXcd& u = field.values;
  const int M = op.mode_cutoff;
  const double R = op.wave.R;

  // DtN applied to the Dirichlet trace, mode-wise
  Eigen::VectorXcd g(op.num_nodes());
  for (int i = 0; i < op.num_nodes(); ++i) g[i] = u[op.nodes[i]];
  const Eigen::VectorXcd dg = dtn::apply_dtn_modes(op, dtn::trace_modes(op, g));

  // raw Neumann trace A grad u . n on outer edges, transformed mode-wise
  std::unordered_map<std::uint64_t, int> tri_of_edge;
  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int e = 0; e < 3; ++e)
      tri_of_edge.emplace(ukey(mesh.triangles[t].v[e], mesh.triangles[t].v[(e + 1) % 3]),
                          static_cast<int>(t));

  Eigen::VectorXcd lambda = Eigen::VectorXcd::Zero(2 * M + 1);
  for (const geo::BEdge& e : mesh.boundary_edges) {
    if (e.tag != geo::EdgeTag::Outer) continue;
    const auto it = tri_of_edge.find(ukey(e.a, e.b));
    const geo::Tri& tri = mesh.triangles[static_cast<size_t>(it->second)];
    const TriGeom tg = tri_geom(mesh, tri);
    const Eigen::Vector2cd q =
        region_of(coeff, tri.region).A.cast<cplx>() * field_gradient(mesh, tri, tg, u);
    const geo::Vec2 pa = mesh.vertices[e.a], pb = mesh.vertices[e.b];
    const geo::Vec2 tangent = pb - pa;
    const double len = geo::norm(tangent);
    // boundary edges run CCW, so the outward normal is the tangent rotated -90
    const cplx qn = (q[0] * tangent.y - q[1] * tangent.x) / len;

    double ta = std::atan2(pa.y, pa.x);
    double tb = std::atan2(pb.y, pb.x);
    if (tb <= ta) tb += 2.0 * kPi;
    for (int m = -M; m <= M; ++m) {
      cplx seg;
      if (m == 0) {
        seg = tb - ta;
      } else {
        const cplx im(0.0, static_cast<double>(m));
        seg = (std::exp(-im * ta) - std::exp(-im * tb)) / im;
      }
      lambda[m + M] += qn * seg / (2.0 * kPi);
    }
  }

  // H^{-1/2}-weighted mode-wise distance
  double acc = 0.0;
  const double s_abs2 = std::norm(op.wave.s);
  for (int m = -M; m <= M; ++m) {
    const double w = 1.0 / std::sqrt(s_abs2 + (m / R) * (m / R));
    acc += w * std::norm(lambda[m + M] - dg[m + M]);
  }
  return std::sqrt(2.0 * kPi * R * acc);
}

}  // namespace sie::fem
