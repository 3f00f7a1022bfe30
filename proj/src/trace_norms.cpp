#include "sie/trace_norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "sie/fem.hpp"

namespace sie::trace_norms {
namespace {

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Eigen::VectorXcd apply_real(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXcd& x) {
  Eigen::VectorXd re = A * x.real().eval();
  Eigen::VectorXd im = A * x.imag().eval();
  return re + cplx(0.0, 1.0) * im;
}

double loop_radius(const geo::Mesh& mesh, const std::vector<int>& loop) {
  const int n = static_cast<int>(loop.size());
  if (n < 3) throw ConfigError(fmt("norm context: circle loop needs >= 3 nodes, got %d", n));
  for (int id : loop)
    if (id < 0 || id >= static_cast<int>(mesh.vertices.size()))
      throw ConfigError(fmt("norm context: loop vertex %d outside the mesh", id));
  double rho = 0.0;
  for (int id : loop) rho += geo::norm(mesh.vertices[(size_t)id]);
  rho /= n;
  for (int id : loop) {
    double r = geo::norm(mesh.vertices[(size_t)id]);
    if (std::abs(r - rho) > 1e-9 * rho)
      throw ConfigError(fmt("norm context: loop is not concentric, vertex %d at radius %.17g vs %.17g",
                            id, r, rho));
  }
  return rho;
}

}  // namespace

template <class Take>
void NormContext::init(const geo::Mesh& mesh, const std::vector<std::vector<int>>& loops,
                       Take take) {
  validate_wave(wave_);
  for (const std::vector<int>& loop : loops) {
    loop_radius(mesh, loop);
    nodes_.insert(nodes_.end(), loop.begin(), loop.end());
  }

  // extension submesh: the triangles the selector accepts
  geo::Mesh sub;
  sub.num_regions = 1;
  sub.h = mesh.h;
  std::vector<int> to_sub(mesh.vertices.size(), -1);
  for (const geo::Tri& t : mesh.triangles) {
    if (!take(t)) continue;
    geo::Tri st;
    st.region = 0;
    for (int k = 0; k < 3; ++k) {
      int v = t.v[k];
      if (to_sub[(size_t)v] < 0) {
        to_sub[(size_t)v] = static_cast<int>(sub.vertices.size());
        sub.vertices.push_back(mesh.vertices[(size_t)v]);
      }
      st.v[k] = to_sub[(size_t)v];
    }
    sub.triangles.push_back(st);
  }
  if (sub.triangles.empty())
    throw ConfigError("norm context: the requested extension domain holds no triangles");
  num_sub_ = static_cast<int>(sub.vertices.size());

  const int n = num_nodes();
  bnd_sub_.reserve((size_t)n);
  std::vector<char> is_bnd((size_t)num_sub_, 0);
  for (int id : nodes_) {
    int s = to_sub[(size_t)id];
    if (s < 0)
      throw ConfigError(
          fmt("norm context: loop vertex %d is not adjacent to the extension domain", id));
    bnd_sub_.push_back(s);
    is_bnd[(size_t)s] = 1;
  }
  for (int i = 0; i < num_sub_; ++i)
    if (!is_bnd[(size_t)i]) interior_sub_.push_back(i);

  // auxiliary operator -lap + |s|^2 with A = I: plain stiffness plus scaled mass
  fem::FeSpace space = fem::make_fe_space(sub);
  double s2 = std::norm(wave_.s);
  L_ = fem::stiffness_matrix(space);
  L_ += (s2 * fem::mass_matrix(space)).eval();

  const int ni = static_cast<int>(interior_sub_.size());
  std::vector<int> pos((size_t)num_sub_, -1);
  for (int i = 0; i < ni; ++i) pos[(size_t)interior_sub_[(size_t)i]] = i;
  std::vector<int> bpos((size_t)num_sub_, -1);
  for (int k = 0; k < n; ++k) bpos[(size_t)bnd_sub_[(size_t)k]] = k;

  std::vector<Eigen::Triplet<double>> tib;
  for (int col = 0; col < L_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(L_, col); it; ++it) {
      int r = static_cast<int>(it.row());
      int c = static_cast<int>(it.col());
      if (pos[(size_t)r] >= 0 && bpos[(size_t)c] >= 0)
        tib.emplace_back(pos[(size_t)r], bpos[(size_t)c], it.value());
    }
  L_ib_.resize(ni, n);
  L_ib_.setFromTriplets(tib.begin(), tib.end());

  std::vector<Eigen::Triplet<double>> tii;
  for (int col = 0; col < L_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(L_, col); it; ++it) {
      int r = pos[(size_t)it.row()];
      int c = pos[(size_t)it.col()];
      if (r >= 0 && c >= 0) tii.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<double> lii(ni, ni);
  lii.setFromTriplets(tii.begin(), tii.end());

  interior_ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  if (ni > 0) {
    interior_ldlt_->compute(lii);
    if (interior_ldlt_->info() != Eigen::Success)
      throw NumericError("norm context: interior extension factorization failed");
  }
  full_ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  full_ldlt_->compute(L_);
  if (full_ldlt_->info() != Eigen::Success)
    throw NumericError("norm context: Riesz factorization failed");

  // 1D P1 mass, one closed-loop block per circle
  std::vector<Eigen::Triplet<double>> tm;
  int off = 0;
  for (const std::vector<int>& loop : loops) {
    const int nl = static_cast<int>(loop.size());
    for (int k = 0; k < nl; ++k) {
      int a = loop[(size_t)k], b = loop[(size_t)((k + 1) % nl)];
      geo::Vec2 d{mesh.vertices[(size_t)b].x - mesh.vertices[(size_t)a].x,
                  mesh.vertices[(size_t)b].y - mesh.vertices[(size_t)a].y};
      double len = geo::norm(d);
      int i = off + k, j = off + (k + 1) % nl;
      tm.emplace_back(i, i, len / 3.0);
      tm.emplace_back(j, j, len / 3.0);
      tm.emplace_back(i, j, len / 6.0);
      tm.emplace_back(j, i, len / 6.0);
    }
    off += nl;
  }
  mass_gamma_.resize(n, n);
  mass_gamma_.setFromTriplets(tm.begin(), tm.end());
}

NormContext::NormContext(const geo::Mesh& mesh, const std::vector<int>& circle,
                         const WaveContext& wave, Side side)
    : wave_(wave) {
  const double rho = loop_radius(mesh, circle);
  auto take = [&](const geo::Tri& t) {
    geo::Vec2 c{(mesh.vertices[(size_t)t.v[0]].x + mesh.vertices[(size_t)t.v[1]].x +
                 mesh.vertices[(size_t)t.v[2]].x) / 3.0,
                (mesh.vertices[(size_t)t.v[0]].y + mesh.vertices[(size_t)t.v[1]].y +
                 mesh.vertices[(size_t)t.v[2]].y) / 3.0};
    double rc = geo::norm(c);
    return side == Side::Inner ? rc < rho : rc > rho;
  };
  init(mesh, {circle}, take);
}

NormContext::NormContext(const geo::Mesh& mesh, const std::vector<std::vector<int>>& loops,
                         int region, const WaveContext& wave)
    : wave_(wave) {
  if (region < 0 || region >= mesh.num_regions)
    throw ConfigError(fmt("norm context: region %d outside the mesh's %d regions", region,
                          mesh.num_regions));
  if (loops.empty()) throw ConfigError("norm context: no boundary loops given");
  init(mesh, loops, [&](const geo::Tri& t) { return t.region == region; });
}

void NormContext::check_size(const Eigen::VectorXcd& v, const char* what) const {
  if (v.size() != num_nodes())
    throw ConfigError(fmt("norm context: %s has %ld entries but the boundary has %d nodes", what,
                          (long)v.size(), num_nodes()));
}

Eigen::VectorXcd NormContext::solve_interior(const Eigen::VectorXcd& rhs) const {
  Eigen::VectorXd re = interior_ldlt_->solve(rhs.real().eval());
  Eigen::VectorXd im = interior_ldlt_->solve(rhs.imag().eval());
  return re + cplx(0.0, 1.0) * im;
}

Eigen::VectorXcd NormContext::solve_full(const Eigen::VectorXcd& rhs) const {
  Eigen::VectorXd re = full_ldlt_->solve(rhs.real().eval());
  Eigen::VectorXd im = full_ldlt_->solve(rhs.imag().eval());
  return re + cplx(0.0, 1.0) * im;
}

double NormContext::h_half_norm(const Eigen::VectorXcd& g) const {
  check_size(g, "trace");
  const int n = num_nodes(), ni = static_cast<int>(interior_sub_.size());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(num_sub_);
  for (int k = 0; k < n; ++k) v(bnd_sub_[(size_t)k]) = g(k);
  if (ni > 0) {
    Eigen::VectorXcd vi = solve_interior(-apply_real(L_ib_, g));
    for (int i = 0; i < ni; ++i) v(interior_sub_[(size_t)i]) = vi(i);
  }
  double e = std::real(v.dot(apply_real(L_, v)));
  return std::sqrt(std::max(0.0, e));
}

double NormContext::h_minus_half_norm(const Eigen::VectorXcd& h) const {
  check_size(h, "density");
  Eigen::VectorXcd load = apply_real(mass_gamma_, h);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(num_sub_);
  for (int k = 0; k < num_nodes(); ++k) b(bnd_sub_[(size_t)k]) = load(k);
  Eigen::VectorXcd w = solve_full(b);
  double e = std::real(w.dot(b));
  return std::sqrt(std::max(0.0, e));
}

Eigen::VectorXcd NormContext::riesz_trace(const Eigen::VectorXcd& h) const {
  check_size(h, "density");
  Eigen::VectorXcd load = apply_real(mass_gamma_, h);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(num_sub_);
  for (int k = 0; k < num_nodes(); ++k) b(bnd_sub_[(size_t)k]) = load(k);
  Eigen::VectorXcd w = solve_full(b);
  Eigen::VectorXcd g(num_nodes());
  for (int k = 0; k < num_nodes(); ++k) g(k) = w(bnd_sub_[(size_t)k]);
  return g;
}

cplx NormContext::pairing(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g) const {
  check_size(h, "density");
  check_size(g, "trace");
  return g.dot(apply_real(mass_gamma_, h));
}

double NormContext::x_norm(const CauchyData& cd) const {
  double d = h_half_norm(cd.dirichlet);
  double nn = h_minus_half_norm(cd.neumann);
  return std::sqrt(d * d + nn * nn);
}

double h_half_norm(const Eigen::VectorXcd& g, const NormContext& ctx) {
  return ctx.h_half_norm(g);
}

double h_minus_half_norm(const Eigen::VectorXcd& h, const NormContext& ctx) {
  return ctx.h_minus_half_norm(h);
}

double x_norm(const CauchyData& cd, const NormContext& ctx) { return ctx.x_norm(cd); }

double x_norm(const std::vector<CauchyData>& tuple, const std::vector<const NormContext*>& ctxs) {
  if (tuple.size() != ctxs.size())
    throw ConfigError(fmt("x_norm: %zu Cauchy pairs but %zu contexts", tuple.size(), ctxs.size()));
  double sq = 0.0;
  for (size_t i = 0; i < tuple.size(); ++i) {
    double v = ctxs[i]->x_norm(tuple[i]);
    sq += v * v;
  }
  return std::sqrt(sq);
}

}  // namespace sie::trace_norms
