#include "sie/calderon.hpp"

#include <cstdarg>
#include <cstdio>
#include <utility>
#include <vector>

#include "sie/geometry.hpp"

namespace sie::calderon {
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

void check_datum(const potentials::PotentialSetup& setup, const CauchyData& g) {
  if (g.dirichlet.kind != potentials::DensityKind::Dirichlet ||
      g.neumann.kind != potentials::DensityKind::Neumann)
    throw ConfigError("Cauchy datum must pair a Dirichlet with a Neumann density");
  if (g.dirichlet.region != setup.region() || g.neumann.region != setup.region())
    throw ConfigError(fmt("Cauchy datum on Gamma_%d does not match setup region %d",
                          g.dirichlet.region, setup.region()));
  if (g.dirichlet.values.size() != setup.num_nodes() ||
      g.neumann.values.size() != setup.num_nodes())
    throw ConfigError("Cauchy datum size does not match the boundary node count");
}

/// Bilinear boundary pairing Int_Gamma a b via the interface mass matrix.
cplx bilinear(const Eigen::SparseMatrix<double>& mass, const Eigen::VectorXcd& a,
              const Eigen::VectorXcd& b) {
  return (a.transpose() * apply_real(mass, b))(0, 0);
}

/// Combined potential field u = S g_N - D g_D on the crack space.
fem::Field combined_field(potentials::PotentialSetup& setup, const CauchyData& g) {
  fem::Field s = setup.single_layer(g.neumann);
  fem::Field d = setup.double_layer(g.dirichlet);
  return fem::Field{&setup.crack_space(), s.values - d.values};
}

}  // namespace

CauchyData make_cauchy(int region, Eigen::VectorXcd dirichlet, Eigen::VectorXcd neumann) {
  CauchyData g;
  g.dirichlet = potentials::Density{region, potentials::DensityKind::Dirichlet,
                                    std::move(dirichlet)};
  g.neumann = potentials::Density{region, potentials::DensityKind::Neumann, std::move(neumann)};
  return g;
}

Eigen::VectorXcd stack(const CauchyData& g) {
  if (g.dirichlet.values.size() != g.neumann.values.size())
    throw ConfigError("Cauchy datum components differ in size");
  Eigen::VectorXcd out(2 * g.dirichlet.values.size());
  out << g.dirichlet.values, g.neumann.values;
  return out;
}

CauchyData unstack(int region, const Eigen::VectorXcd& stacked) {
  if (stacked.size() % 2 != 0) throw ConfigError("stacked Cauchy vector has odd length");
  const Eigen::Index n = stacked.size() / 2;
  return make_cauchy(region, stacked.head(n), stacked.tail(n));
}

potentials::Density apply_V(potentials::PotentialSetup& setup, const potentials::Density& g_n) {
  fem::Field u = setup.single_layer(g_n);
  return potentials::Density{setup.region(), potentials::DensityKind::Dirichlet,
                             setup.dirichlet_mean(u)};
}

potentials::Density apply_K(potentials::PotentialSetup& setup, const potentials::Density& g_d) {
  fem::Field u = setup.double_layer(g_d);
  return potentials::Density{setup.region(), potentials::DensityKind::Dirichlet,
                             setup.dirichlet_mean(u)};
}

potentials::Density apply_Kdual(potentials::PotentialSetup& setup,
                                const potentials::Density& g_n) {
  fem::Field u = setup.single_layer(g_n);
  return potentials::Density{setup.region(), potentials::DensityKind::Neumann,
                             setup.neumann_mean(u)};
}

potentials::Density apply_W(potentials::PotentialSetup& setup, const potentials::Density& g_d) {
  fem::Field u = setup.double_layer(g_d);
  return potentials::Density{setup.region(), potentials::DensityKind::Neumann,
                             setup.neumann_mean(u)};
}

CalderonMatrix assemble_calderon(potentials::PotentialSetup& setup) {
  const int n = setup.num_nodes();
  CalderonMatrix cm;
  cm.region = setup.region();
  cm.wave = setup.wave();
  cm.V.resize(n, n);
  cm.K.resize(n, n);
  cm.Kdual.resize(n, n);
  cm.W.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(i) = 1.0;
    potentials::Density gd{setup.region(), potentials::DensityKind::Dirichlet, e};
    fem::Field ud = setup.double_layer(gd);
    cm.K.col(i) = setup.dirichlet_mean(ud);
    cm.W.col(i) = setup.neumann_mean(ud);
    potentials::Density gn{setup.region(), potentials::DensityKind::Neumann, e};
    fem::Field us = setup.single_layer(gn);
    cm.V.col(i) = setup.dirichlet_mean(us);
    cm.Kdual.col(i) = setup.neumann_mean(us);
  }
  cm.C.resize(2 * n, 2 * n);
  cm.C << -cm.K, cm.V, -cm.W, cm.Kdual;
  return cm;
}

cplx dual_pairing(const potentials::PotentialSetup& setup, const CauchyData& g,
                  const CauchyData& h) {
  check_datum(setup, g);
  check_datum(setup, h);
  const Eigen::SparseMatrix<double>& mass = setup.gamma_mass();
  return bilinear(mass, g.dirichlet.values, h.neumann.values) +
         bilinear(mass, h.dirichlet.values, g.neumann.values);
}

XNorm::XNorm(const potentials::PotentialSetup& setup)
    : ctx_([&] {
        std::vector<std::vector<int>> loops;
        for (int iface : setup.circles())
          loops.push_back(geo::interface_loop(setup.base_space().mesh, iface));
        return trace_norms::NormContext(setup.base_space().mesh, loops, setup.region(),
                                        setup.wave());
      }()),
      n_(setup.num_nodes()) {}

double XNorm::operator()(const CauchyData& g) const {
  return ctx_.x_norm(trace_norms::CauchyData{g.dirichlet.values, g.neumann.values});
}

double XNorm::stacked(const Eigen::VectorXcd& v) const {
  if (v.size() != 2 * n_) throw ConfigError("stacked Cauchy vector size mismatch");
  return ctx_.x_norm(trace_norms::CauchyData{v.head(n_), v.tail(n_)});
}

double calderon_projector_residual(const CauchyData& g, const CalderonMatrix& cmat,
                                   const XNorm& xnorm) {
  Eigen::VectorXcd x = stack(g);
  Eigen::VectorXcd r = cmat.apply(cmat.apply(x)) - 0.25 * x;
  return xnorm.stacked(r) / xnorm.stacked(x);
}

double calderon_half_residual(const CauchyData& g, const CalderonMatrix& cmat,
                              const XNorm& xnorm) {
  Eigen::VectorXcd x = stack(g);
  Eigen::VectorXcd r = cmat.apply(x) - 0.5 * x;
  return xnorm.stacked(r) / xnorm.stacked(x);
}

CauchyData interior_cauchy_trace(const potentials::PotentialSetup& setup, const fem::Field& w) {
  if (w.space != &setup.base_space())
    throw ConfigError("interior Cauchy trace expects a field on the setup's base space");
  const geo::Mesh& cm = setup.crack_space().mesh;
  const int nb = setup.base_space().num_vertices();
  const int nc = setup.crack_space().num_vertices();

  // duplicate id -> original id, to read base values on the copies
  std::vector<int> to_base(static_cast<size_t>(nc));
  for (int v = 0; v < nc; ++v) to_base[(size_t)v] = v < nb ? v : -1;
  for (int i = 0; i < setup.num_nodes(); ++i) {
    const int master = setup.base_nodes()[(size_t)i];
    const int omega = setup.omega_nodes()[(size_t)i];
    const int dup = omega == master ? setup.exterior_nodes()[(size_t)i] : omega;
    to_base[(size_t)dup] = master;
  }

  // zero-extension: w on the Omega_j-side triangles, zero elsewhere
  Eigen::VectorXcd u0 = Eigen::VectorXcd::Zero(nc);
  for (const geo::Tri& t : cm.triangles) {
    if (t.region != setup.region()) continue;
    for (int k = 0; k < 3; ++k) u0(t.v[k]) = w.values(to_base[(size_t)t.v[k]]);
  }
  fem::Field ext{&setup.crack_space(), u0};

  Eigen::VectorXcd gd(setup.num_nodes());
  for (int i = 0; i < setup.num_nodes(); ++i)
    gd(i) = w.values(setup.base_nodes()[(size_t)i]);
  return make_cauchy(setup.region(), gd, setup.neumann_jump(ext));
}

double garding_functional(potentials::PotentialSetup& setup, const CauchyData& g) {
  check_datum(setup, g);
  fem::Field u = combined_field(setup, g);
  CauchyData cg = make_cauchy(setup.region(), setup.dirichlet_mean(u), setup.neumann_mean(u));
  CauchyData gbar = make_cauchy(setup.region(), g.dirichlet.values.conjugate(),
                                g.neumann.values.conjugate());
  const cplx dual = dual_pairing(setup, cg, gbar);

  Eigen::SparseMatrix<double> mass = setup.extension_mass();
  const double l2sq = std::abs(u.values.dot(apply_real(mass, u.values)));
  const double smoother = 2.0 * std::norm(setup.wave().s) * l2sq;
  return dual.real() + smoother;
}

}  // namespace sie::calderon
