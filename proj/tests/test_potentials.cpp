#include "sie/potentials.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"
#include "sie/analytic.hpp"
#include "sie/common.hpp"
#include "sie/fem.hpp"
#include "sie/geometry.hpp"

using namespace sie;
using namespace sie::potentials;

namespace {

geo::Mesh ball_mesh(double R, std::vector<double> interfaces, double target_h) {
  geo::GeometrySpec spec;
  spec.truncation_radius = R;
  spec.interface_radii = std::move(interfaces);
  return geo::build_concentric_mesh(spec, target_h);
}

Eigen::VectorXcd random_vector(Rng& rng, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.complex_unit();
  return v;
}

Eigen::VectorXcd apply_real(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXcd& x) {
  Eigen::VectorXd re = A * x.real().eval();
  Eigen::VectorXd im = A * x.imag().eval();
  return re + cplx(0.0, 1.0) * im;
}

double node_theta(const geo::Mesh& mesh, int v) {
  return std::atan2(mesh.vertices[(size_t)v].y, mesh.vertices[(size_t)v].x);
}

/// Nodal density e^{i m theta} stacked over the setup's circles.
Density mode_density(const PotentialSetup& setup, DensityKind kind, int m) {
  Density g{setup.region(), kind, Eigen::VectorXcd(setup.num_nodes())};
  const geo::Mesh& mesh = setup.base_space().mesh;
  for (int i = 0; i < setup.num_nodes(); ++i)
    g.values(i) = std::exp(cplx(0.0, m * node_theta(mesh, setup.base_nodes()[(size_t)i])));
  return g;
}

/// Oracle region id per crack vertex: radius rule plus one-sided pinning of
/// the duplicated interface nodes (master copies sit inside their circle).
std::vector<int> oracle_regions(const PotentialSetup& setup, const analytic::RadialProblem& prob) {
  const geo::Mesh& cm = setup.crack_space().mesh;
  std::vector<int> reg(cm.vertices.size());
  for (size_t v = 0; v < cm.vertices.size(); ++v)
    reg[v] = prob.region_of(geo::norm(cm.vertices[v]));
  const int k = static_cast<int>(prob.interfaces.size());
  int pos = 0;
  for (int iface : setup.circles()) {
    const int nl = static_cast<int>(geo::interface_loop(setup.base_space().mesh, iface).size());
    for (int i = 0; i < nl; ++i, ++pos) {
      const int master = setup.base_nodes()[(size_t)pos];
      const int omega = setup.omega_nodes()[(size_t)pos];
      const int slave = omega == master ? setup.exterior_nodes()[(size_t)pos] : omega;
      reg[(size_t)master] = k - iface;
      reg[(size_t)slave] = k - iface - 1;
    }
  }
  return reg;
}

/// Superposed one-sided oracle values at every crack vertex.
Eigen::VectorXcd oracle_values(const PotentialSetup& setup, const analytic::RadialProblem& prob,
                               const std::vector<analytic::ModeCoefficients>& modes) {
  const geo::Mesh& cm = setup.crack_space().mesh;
  const std::vector<int> reg = oracle_regions(setup, prob);
  Eigen::VectorXcd out(cm.vertices.size());
  for (size_t v = 0; v < cm.vertices.size(); ++v) {
    const double r = geo::norm(cm.vertices[v]);
    const double th = node_theta(cm, static_cast<int>(v));
    cplx acc = 0.0;
    for (const auto& mode : modes)
      acc += analytic::radial_value(prob, mode, reg[v], r) * std::exp(cplx(0.0, mode.m * th));
    out(static_cast<Eigen::Index>(v)) = acc;
  }
  return out;
}

double rel_l2(const fem::FeSpace& space, const Eigen::VectorXcd& err, const Eigen::VectorXcd& ref) {
  Eigen::SparseMatrix<double> mass = fem::mass_matrix(space);
  const double e2 = std::abs(err.dot(apply_real(mass, err)));
  const double r2 = std::abs(ref.dot(apply_real(mass, ref)));
  return std::sqrt(e2 / r2);
}

int vertex_near(const geo::Mesh& mesh, double x, double y) {
  int best = 0;
  double dist = 1e300;
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const double d = geo::norm(mesh.vertices[v] - geo::Vec2{x, y});
    if (d < dist) {
      dist = d;
      best = static_cast<int>(v);
    }
  }
  return best;
}

double eoc(double coarse, double fine) { return std::log(coarse / fine) / std::log(2.0); }

}  // namespace

TEST_CASE("region_circles maps regions to their boundary circles") {
  geo::Mesh one = ball_mesh(2.0, {1.0}, 0.4);
  CHECK(region_circles(one, 0) == std::vector<int>{0});
  CHECK(region_circles(one, 1) == std::vector<int>{0});

  geo::Mesh two = ball_mesh(2.0, {0.8, 1.4}, 0.25);
  CHECK(region_circles(two, 0) == std::vector<int>{1});
  CHECK(region_circles(two, 1) == std::vector<int>{0, 1});
  CHECK(region_circles(two, 2) == std::vector<int>{0});

  CHECK_THROWS_AS(region_circles(two, 3), ConfigError);
  CHECK_THROWS_AS(region_circles(two, -1), ConfigError);
  geo::Mesh plain = ball_mesh(1.0, {}, 0.25);
  CHECK_THROWS_WITH_AS(region_circles(plain, 0), doctest::Contains("no interface circles"),
                       ConfigError);
}

TEST_CASE("construction and density plumbing reject invalid input") {
  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.4);
  WaveContext wave{cplx(1.0, 0.0), 2.0};
  fem::CoefficientField unit = fem::constant_coefficients(2);

  SUBCASE("anisotropic region coefficient") {
    fem::RegionCoefficients outer, inner;
    inner.A << 2.0, 0.0, 0.0, 0.5;
    fem::CoefficientField coeff = fem::make_coefficients({outer, inner});
    CHECK_THROWS_WITH_AS(PotentialSetup(mesh, 1, coeff, wave), doctest::Contains("isotropic"),
                         ConfigError);
    PotentialSetup ok(mesh, 0, coeff, wave);  // region 0 is isotropic
    CHECK(ok.conormal_weight() == doctest::Approx(1.0));
  }

  SUBCASE("obstacle meshes are rejected") {
    geo::GeometrySpec spec;
    spec.truncation_radius = 2.0;
    spec.interface_radii = {1.2};
    geo::Obstacle obs;
    obs.radius = 0.5;
    obs.arcs = {{0.0, 2.0 * kPi, geo::EdgeTag::Dirichlet}};
    spec.obstacle = obs;
    geo::Mesh holed = geo::build_concentric_mesh(spec, 0.3);
    CHECK_THROWS_WITH_AS(PotentialSetup(holed, 1, unit, wave), doctest::Contains("full-ball"),
                         ConfigError);
  }

  SUBCASE("wavenumber and coefficient bookkeeping") {
    CHECK_THROWS_AS(PotentialSetup(mesh, 1, unit, WaveContext{cplx(0.0, 0.0), 2.0}), ConfigError);
    CHECK_THROWS_AS(PotentialSetup(mesh, 1, fem::constant_coefficients(1), wave), ConfigError);
    CHECK_THROWS_AS(PotentialSetup(mesh, 2, unit, wave), ConfigError);
  }

  SUBCASE("density validation") {
    PotentialSetup setup(mesh, 1, unit, wave);
    Density g{1, DensityKind::Neumann, Eigen::VectorXcd::Zero(setup.num_nodes())};
    CHECK_NOTHROW(setup.single_layer(g));
    g.kind = DensityKind::Dirichlet;
    CHECK_THROWS_WITH_AS(setup.single_layer(g), doctest::Contains("Neumann"), ConfigError);
    CHECK_THROWS_WITH_AS(setup.single_layer_variational(g), doctest::Contains("Neumann"),
                         ConfigError);
    g.kind = DensityKind::Neumann;
    CHECK_THROWS_WITH_AS(setup.double_layer(g), doctest::Contains("Dirichlet"), ConfigError);
    g.region = 0;
    CHECK_THROWS_WITH_AS(setup.single_layer(g), doctest::Contains("region"), ConfigError);
    g.region = 1;
    g.values = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_WITH_AS(setup.single_layer(g), doctest::Contains("nodes"), ConfigError);
    fem::Field wrong{&setup.base_space(), Eigen::VectorXcd::Zero(setup.base_space().num_vertices())};
    CHECK_THROWS_AS(setup.dirichlet_jump(wrong), ConfigError);
  }
}

TEST_CASE("zero densities produce the zero field and zero traces") {
  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  WaveContext wave{cplx(1.1, 0.0), 2.0};
  fem::CoefficientField unit = fem::constant_coefficients(2);
  PotentialSetup setup(mesh, 1, unit, wave);
  Density g{1, DensityKind::Neumann, Eigen::VectorXcd::Zero(setup.num_nodes())};
  fem::Field s = setup.single_layer(g);
  CHECK(s.values.norm() == 0.0);
  Density h{1, DensityKind::Dirichlet, Eigen::VectorXcd::Zero(setup.num_nodes())};
  fem::Field d = setup.double_layer(h);
  CHECK(d.values.norm() == 0.0);
  CHECK(setup.dirichlet_jump(s).norm() == 0.0);
  CHECK(setup.neumann_jump(d).norm() == 0.0);
  CHECK(setup.single_layer_variational(g).values.norm() == 0.0);
}

TEST_CASE("the variational and crack routes to the single layer agree") {
  std::vector<WaveContext> waves = {WaveContext{cplx(1.1, 0.0), 2.0},
                                    WaveContext{cplx(0.0, 2.0), 2.0}};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});
  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  for (int level = 0; level < 2; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    for (const WaveContext& wave : waves) {
      PotentialSetup setup(mesh, 1, coeff, wave);
      Rng rng(2026 + level);
      Density g{1, DensityKind::Neumann, random_vector(rng, setup.num_nodes())};
      fem::Field via_crack = setup.single_layer(g);
      fem::Field via_form = setup.single_layer_variational(g);
      const int nb = setup.base_space().num_vertices();
      const double diff = (via_crack.values.head(nb) - via_form.values).norm();
      CHECK(diff <= 1e-9 * via_form.values.norm());
      // tied copies carry identical values
      Eigen::VectorXcd jump = setup.dirichlet_jump(via_crack);
      CHECK(jump.norm() == 0.0);
    }
  }
}

TEST_CASE("potential fields satisfy the defining jump relations at the nodes") {
  std::vector<WaveContext> waves = {WaveContext{cplx(1.2, 0.8), 2.0},
                                    WaveContext{cplx(0.0, 2.0), 2.0}};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});
  geo::Mesh mesh = geo::refine(ball_mesh(2.0, {1.0}, 0.35));
  for (const WaveContext& wave : waves) {
    PotentialSetup setup(mesh, 1, coeff, wave);
    Rng rng(77);
    Density gn{1, DensityKind::Neumann, random_vector(rng, setup.num_nodes())};
    Density gd{1, DensityKind::Dirichlet, random_vector(rng, setup.num_nodes())};

    fem::Field s = setup.single_layer(gn);
    CHECK(setup.dirichlet_jump(s).norm() == 0.0);
    Eigen::VectorXcd njump = setup.neumann_jump(s);
    CHECK((njump - gn.values).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + s.values.norm()));
    // the mean Dirichlet trace of the tied field is the field itself on Gamma
    Eigen::VectorXcd dmean = setup.dirichlet_mean(s);
    for (int i = 0; i < setup.num_nodes(); ++i)
      CHECK(std::abs(dmean(i) - s.values(setup.base_nodes()[(size_t)i])) <= 1e-14);

    fem::Field d = setup.double_layer(gd);
    Eigen::VectorXcd djump = setup.dirichlet_jump(d);
    CHECK((djump + gd.values).lpNorm<Eigen::Infinity>() <=
          1e-12 * (1.0 + d.values.lpNorm<Eigen::Infinity>()));
    CHECK(setup.neumann_jump(d).lpNorm<Eigen::Infinity>() <=
          1e-8 * (1.0 + d.values.norm() / mesh.h));
  }
}

TEST_CASE("mode-0 single layer reproduces the radial reference with L2 order 2") {
  const WaveContext wave{cplx(1.2, 0.8), 2.0};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  analytic::RadialProblem prob;
  prob.R = 2.0;
  prob.interfaces = {1.0};
  prob.c = {1.0, 1.0};
  prob.p = {1.0, 1.0};
  prob.s = wave.s * std::sqrt(1.5 / 2.0);
  analytic::ModeDrive drive;
  drive.interface = 0;
  drive.a = 0.0;
  drive.b = cplx(0.5, 0.0);  // g / c_j with g = 1
  std::vector<analytic::ModeCoefficients> modes = {analytic::mie_solve_mode(prob, 0, drive)};

  // one-sided reference values frozen from a 50-digit radial matching solve
  const cplx ref_inside(0.12508493207181615, -0.14624481581185034);    // u(0.5)
  const cplx ref_outside(0.061062463894705851, -0.090070283511402092);  // u(1.5)
  analytic::RadialProblem probe = prob;
  CHECK(std::abs(analytic::radial_value(probe, modes[0], 1, 0.5) - ref_inside) <=
        1e-13 * std::abs(ref_inside));
  CHECK(std::abs(analytic::radial_value(probe, modes[0], 0, 1.5) - ref_outside) <=
        1e-13 * std::abs(ref_outside));

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  std::vector<double> errs;
  cplx finest_near_half = 0.0;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    PotentialSetup setup(mesh, 1, coeff, wave);
    Density g{1, DensityKind::Neumann, Eigen::VectorXcd::Ones(setup.num_nodes())};
    fem::Field u = setup.single_layer(g);
    Eigen::VectorXcd ref = oracle_values(setup, prob, modes);
    errs.push_back(rel_l2(setup.crack_space(), u.values - ref, ref));
    finest_near_half = u.values(vertex_near(setup.crack_space().mesh, 0.5, 0.0));
  }
  CHECK(eoc(errs[0], errs[1]) > 1.6);
  CHECK(eoc(errs[1], errs[2]) > 1.6);
  CHECK(errs[2] < 0.01);
  CHECK(std::abs(finest_near_half - ref_inside) < 0.02 * std::abs(ref_inside));
}

TEST_CASE("mode-2 double layer reproduces the radial reference on both sides") {
  const WaveContext wave{cplx(0.0, 2.0), 2.0};  // imaginary axis branch
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  analytic::RadialProblem prob;
  prob.R = 2.0;
  prob.interfaces = {1.0};
  prob.c = {1.0, 1.0};
  prob.p = {1.0, 1.0};
  prob.s = wave.s * std::sqrt(1.5 / 2.0);
  analytic::ModeDrive drive;
  drive.interface = 0;
  drive.a = cplx(-1.0, 0.0);  // [u]_D = -g seen from inside the circle
  drive.b = 0.0;
  std::vector<analytic::ModeCoefficients> modes = {analytic::mie_solve_mode(prob, 2, drive)};

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  std::vector<double> errs;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    PotentialSetup setup(mesh, 1, coeff, wave);
    Density g = mode_density(setup, DensityKind::Dirichlet, 2);
    fem::Field u = setup.double_layer(g);
    Eigen::VectorXcd ref = oracle_values(setup, prob, modes);
    errs.push_back(rel_l2(setup.crack_space(), u.values - ref, ref));
  }
  CHECK(eoc(errs[0], errs[1]) > 1.6);
  CHECK(eoc(errs[1], errs[2]) > 1.6);
  CHECK(errs[2] < 0.01);
}

TEST_CASE("the owning region only flips orientation, not the potential problem") {
  // With unit coefficients on both sides the same circle carries Gamma_0 and
  // Gamma_1; S is orientation-free while D flips with the outward normal.
  geo::Mesh mesh = geo::refine(ball_mesh(2.0, {1.0}, 0.35));
  WaveContext wave{cplx(1.2, 0.8), 2.0};
  fem::CoefficientField unit = fem::constant_coefficients(2);
  PotentialSetup in_setup(mesh, 1, unit, wave);
  PotentialSetup out_setup(mesh, 0, unit, wave);
  REQUIRE(in_setup.num_nodes() == out_setup.num_nodes());

  Rng rng(99);
  Eigen::VectorXcd values = random_vector(rng, in_setup.num_nodes());
  Density gn_in{1, DensityKind::Neumann, values};
  Density gn_out{0, DensityKind::Neumann, values};
  fem::Field s_in = in_setup.single_layer(gn_in);
  fem::Field s_out = out_setup.single_layer(gn_out);
  CHECK((s_in.values - s_out.values).lpNorm<Eigen::Infinity>() <= 1e-13);

  Density gd_in{1, DensityKind::Dirichlet, values};
  Density gd_out{0, DensityKind::Dirichlet, values};
  fem::Field d_in = in_setup.double_layer(gd_in);
  fem::Field d_out = out_setup.double_layer(gd_out);
  CHECK((d_in.values + d_out.values).lpNorm<Eigen::Infinity>() <= 1e-13);

  // Neumann jumps recover the density under both orientations
  CHECK((in_setup.neumann_jump(s_in) - values).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((out_setup.neumann_jump(s_out) - values).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("a band region drives both of its circles") {
  const WaveContext wave{cplx(1.3, 0.0), 2.0};
  fem::RegionCoefficients outer, band, core;
  band.A = 1.7 * Eigen::Matrix2d::Identity();
  band.p = 0.9;
  fem::CoefficientField coeff = fem::make_coefficients({outer, band, core});

  analytic::RadialProblem prob;
  prob.R = 2.0;
  prob.interfaces = {0.8, 1.4};
  prob.c = {1.0, 1.0, 1.0};
  prob.p = {1.0, 1.0, 1.0};
  prob.s = wave.s * std::sqrt(0.9 / 1.7);
  analytic::ModeDrive inner_drive, outer_drive;
  inner_drive.interface = 0;
  inner_drive.b = cplx(1.0, 0.0) / 1.7;
  outer_drive.interface = 1;
  outer_drive.b = cplx(0.5, 0.0) / 1.7;
  std::vector<analytic::ModeCoefficients> modes = {
      analytic::mie_solve_mode(prob, 0, inner_drive),
      analytic::mie_solve_mode(prob, 0, outer_drive)};

  geo::Mesh mesh = geo::refine(geo::refine(ball_mesh(2.0, {0.8, 1.4}, 0.25)));
  PotentialSetup setup(mesh, 1, coeff, wave);
  const int n_inner = static_cast<int>(geo::interface_loop(mesh, 0).size());
  Density g{1, DensityKind::Neumann, Eigen::VectorXcd(setup.num_nodes())};
  g.values.head(n_inner).setConstant(cplx(1.0, 0.0));
  g.values.tail(setup.num_nodes() - n_inner).setConstant(cplx(0.5, 0.0));

  fem::Field u = setup.single_layer(g);
  Eigen::VectorXcd ref = oracle_values(setup, prob, modes);
  CHECK(rel_l2(setup.crack_space(), u.values - ref, ref) < 0.01);
  CHECK((setup.neumann_jump(u) - g.values).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(setup.dirichlet_jump(u).norm() == 0.0);
}

TEST_CASE("green reconstruction recombines a potential field exactly") {
  geo::Mesh mesh = geo::refine(ball_mesh(2.0, {1.0}, 0.35));
  WaveContext wave{cplx(1.2, 0.8), 2.0};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});
  PotentialSetup setup(mesh, 1, coeff, wave);

  Rng rng(4242);
  Density gn{1, DensityKind::Neumann, random_vector(rng, setup.num_nodes())};
  Density gd{1, DensityKind::Dirichlet, random_vector(rng, setup.num_nodes())};
  fem::Field s = setup.single_layer(gn);
  fem::Field d = setup.double_layer(gd);
  fem::Field u{&setup.crack_space(), s.values + d.values};
  fem::Field back = setup.green_reconstruct(u);
  CHECK((back.values - u.values).norm() <= 1e-8 * u.values.norm());
}

TEST_CASE("green reconstruction converges for an interpolated transmission field") {
  const WaveContext wave{cplx(1.2, 0.8), 2.0};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  analytic::RadialProblem prob;
  prob.R = 2.0;
  prob.interfaces = {1.0};
  prob.c = {1.0, 1.0};
  prob.p = {1.0, 1.0};
  prob.s = wave.s * std::sqrt(1.5 / 2.0);
  analytic::ModeDrive drive;
  drive.interface = 0;
  drive.a = cplx(-0.7, 0.3);
  drive.b = cplx(0.4, 0.1);
  std::vector<analytic::ModeCoefficients> modes = {analytic::mie_solve_mode(prob, 1, drive)};

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  std::vector<double> errs;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    PotentialSetup setup(mesh, 1, coeff, wave);
    fem::Field u{&setup.crack_space(), oracle_values(setup, prob, modes)};
    fem::Field back = setup.green_reconstruct(u);
    errs.push_back(rel_l2(setup.crack_space(), back.values - u.values, u.values));
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  CHECK(errs[0] / errs[1] > 1.7);
  CHECK(errs[1] / errs[2] > 1.7);
  CHECK(errs[2] < 0.02);
}

TEST_CASE("the ultraweak identity holds exactly for discrete double layer fields") {
  // For u = double_layer(g) the tested pairing is an algebraic identity of
  // the tied crack system (the dual field is tied and the assembled form at
  // the conjugated wavenumber is the conjugate matrix), so the residual sits
  // at solver precision on every mesh, not merely at O(h).
  std::vector<WaveContext> waves = {WaveContext{cplx(1.1, 0.0), 2.0},
                                    WaveContext{cplx(0.0, 2.0), 2.0}};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  for (int level = 0; level < 2; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    for (const WaveContext& wave : waves) {
      PotentialSetup setup(mesh, 1, coeff, wave);
      Density g = mode_density(setup, DensityKind::Dirichlet, 1);
      fem::Field u = setup.double_layer(g);
      CHECK(setup.ultraweak_residual(g, u, 3, 515) <= 1e-12);
    }
  }

  PotentialSetup setup(mesh, 1, coeff, waves[0]);
  Density g = mode_density(setup, DensityKind::Dirichlet, 1);
  fem::Field u = setup.double_layer(g);
  const double r = setup.ultraweak_residual(g, u, 3, 515);
  // deterministic in the seed, and exactly zero for the zero density
  CHECK(setup.ultraweak_residual(g, u, 3, 515) == r);
  CHECK(setup.ultraweak_residual(g, u, 3, 516) != r);
  Density zero{1, DensityKind::Dirichlet, Eigen::VectorXcd::Zero(setup.num_nodes())};
  fem::Field uz = setup.double_layer(zero);
  CHECK(setup.ultraweak_residual(zero, uz, 2, 1) == 0.0);
}

TEST_CASE("the ultraweak residual of an interpolated double layer decays with h") {
  const WaveContext wave{cplx(1.1, 0.0), 2.0};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  analytic::RadialProblem prob;
  prob.R = 2.0;
  prob.interfaces = {1.0};
  prob.c = {1.0, 1.0};
  prob.p = {1.0, 1.0};
  prob.s = wave.s * std::sqrt(1.5 / 2.0);
  analytic::ModeDrive drive;
  drive.interface = 0;
  drive.a = cplx(-1.0, 0.0);
  drive.b = 0.0;
  std::vector<analytic::ModeCoefficients> modes = {analytic::mie_solve_mode(prob, 1, drive)};

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  std::vector<double> resid;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    PotentialSetup setup(mesh, 1, coeff, wave);
    // nodal interpolant of the exact mode-1 double layer field and its density
    fem::Field u{&setup.crack_space(), oracle_values(setup, prob, modes)};
    Density g = mode_density(setup, DensityKind::Dirichlet, 1);
    resid.push_back(setup.ultraweak_residual(g, u, 3, 515));
  }
  CHECK(resid[1] < resid[0]);
  CHECK(resid[2] < resid[1]);
  CHECK(resid[0] / resid[2] > 3.0);
  CHECK(resid[2] < 0.01);
}

TEST_CASE("potential fields pass the strong-form and V-membership diagnostics") {
  const WaveContext wave{cplx(1.2, 0.8), 2.0};
  fem::RegionCoefficients outer, inner;
  inner.A = 2.0 * Eigen::Matrix2d::Identity();
  inner.p = 1.5;
  fem::CoefficientField coeff = fem::make_coefficients({outer, inner});

  geo::Mesh mesh = ball_mesh(2.0, {1.0}, 0.35);
  std::vector<double> fluxes, memberships;
  for (int level = 0; level < 3; ++level) {
    if (level > 0) mesh = geo::refine(mesh);
    PotentialSetup setup(mesh, 1, coeff, wave);
    Density g{1, DensityKind::Neumann, Eigen::VectorXcd::Ones(setup.num_nodes())};
    fem::Field u = setup.single_layer(g);
    fem::CoefficientField unit = fem::constant_coefficients(setup.crack_space().mesh.num_regions);
    fem::StrongResidual sr = fem::apply_L_strong(u, unit, setup.scaled_wave());
    fluxes.push_back(sr.flux_jump);
    dtn::DtnOperator op = dtn::make_dtn_operator(setup.crack_space().mesh, setup.scaled_wave());
    memberships.push_back(fem::v_membership_residual(u, op, unit));
  }
  CHECK(fluxes[1] < fluxes[0]);
  CHECK(fluxes[2] < fluxes[1]);
  CHECK(fluxes[0] / fluxes[2] > 3.0);
  CHECK(memberships[2] < 0.02);
}
