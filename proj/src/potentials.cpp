#include "sie/potentials.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <utility>

namespace sie::potentials {
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

const char* kind_name(DensityKind kind) {
  return kind == DensityKind::Dirichlet ? "Dirichlet" : "Neumann";
}

}  // namespace

std::vector<int> region_circles(const geo::Mesh& mesh, int region) {
  const int k = mesh.num_regions - 1;  // number of interface circles
  if (k < 1) throw ConfigError("region_circles: the mesh has no interface circles");
  if (region < 0 || region >= mesh.num_regions)
    throw ConfigError(
        fmt("region_circles: region %d outside [0, %d]", region, mesh.num_regions - 1));
  if (region == 0) return {k - 1};
  if (region == k) return {0};
  return {k - 1 - region, k - region};
}

PotentialSetup::PotentialSetup(const geo::Mesh& mesh, int region,
                               const fem::CoefficientField& coeff, const WaveContext& wave,
                               int mode_cutoff, Extension extension)
    : region_(region), wave_(wave), extension_(extension), coeff_(coeff),
      mode_cutoff_(mode_cutoff) {
  validate_wave(wave_);
  for (const geo::BEdge& e : mesh.boundary_edges)
    if (e.tag == geo::EdgeTag::Dirichlet || e.tag == geo::EdgeTag::Neumann)
      throw ConfigError(
          "potential setup expects a full-ball mesh; obstacle boundary edges present");
  circles_ = region_circles(mesh, region_);
  if (region_ >= static_cast<int>(coeff.regions.size()))
    throw ConfigError(fmt("potential setup: no coefficients for region %d", region_));

  p_ = coeff.regions[(size_t)region_].p;
  if (extension_ == Extension::Constant) {
    // Isotropy gate: the globally constant continuation of (A_j, p_j) is
    // realized as the unit-coefficient problem at the scaled wavenumber s_j,
    // which needs A_j = c_j I.
    const Eigen::Matrix2d& A = coeff.regions[(size_t)region_].A;
    c_ = A(0, 0);
    const double off = std::abs(A(0, 1)) + std::abs(A(1, 0));
    if (off > 1e-12 * c_ || std::abs(A(0, 0) - A(1, 1)) > 1e-12 * c_)
      throw ConfigError(
          fmt("potential setup: region %d needs an isotropic coefficient A = c I", region_));
    scaled_ = WaveContext{wave_.s * std::sqrt(p_ / c_), wave_.R};
    validate_wave(scaled_);
  } else {
    // Physical extension: the crack problems carry the coefficient field
    // itself, so conormal traces need no re-weighting.
    c_ = 1.0;
    scaled_ = wave_;
  }

  base_space_ = fem::make_fe_space(mesh);

  // Slit every circle of Gamma_j in turn.  Boundary polylines are untouched
  // by the slits, so interface_loop keeps working and every pair list refers
  // to node ids that stay valid in the final crack mesh.
  const int k = mesh.num_regions - 1;
  geo::Mesh cur = mesh;
  for (int iface : circles_) {
    geo::CrackMesh crack = geo::make_crack_mesh(cur, iface);
    const double sign = (region_ == k - iface) ? 1.0 : -1.0;  // +1: Omega_j inside the circle
    for (const auto& [orig, dup] : crack.pairs) {
      base_nodes_.push_back(orig);
      master_.push_back(orig);
      slave_.push_back(dup);
      side_sign_.push_back(sign);
      omega_nodes_.push_back(sign > 0.0 ? orig : dup);
      exterior_nodes_.push_back(sign > 0.0 ? dup : orig);
    }
    cur = std::move(crack.mesh);
  }
  crack_space_ = fem::make_fe_space(cur);

  // Tie map: every exterior copy follows its interior master.
  const int nc = crack_space_.num_vertices();
  reduced_index_.assign((size_t)nc, -1);
  int nr = 0;
  std::vector<char> is_slave((size_t)nc, 0);
  for (int v : slave_) is_slave[(size_t)v] = 1;
  for (int v = 0; v < nc; ++v)
    if (!is_slave[(size_t)v]) reduced_index_[(size_t)v] = nr++;
  for (size_t i = 0; i < slave_.size(); ++i)
    reduced_index_[(size_t)slave_[i]] = reduced_index_[(size_t)master_[i]];
  std::vector<Eigen::Triplet<cplx>> tt;
  tt.reserve((size_t)nc);
  for (int v = 0; v < nc; ++v) tt.emplace_back(v, reduced_index_[(size_t)v], cplx(1.0, 0.0));
  tie_.resize(nc, nr);
  tie_.setFromTriplets(tt.begin(), tt.end());

  fem::CoefficientField acoef = extension_ == Extension::Constant
                                    ? fem::constant_coefficients(cur.num_regions)
                                    : coeff_;
  dtn::DtnOperator op = dtn::make_dtn_operator(cur, scaled_, mode_cutoff_);
  crack_full_ = fem::assemble_l(crack_space_, acoef, scaled_, &op).full();

  // Stacked 1D P1 mass on the Gamma_j polylines (closed loops).
  const int n = num_nodes();
  std::vector<Eigen::Triplet<double>> tm;
  int base = 0;
  for (int iface : circles_) {
    std::vector<int> loop = geo::interface_loop(mesh, iface);
    const int nl = static_cast<int>(loop.size());
    for (int i = 0; i < nl; ++i) {
      int j = (i + 1) % nl;
      double len = geo::norm(mesh.vertices[(size_t)loop[(size_t)j]] -
                             mesh.vertices[(size_t)loop[(size_t)i]]);
      tm.emplace_back(base + i, base + i, len / 3.0);
      tm.emplace_back(base + j, base + j, len / 3.0);
      tm.emplace_back(base + i, base + j, len / 6.0);
      tm.emplace_back(base + j, base + i, len / 6.0);
    }
    base += nl;
  }
  gamma_mass_.resize(n, n);
  gamma_mass_.setFromTriplets(tm.begin(), tm.end());
  gamma_ldlt_.compute(gamma_mass_);
  if (gamma_ldlt_.info() != Eigen::Success)
    throw NumericError("interface mass factorization failed");
}

void PotentialSetup::check_density(const Density& g, DensityKind kind) const {
  if (g.region != region_)
    throw ConfigError(fmt("density region %d does not match setup region %d", g.region, region_));
  if (g.kind != kind)
    throw ConfigError(fmt("expected a %s density, got %s", kind_name(kind), kind_name(g.kind)));
  if (g.values.size() != num_nodes())
    throw ConfigError(fmt("density holds %d values, Gamma_%d has %d nodes",
                          static_cast<int>(g.values.size()), region_, num_nodes()));
}

void PotentialSetup::check_crack_field(const fem::Field& u) const {
  if (u.space != &crack_space_ || u.values.size() != crack_space_.num_vertices())
    throw ConfigError("field does not live on this setup's crack space");
}

fem::SystemMatrix& PotentialSetup::base_system() {
  if (!base_system_) {
    fem::CoefficientField acoef = extension_ == Extension::Constant
                                      ? fem::constant_coefficients(base_space_.mesh.num_regions)
                                      : coeff_;
    dtn::DtnOperator op = dtn::make_dtn_operator(base_space_.mesh, scaled_, mode_cutoff_);
    base_system_ = std::make_unique<fem::SystemMatrix>(
        fem::assemble_l(base_space_, acoef, scaled_, &op));
  }
  return *base_system_;
}

fem::SystemMatrix& PotentialSetup::conj_system() {
  if (!conj_system_) {
    WaveContext cw{std::conj(scaled_.s), scaled_.R};
    fem::CoefficientField acoef = extension_ == Extension::Constant
                                      ? fem::constant_coefficients(base_space_.mesh.num_regions)
                                      : coeff_;
    dtn::DtnOperator op = dtn::make_dtn_operator(base_space_.mesh, cw, mode_cutoff_);
    conj_system_ =
        std::make_unique<fem::SystemMatrix>(fem::assemble_l(base_space_, acoef, cw, &op));
  }
  return *conj_system_;
}

Eigen::VectorXcd PotentialSetup::mass_gamma_solve(const Eigen::VectorXcd& rhs) const {
  Eigen::VectorXd re = gamma_ldlt_.solve(rhs.real().eval());
  Eigen::VectorXd im = gamma_ldlt_.solve(rhs.imag().eval());
  return re + cplx(0.0, 1.0) * im;
}

Eigen::VectorXcd PotentialSetup::tied_solve(const Eigen::VectorXcd& load,
                                            const Eigen::VectorXcd& offsets) {
  if (!tied_lu_) {
    reduced_ = tie_.transpose() * crack_full_ * tie_;
    reduced_.makeCompressed();
    tied_lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
    tied_lu_->compute(reduced_);
    if (tied_lu_->info() != Eigen::Success)
      throw NumericError("tied crack system: singular factorization");
  }
  Eigen::VectorXcd b = tie_.transpose() * (load - crack_full_ * offsets).eval();
  Eigen::VectorXcd ur = tied_lu_->solve(b);
  double resid = (reduced_ * ur - b).norm();
  if (resid > 1e-9 * (b.norm() + 1e-300))
    throw NumericError(fmt("tied crack solve missed the residual contract: %.3e", resid));
  return tie_ * ur + offsets;
}

fem::Field PotentialSetup::single_layer_variational(const Density& g) {
  check_density(g, DensityKind::Neumann);
  Eigen::VectorXcd wg = apply_real(gamma_mass_, g.values / c_);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(base_space_.num_vertices());
  for (int i = 0; i < num_nodes(); ++i) rhs(base_nodes_[(size_t)i]) += wg(i);
  return fem::Field{&base_space_, base_system().solve(rhs)};
}

fem::Field PotentialSetup::single_layer(const Density& g) {
  check_density(g, DensityKind::Neumann);
  Eigen::VectorXcd wg = apply_real(gamma_mass_, g.values / c_);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(crack_space_.num_vertices());
  for (int i = 0; i < num_nodes(); ++i) load(master_[(size_t)i]) += wg(i);
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(crack_space_.num_vertices());
  return fem::Field{&crack_space_, tied_solve(load, zero)};
}

fem::Field PotentialSetup::double_layer(const Density& g) {
  check_density(g, DensityKind::Dirichlet);
  Eigen::VectorXcd offsets = Eigen::VectorXcd::Zero(crack_space_.num_vertices());
  for (int i = 0; i < num_nodes(); ++i)
    offsets(slave_[(size_t)i]) = side_sign_[(size_t)i] * g.values(i);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(crack_space_.num_vertices());
  return fem::Field{&crack_space_, tied_solve(load, offsets)};
}

Eigen::VectorXcd PotentialSetup::dirichlet_jump(const fem::Field& u) const {
  check_crack_field(u);
  Eigen::VectorXcd out(num_nodes());
  for (int i = 0; i < num_nodes(); ++i)
    out(i) = side_sign_[(size_t)i] *
             (u.values(master_[(size_t)i]) - u.values(slave_[(size_t)i]));
  return out;
}

Eigen::VectorXcd PotentialSetup::dirichlet_mean(const fem::Field& u) const {
  check_crack_field(u);
  Eigen::VectorXcd out(num_nodes());
  for (int i = 0; i < num_nodes(); ++i)
    out(i) = 0.5 * (u.values(master_[(size_t)i]) + u.values(slave_[(size_t)i]));
  return out;
}

Eigen::VectorXcd PotentialSetup::one_sided_residual(const fem::Field& u, bool omega_side) const {
  Eigen::VectorXcd r = crack_full_ * u.values;
  const std::vector<int>& side = omega_side ? omega_nodes_ : exterior_nodes_;
  Eigen::VectorXcd out(num_nodes());
  for (int i = 0; i < num_nodes(); ++i) out(i) = r(side[(size_t)i]);
  return out;
}

Eigen::VectorXcd PotentialSetup::neumann_jump(const fem::Field& u) const {
  check_crack_field(u);
  Eigen::VectorXcd weak = one_sided_residual(u, true) + one_sided_residual(u, false);
  return c_ * mass_gamma_solve(weak);
}

Eigen::VectorXcd PotentialSetup::neumann_mean(const fem::Field& u) const {
  check_crack_field(u);
  Eigen::VectorXcd weak = 0.5 * (one_sided_residual(u, true) - one_sided_residual(u, false));
  return c_ * mass_gamma_solve(weak);
}

Eigen::SparseMatrix<double> PotentialSetup::extension_mass() const {
  if (extension_ == Extension::Constant)
    return p_ * fem::mass_matrix(crack_space_);
  return fem::mass_matrix(crack_space_, coeff_);
}

double PotentialSetup::ultraweak_residual(const Density& g, const fem::Field& u, int trials,
                                          uint64_t seed) {
  check_density(g, DensityKind::Dirichlet);
  check_crack_field(u);
  if (trials < 1) throw ConfigError("ultraweak residual needs at least one trial");

  if (!crack_conj_built_) {
    WaveContext cw{std::conj(scaled_.s), scaled_.R};
    fem::CoefficientField acoef = extension_ == Extension::Constant
                                      ? fem::constant_coefficients(crack_space_.mesh.num_regions)
                                      : coeff_;
    dtn::DtnOperator op = dtn::make_dtn_operator(crack_space_.mesh, cw, mode_cutoff_);
    crack_conj_ = fem::assemble_l(crack_space_, acoef, cw, &op).full();
    crack_conj_built_ = true;
  }
  Eigen::SparseMatrix<double> mass_crack = fem::mass_matrix(crack_space_);
  const int nb = base_space_.num_vertices();
  const int nc = crack_space_.num_vertices();

  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    // Smooth random source: a short Fourier sum with O(1) wavevectors.
    std::vector<double> kx(4), ky(4);
    std::vector<cplx> amp(4);
    for (int j = 0; j < 4; ++j) {
      kx[(size_t)j] = rng.uniform(-2.0, 2.0);
      ky[(size_t)j] = rng.uniform(-2.0, 2.0);
      amp[(size_t)j] = rng.complex_unit();
    }
    auto source = [&](geo::Vec2 pos) {
      cplx v = 0.0;
      for (int j = 0; j < 4; ++j)
        v += amp[(size_t)j] *
             std::exp(cplx(0.0, kx[(size_t)j] * pos.x + ky[(size_t)j] * pos.y));
      return v;
    };
    Eigen::VectorXcd f_base(nb), f_crack(nc);
    for (int v = 0; v < nc; ++v) {
      cplx val = source(crack_space_.mesh.vertices[(size_t)v]);
      f_crack(v) = val;
      if (v < nb) f_base(v) = val;
    }

    // Dual field at the conjugated wavenumber, then its variational conormal
    // trace on the Omega_j side of Gamma_j (load moments subtracted).
    fem::Field v = fem::newton_potential(conj_system(), f_base);
    Eigen::VectorXcd v_crack(nc);
    v_crack.head(nb) = v.values;
    for (size_t i = 0; i < slave_.size(); ++i)
      v_crack(slave_[i]) = v.values(master_[i]);
    Eigen::VectorXcd moments = crack_conj_ * v_crack - apply_real(mass_crack, f_crack);
    Eigen::VectorXcd weak(num_nodes());
    for (int i = 0; i < num_nodes(); ++i) weak(i) = moments(omega_nodes_[(size_t)i]);

    // <u, L conj v> with L conj v committed to conj f, against <g, gamma_N conj v>.
    cplx val1 = c_ * f_crack.dot(apply_real(mass_crack, u.values));
    cplx val2 = c_ * weak.dot(g.values);
    double l2u = std::sqrt(std::abs(u.values.dot(apply_real(mass_crack, u.values))));
    double l2f = std::sqrt(std::abs(f_crack.dot(apply_real(mass_crack, f_crack))));
    double scale = std::abs(val1) + std::abs(val2) + c_ * l2u * l2f + 1e-300;
    worst = std::max(worst, std::abs(val1 - val2) / scale);
  }
  return worst;
}

fem::Field PotentialSetup::green_reconstruct(const fem::Field& u) {
  check_crack_field(u);
  Density gn{region_, DensityKind::Neumann, neumann_jump(u)};
  Density gd{region_, DensityKind::Dirichlet, dirichlet_jump(u)};
  fem::Field s = single_layer(gn);
  fem::Field d = double_layer(gd);
  return fem::Field{&crack_space_, s.values - d.values};
}

}  // namespace sie::potentials
