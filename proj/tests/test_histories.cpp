#include "support.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/histories/histories.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace reductcheck;
using testing::cplx;
using testing::Gen;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

ProjectorFamily z_family(Eigen::Index d)
{
  ProjectorFamily f;
  for (int s = 0; s < 2; ++s) {
    MatrixXcd p = MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < d / 2; ++i) p(s * d / 2 + i, s * d / 2 + i) = 1.0;
    f.operators.push_back(p);
    f.labels.push_back(s == 0 ? "up" : "down");
  }
  return f;
}

HistorySpec qubit(MatrixXcd h, VectorXcd chi0, int n, double dt = 1.0)
{
  HistorySpec s;
  s.space.hamiltonian = std::move(h);
  s.n_slices = n;
  s.dt = dt;
  s.families = {z_family(2)};
  s.chi0 = std::move(chi0);
  return s;
}

MatrixXcd sigma_x(double omega)
{
  MatrixXcd h(2, 2);
  h << 0.0, omega, omega, 0.0;
  return h;
}

VectorXcd plus_state()
{
  return VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
}

/// C_i built with the matrix exponential instead of the library propagator.
MatrixXcd oracle_operator(const HistorySpec& s, const HistoryIndex& idx)
{
  const MatrixXcd u = (cplx(0.0, -s.dt) * s.space.hamiltonian).exp();
  MatrixXcd c = MatrixXcd::Identity(s.space.dim(), s.space.dim());
  for (int k = 0; k < s.n_slices; ++k) c = s.family(k).operators[static_cast<std::size_t>(idx[k])] * u * c;
  return c;
}

HistorySpec random_spec(Gen& gen, int n)
{
  const Eigen::Index d = 4;
  HistorySpec s;
  s.space.hamiltonian = testing::random_hermitian(gen, d);
  s.n_slices = n;
  s.dt = gen.uniform(0.1, 1.0);
  // A random orthonormal basis split into rank-1 and rank-3 projectors per slice.
  for (int k = 0; k < n; ++k) {
    MatrixXcd a(d, d);
    for (auto& z : a.reshaped()) z = cplx(gen.normal(), gen.normal());
    const MatrixXcd q = Eigen::HouseholderQR<MatrixXcd>(a).householderQ();
    ProjectorFamily f;
    f.operators = {q.col(0) * q.col(0).adjoint(), q.rightCols(3) * q.rightCols(3).adjoint()};
    s.families.push_back(f);
  }
  s.chi0 = testing::random_unit(gen, d);
  return s;
}

/// System qubit plus a record register that copies each outcome, built
/// directly as a unitary; H = i log U by eigendecomposition.
HistorySpec record_spec(double theta, int n)
{
  const Eigen::Index env = Eigen::Index{1} << n;
  const Eigen::Index d = 2 * env;
  MatrixXcd rot = MatrixXcd::Zero(d, d);
  for (Eigen::Index e = 0; e < env; ++e) {
    rot(e, e) = rot(env + e, env + e) = std::cos(theta);
    rot(e, env + e) = rot(env + e, e) = cplx(0.0, -std::sin(theta));
  }
  MatrixXcd shift = MatrixXcd::Zero(d, d);
  for (Eigen::Index s = 0; s < 2; ++s) {
    for (Eigen::Index e = 0; e < env; ++e) {
      const Eigen::Index moved = (((e & 1) ^ s) << (n - 1)) | (e >> 1);
      shift(s * env + moved, s * env + e) = 1.0;
    }
  }
  const MatrixXcd u = shift * rot;
  Eigen::ComplexEigenSolver<MatrixXcd> eig(u);
  Eigen::VectorXcd logs(d);
  // Branch cut moved off -1, where the shift has eigenvalues.
  const double cut = 0.3;
  for (Eigen::Index j = 0; j < d; ++j) logs(j) = cplx(0.0, std::arg(eig.eigenvalues()(j) * std::polar(1.0, -cut)) + cut);
  MatrixXcd h = cplx(0.0, 1.0) * eig.eigenvectors() * logs.asDiagonal() * eig.eigenvectors().inverse();
  h = 0.5 * (h + h.adjoint()).eval();
  HistorySpec spec;
  spec.space.hamiltonian = h;
  spec.n_slices = n;
  spec.families = {z_family(d)};
  spec.chi0 = VectorXcd::Unit(d, 0);
  return spec;
}

} // namespace

TEST_CASE("history operators match a matrix-exponential oracle and sum to U^N")
{
  testing::for_all(61, 6, [](Gen& gen) {
    const HistorySpec s = random_spec(gen, gen.integer(1, 4));
    s.validate();
    const auto all = enumerate_histories(s);
    CHECK(all.size() == s.count());
    const MatrixXcd u = (cplx(0.0, -s.dt) * s.space.hamiltonian).exp();
    MatrixXcd sum = MatrixXcd::Zero(4, 4);
    for (const auto& idx : all) {
      const MatrixXcd c = history_operator(s, idx);
      CHECK((c - oracle_operator(s, idx)).cwiseAbs().maxCoeff() < 1e-12);
      sum += c;
    }
    MatrixXcd un = MatrixXcd::Identity(4, 4);
    for (int k = 0; k < s.n_slices; ++k) un = u * un;
    CHECK((sum - un).cwiseAbs().maxCoeff() < 1e-12);
  });
}

TEST_CASE("probabilities are nonnegative and sum to one")
{
  testing::for_all(62, 8, [](Gen& gen) {
    const HistorySpec s = random_spec(gen, gen.integer(1, 5));
    double total = 0.0;
    const auto d = decoherence_matrix(s);
    const auto all = enumerate_histories(s);
    for (std::size_t k = 0; k < all.size(); ++k) {
      const double p = history_probability(s, all[k]);
      CHECK(p >= 0.0);
      CHECK(std::abs(d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) - p) < 1e-14);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    // D is Hermitian and its entries sum to <chi0|chi0>.
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(d.sum() - 1.0) < 1e-12);
  });
}

TEST_CASE("enumeration order is lexicographic with slice 1 slowest")
{
  const auto s = qubit(MatrixXcd::Zero(2, 2), plus_state(), 2);
  const auto all = enumerate_histories(s);
  REQUIRE(all.size() == 4);
  CHECK(all[0] == HistoryIndex{0, 0});
  CHECK(all[1] == HistoryIndex{0, 1});
  CHECK(all[2] == HistoryIndex{1, 0});
  CHECK(all[3] == HistoryIndex{1, 1});
}

TEST_CASE("trivial dynamics: sigma_z histories of |+> decohere exactly")
{
  const auto s = qubit(MatrixXcd::Zero(2, 2), plus_state(), 3);
  const auto d = decoherence_matrix(s);
  // Only the constant histories 000 and 111 are realised, each with weight 1/2.
  CHECK(std::abs(d(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(d(7, 7) - 0.5) < 1e-14);
  double off = 0.0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (i != j) off = std::max(off, std::abs(d(i, j)));
    }
  }
  CHECK(off < 1e-14);
  CHECK(check_branching(s).holds);
}

TEST_CASE("sigma_x precession interferes, matching the oracle")
{
  const auto s = qubit(sigma_x(1.0), VectorXcd::Unit(2, 0), 3, 0.3);
  const auto all = enumerate_histories(s);
  double max_off = 0.0;
  for (const auto& i : all) {
    for (const auto& j : all) {
      const VectorXcd a = oracle_operator(s, i) * s.chi0;
      const VectorXcd b = oracle_operator(s, j) * s.chi0;
      const cplx want = b.dot(a);
      CHECK(std::abs(decoherence_functional(s, i, j) - want) < 1e-12);
      if (i != j) max_off = std::max(max_off, std::abs(want));
    }
  }
  CHECK(max_off > 0.01);
}

TEST_CASE("coarse-graining defect equals the interference inside each cell")
{
  testing::for_all(63, 6, [](Gen& gen) {
    const HistorySpec s = random_spec(gen, 3);
    const auto d = decoherence_matrix(s);
    const auto all = enumerate_histories(s);
    std::vector<std::size_t> cell_of(all.size());
    for (std::size_t k = 0; k < all.size(); ++k) cell_of[k] = static_cast<std::size_t>(all[k][0]);
    const auto cells = coarse_grain(s, cell_of);
    REQUIRE(cells.size() == 2);
    double total = 0.0;
    for (const auto& c : cells) {
      cplx cross = 0.0;
      double bound = 0.0;
      for (auto a : c.members) {
        for (auto b : c.members) {
          if (a == b) continue;
          cross += d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          bound += std::abs(d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
      }
      CHECK(std::abs(c.defect - std::abs(cross.real())) < 1e-12);
      CHECK(std::abs(c.cross_bound - bound) < 1e-12);
      CHECK(c.defect <= c.cross_bound + 1e-15);
      total += c.probability;
    }
    // Cells keyed on the first outcome are themselves a one-slice family.
    CHECK(std::abs(total - 1.0) < 1e-12);
  });
  const auto s = qubit(MatrixXcd::Zero(2, 2), plus_state(), 2);
  CHECK_THROWS_AS(coarse_grain(s, {0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(coarse_grain(s, {0, 0, 2, 2}), ConfigError);
}

TEST_CASE("transition weights")
{
  const MatrixXcd up = z_family(2).operators[0];
  const MatrixXcd down = z_family(2).operators[1];
  const auto still = qubit(MatrixXcd::Zero(2, 2), plus_state(), 2);
  CHECK(transition_weight(still, up, 1, up, 2) == doctest::Approx(1.0));
  CHECK(transition_weight(still, up, 1, down, 2) == doctest::Approx(0.0));
  const auto ground = qubit(MatrixXcd::Zero(2, 2), VectorXcd::Unit(2, 0), 2);
  CHECK(transition_weight(ground, down, 1, up, 2) == 0.0);
  // Under sigma_x precession |0> reaches |1> with weight sin^2(omega dt).
  const auto prec = qubit(sigma_x(1.0), VectorXcd::Unit(2, 0), 2, 0.4);
  CHECK(transition_weight(prec, up, 0, down, 1) == doctest::Approx(std::pow(std::sin(0.4), 2)).epsilon(1e-12));
  CHECK_THROWS_AS(transition_weight(prec, up, 1, up, 1), DomainError);
}

TEST_CASE("branching holds with records and fails under bare precession")
{
  const auto rec = record_spec(std::numbers::pi / 5.0, 3);
  rec.validate();
  CHECK(check_branching(rec).holds);
  // Records make every pair of distinct histories orthogonal.
  const auto d = decoherence_matrix(rec);
  double off = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (i != j) off = std::max(off, std::abs(d(i, j)));
    }
  }
  CHECK(off < 1e-12);

  const auto prec = qubit(sigma_x(1.0), VectorXcd::Unit(2, 0), 3, 0.3);
  const auto r = check_branching(prec);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->early_slice < r.witness->late_slice);
  CHECK(r.witness->early_a != r.witness->early_b);

  CHECK(check_branching(qubit(sigma_x(1.0), VectorXcd::Unit(2, 0), 1, 0.3)).holds);
}

TEST_CASE("configuration-space witness for the +/- family")
{
  HistorySpec s;
  s.space.hamiltonian = MatrixXcd::Zero(2, 2);
  s.space.position_basis = MatrixXcd::Identity(2, 2);
  s.n_slices = 1;
  VectorXcd p = plus_state();
  VectorXcd m(2);
  m << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  s.families = {ProjectorFamily{FamilyKind::pvm, {p * p.adjoint(), m * m.adjoint()}, {"plus", "minus"}}};
  s.chi0 = VectorXcd::Unit(2, 0);
  CHECK(std::abs(decoherence_functional(s, {0}, {1})) < 1e-15);
  CHECK(config_decoherence_functional(s, {0}, {1}, true) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(config_decoherence_functional(s, {0}, {1}) == doctest::Approx(0.25).epsilon(1e-14));
  HistorySpec blind = s;
  blind.space.position_basis.reset();
  CHECK_THROWS_AS(config_decoherence_functional(blind, {0}, {1}), DomainError);
}

TEST_CASE("family validation: PVMs and an overcomplete coherent-like POVM")
{
  const auto z = validate_family(z_family(2));
  CHECK(z.valid);
  CHECK(z.pvm);
  CHECK(z.povm);

  // Sixteen discrete Gaussians on an 8-site ring, symmetrically normalized by
  // the frame operator so the effects sum to the identity.
  const Eigen::Index d = 8;
  std::vector<VectorXcd> v;
  for (int k = 0; k < 16; ++k) {
    VectorXcd g(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      double u = static_cast<double>(j) - 0.5 * k;
      u -= d * std::round(u / d);
      g(j) = std::polar(std::exp(-u * u / 2.0), 0.7 * k * j);
    }
    v.push_back(g);
  }
  MatrixXcd frame = MatrixXcd::Zero(d, d);
  for (const auto& g : v) frame += g * g.adjoint();
  const MatrixXcd s = Eigen::SelfAdjointEigenSolver<MatrixXcd>(frame).operatorInverseSqrt();
  ProjectorFamily povm;
  povm.kind = FamilyKind::povm;
  for (const auto& g : v) povm.operators.push_back(s * g * g.adjoint() * s);
  const auto r = validate_family(povm);
  CHECK(r.valid);
  CHECK(r.povm);
  CHECK_FALSE(r.pvm);
  CHECK(r.completeness < 1e-12);
  CHECK(r.min_eigenvalue > -1e-12);
  povm.kind = FamilyKind::pvm;
  CHECK_FALSE(validate_family(povm).valid);

  ProjectorFamily broken = z_family(2);
  broken.operators[1] *= 0.5;
  const auto b = validate_family(broken);
  CHECK_FALSE(b.valid);
  CHECK(b.completeness > 0.1);
}

TEST_CASE("spec validation")
{
  auto s = qubit(MatrixXcd::Zero(2, 2), plus_state(), 2);
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.chi0 *= 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.space.hamiltonian(0, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.n_slices = 13;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.families = {z_family(2), z_family(2), z_family(2)};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(history_operator(s, {0, 2}), DomainError);
}
