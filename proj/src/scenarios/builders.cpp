#include "builders.hpp"

#include "reductcheck/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

namespace reductcheck::scenarios::detail {

namespace {

using Eigen::MatrixXcd;
using cplx = std::complex<double>;

/// Hermitian H with exp(-i H dt) = u, from the Schur form of the unitary.
MatrixXcd hamiltonian_of(const MatrixXcd& u, double dt)
{
  Eigen::ComplexSchur<MatrixXcd> schur(u);
  const MatrixXcd& q = schur.matrixU();
  const MatrixXcd& t = schur.matrixT();
  Eigen::VectorXd phase(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) phase[i] = -std::arg(t(i, i)) / dt;
  MatrixXcd h = q * phase.cast<cplx>().asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

} // namespace

ProjectorFamily sigma_z_family(int n_qubits)
{
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  const Eigen::Index half = d / 2;
  ProjectorFamily f;
  f.kind = FamilyKind::pvm;
  for (int s = 0; s < 2; ++s) {
    MatrixXcd p = MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < half; ++i) p(s * half + i, s * half + i) = 1.0;
    f.operators.push_back(p);
    f.labels.push_back(s == 0 ? "up" : "down");
  }
  return f;
}

HistorySpec trivial_sigma_z(int n_slices)
{
  HistorySpec spec;
  spec.space.hamiltonian = MatrixXcd::Zero(2, 2);
  spec.n_slices = n_slices;
  spec.dt = 1.0;
  spec.families = {sigma_z_family()};
  spec.chi0 = Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
  return spec;
}

HistorySpec sigma_x_precession(double omega, double dt, int n_slices)
{
  HistorySpec spec;
  MatrixXcd h(2, 2);
  h << 0.0, omega, omega, 0.0;
  spec.space.hamiltonian = h;
  spec.n_slices = n_slices;
  spec.dt = dt;
  spec.families = {sigma_z_family()};
  spec.chi0 = Eigen::VectorXcd::Unit(2, 0);
  return spec;
}

HistorySpec record_keeping(double theta, int n_slices)
{
  if (n_slices < 1 || n_slices > 5) throw ConfigError("record_keeping supports 1 to 5 slices");
  const int bits = n_slices;
  const Eigen::Index env = Eigen::Index{1} << bits;
  const Eigen::Index d = 2 * env;

  // exp(-i theta sigma_x) on the system, identity on the register.
  const MatrixXcd id = MatrixXcd::Identity(env, env);
  MatrixXcd r(d, d);
  r << std::cos(theta) * id, cplx(0.0, -std::sin(theta)) * id, cplx(0.0, -std::sin(theta)) * id, std::cos(theta) * id;

  // |s, e_1..e_n> -> |s, e_n xor s, e_1..e_{n-1}>, with e_1 the leading register bit.
  MatrixXcd shift = MatrixXcd::Zero(d, d);
  for (Eigen::Index s = 0; s < 2; ++s) {
    for (Eigen::Index e = 0; e < env; ++e) {
      const Eigen::Index last = e & 1;
      const Eigen::Index moved = ((last ^ s) << (bits - 1)) | (e >> 1);
      shift(s * env + moved, s * env + e) = 1.0;
    }
  }

  HistorySpec spec;
  spec.space.hamiltonian = hamiltonian_of(shift * r, 1.0);
  spec.n_slices = n_slices;
  spec.dt = 1.0;
  spec.families = {sigma_z_family(bits + 1)};
  spec.chi0 = Eigen::VectorXcd::Unit(d, 0);
  return spec;
}

HistorySpec plus_minus_witness()
{
  HistorySpec spec;
  spec.space.hamiltonian = MatrixXcd::Zero(2, 2);
  spec.space.position_basis = MatrixXcd::Identity(2, 2);
  spec.n_slices = 1;
  spec.dt = 1.0;
  Eigen::VectorXcd plus(2), minus(2);
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  plus /= std::sqrt(2.0);
  minus /= std::sqrt(2.0);
  ProjectorFamily f;
  f.kind = FamilyKind::pvm;
  f.operators = {plus * plus.adjoint(), minus * minus.adjoint()};
  f.labels = {"plus", "minus"};
  spec.families = {f};
  spec.chi0 = Eigen::VectorXcd::Unit(2, 0);
  return spec;
}

GridWavefunction superpose(const GridWavefunction& a, const GridWavefunction& b)
{
  if (a.psi.size() != b.psi.size()) throw ConfigError("superposed packets live on different grids");
  GridWavefunction out = a;
  for (std::size_t j = 0; j < out.psi.size(); ++j) out.psi[j] += b.psi[j];
  const double n = out.norm();
  if (!(n > 0.0)) throw ConfigError("superposition vanishes");
  for (auto& z : out.psi) z /= n;
  return out;
}

} // namespace reductcheck::scenarios::detail
