#include "reductcheck/histories/histories.hpp"

#include "reductcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

namespace reductcheck {

namespace {

constexpr std::size_t max_histories = 4096;

double opnorm(const Eigen::MatrixXcd& a)
{
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& u, int k)
{
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  for (int s = 0; s < k; ++s) r = u * r;
  return r;
}

Eigen::VectorXcd apply_history(const HistorySpec& spec, const Eigen::MatrixXcd& u, const HistoryIndex& idx,
                               Eigen::VectorXcd v)
{
  for (std::size_t s = 0; s < idx.size(); ++s) v = spec.family(static_cast<int>(s)).operators[idx[s]] * (u * v);
  return v;
}

void check_index(const HistorySpec& spec, const HistoryIndex& idx)
{
  if (static_cast<int>(idx.size()) != spec.n_slices) throw DomainError("history index has the wrong length");
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const auto n = static_cast<int>(spec.family(static_cast<int>(s)).operators.size());
    if (idx[s] < 0 || idx[s] >= n) throw DomainError("history index out of range");
  }
}

} // namespace

FamilyValidation validate_family(const ProjectorFamily& f)
{
  FamilyValidation r;
  if (f.operators.empty()) return r;
  const Eigen::Index d = f.operators.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < f.operators.size(); ++a) {
    const auto& e = f.operators[a];
    if (e.rows() != d || e.cols() != d) throw DomainError("family operators must be square with matching size");
    sum += e;
    r.hermiticity = std::max(r.hermiticity, opnorm(e - e.adjoint()));
    r.idempotency = std::max(r.idempotency, opnorm(e * e - e));
    for (std::size_t b = 0; b < f.operators.size(); ++b) {
      if (a != b) r.orthogonality = std::max(r.orthogonality, opnorm(e * f.operators[b]));
    }
    const Eigen::MatrixXcd herm = 0.5 * (e + e.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = std::min(r.min_eigenvalue, eig.eigenvalues().minCoeff());
  }
  r.completeness = opnorm(sum - Eigen::MatrixXcd::Identity(d, d));
  const double tol = 1e-10;
  r.povm = r.completeness < tol && r.hermiticity < tol && r.min_eigenvalue > -tol;
  r.pvm = r.povm && r.idempotency < tol && r.orthogonality < tol;
  r.valid = f.kind == FamilyKind::pvm ? r.pvm : r.povm;
  return r;
}

void HistorySpec::validate() const
{
  const Eigen::Index d = space.dim();
  if (d < 1 || d > 64 || space.hamiltonian.cols() != d) throw ConfigError("Hilbert dimension must be 1..64");
  if (opnorm(space.hamiltonian - space.hamiltonian.adjoint()) > 1e-12) throw ConfigError("Hamiltonian is not Hermitian");
  if (n_slices < 1) throw ConfigError("need at least one slice");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (families.size() != 1 && families.size() != static_cast<std::size_t>(n_slices)) {
    throw ConfigError("need one family, or one per slice");
  }
  for (const auto& f : families) {
    if (f.operators.empty()) throw ConfigError("empty projector family");
    for (const auto& e : f.operators) {
      if (e.rows() != d || e.cols() != d) throw ConfigError("family operator size mismatch");
    }
  }
  if (chi0.size() != d || std::abs(chi0.norm() - 1.0) > 1e-12) throw ConfigError("chi0 must be a unit vector");
  if (space.position_basis && (space.position_basis->rows() != d)) throw ConfigError("position basis size mismatch");
  if (count() > max_histories) throw ConfigError("more than 4096 histories");
}

const ProjectorFamily& HistorySpec::family(int slice) const
{
  return families.size() == 1 ? families.front() : families[static_cast<std::size_t>(slice)];
}

std::size_t HistorySpec::count() const
{
  std::size_t c = 1;
  for (int s = 0; s < n_slices; ++s) {
    c *= family(s).operators.size();
    if (c > max_histories) return c;
  }
  return c;
}

Eigen::MatrixXcd step_propagator(const HistorySpec& spec)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(spec.space.hamiltonian);
  Eigen::VectorXcd phase(eig.eigenvalues().size());
  for (Eigen::Index j = 0; j < phase.size(); ++j) phase[j] = std::polar(1.0, -spec.dt * eig.eigenvalues()[j]);
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

std::vector<HistoryIndex> enumerate_histories(const HistorySpec& spec)
{
  spec.validate();
  std::vector<HistoryIndex> out;
  out.reserve(spec.count());
  HistoryIndex idx(static_cast<std::size_t>(spec.n_slices), 0);
  while (true) {
    out.push_back(idx);
    int s = spec.n_slices - 1;
    while (s >= 0) {
      if (++idx[s] < static_cast<int>(spec.family(s).operators.size())) break;
      idx[s] = 0;
      --s;
    }
    if (s < 0) break;
  }
  return out;
}

Eigen::MatrixXcd history_operator(const HistorySpec& spec, const HistoryIndex& idx)
{
  spec.validate();
  check_index(spec, idx);
  const Eigen::MatrixXcd u = step_propagator(spec);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(spec.space.dim(), spec.space.dim());
  for (std::size_t s = 0; s < idx.size(); ++s) c = spec.family(static_cast<int>(s)).operators[idx[s]] * (u * c);
  return c;
}

std::complex<double> decoherence_functional(const HistorySpec& spec, const HistoryIndex& i, const HistoryIndex& ip)
{
  spec.validate();
  check_index(spec, i);
  check_index(spec, ip);
  const Eigen::MatrixXcd u = step_propagator(spec);
  const Eigen::VectorXcd bi = apply_history(spec, u, i, spec.chi0);
  const Eigen::VectorXcd bip = apply_history(spec, u, ip, spec.chi0);
  return bip.dot(bi);
}

double history_probability(const HistorySpec& spec, const HistoryIndex& i)
{
  return decoherence_functional(spec, i, i).real();
}

std::vector<Eigen::VectorXcd> branch_vectors(const HistorySpec& spec)
{
  const auto all = enumerate_histories(spec);
  const Eigen::MatrixXcd u = step_propagator(spec);
  std::vector<Eigen::VectorXcd> out(all.size());
  const auto n = static_cast<std::ptrdiff_t>(all.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = apply_history(spec, u, all[k], spec.chi0);
  return out;
}

Eigen::MatrixXcd decoherence_matrix(const HistorySpec& spec)
{
  const auto b = branch_vectors(spec);
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd d(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = b[j].dot(b[i]);
  }
  return d;
}

std::vector<CoarseCell> coarse_grain(const HistorySpec& spec, const std::vector<std::size_t>& cell_of)
{
  const auto all = enumerate_histories(spec);
  if (cell_of.size() != all.size()) throw ConfigError("partition must assign every history exactly once");
  const std::size_t n_cells = cell_of.empty() ? 0 : *std::max_element(cell_of.begin(), cell_of.end()) + 1;
  std::vector<CoarseCell> cells(n_cells);
  for (std::size_t k = 0; k < cell_of.size(); ++k) cells[cell_of[k]].members.push_back(k);
  for (const auto& c : cells) {
    if (c.members.empty()) throw ConfigError("partition has an empty cell");
  }

  const Eigen::MatrixXcd u = step_propagator(spec);
  const Eigen::MatrixXcd dmat = decoherence_matrix(spec);
  const Eigen::Index d = spec.space.dim();
  for (auto& c : cells) {
    c.op = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t k : c.members) {
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(d, d);
      for (std::size_t s = 0; s < all[k].size(); ++s) h = spec.family(static_cast<int>(s)).operators[all[k][s]] * (u * h);
      c.op += h;
      c.fine_sum += dmat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
      for (std::size_t kp : c.members) {
        if (kp != k) c.cross_bound += std::abs(dmat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp)));
      }
    }
    c.probability = (c.op * spec.chi0).squaredNorm();
    c.defect = std::abs(c.probability - c.fine_sum);
  }
  return cells;
}

double transition_weight(const HistorySpec& spec, const Eigen::MatrixXcd& p_early, int early_steps,
                         const Eigen::MatrixXcd& p_late, int late_steps)
{
  spec.validate();
  if (early_steps < 0 || late_steps <= early_steps) throw DomainError("transition_weight needs t' > t >= 0");
  const Eigen::MatrixXcd u = step_propagator(spec);
  const Eigen::VectorXcd early = p_early * (matrix_power(u, early_steps) * spec.chi0);
  const double den = early.squaredNorm();
  if (den < spec.epsilon * spec.epsilon) return 0.0;
  const Eigen::VectorXcd late = p_late * (matrix_power(u, late_steps - early_steps) * early);
  return late.squaredNorm() / den;
}

BranchingResult check_branching(const HistorySpec& spec)
{
  spec.validate();
  const Eigen::MatrixXcd u = step_propagator(spec);

  // Realised prefixes of each length k = 1..N with their branch vectors.
  struct Branch {
    HistoryIndex prefix;
    Eigen::VectorXcd b;
  };
  std::vector<std::vector<Branch>> level(static_cast<std::size_t>(spec.n_slices) + 1);
  level[0].push_back({{}, spec.chi0});
  for (int k = 1; k <= spec.n_slices; ++k) {
    const auto& fam = spec.family(k - 1);
    for (const auto& parent : level[static_cast<std::size_t>(k - 1)]) {
      for (std::size_t a = 0; a < fam.operators.size(); ++a) {
        Eigen::VectorXcd b = fam.operators[a] * (u * parent.b);
        if (b.norm() <= spec.epsilon) continue;
        HistoryIndex p = parent.prefix;
        p.push_back(static_cast<int>(a));
        level[static_cast<std::size_t>(k)].push_back({std::move(p), std::move(b)});
      }
    }
  }
  auto projector = [](const Eigen::VectorXcd& b) { return Eigen::MatrixXcd(b * b.adjoint() / b.squaredNorm()); };

  BranchingResult result;
  for (int ke = 1; ke < spec.n_slices; ++ke) {
    for (int kl = ke + 1; kl <= spec.n_slices; ++kl) {
      for (const auto& late : level[static_cast<std::size_t>(kl)]) {
        const Eigen::MatrixXcd pl = projector(late.b);
        std::vector<const Branch*> feeding;
        for (const auto& early : level[static_cast<std::size_t>(ke)]) {
          if (transition_weight(spec, projector(early.b), ke, pl, kl) > spec.epsilon) feeding.push_back(&early);
        }
        if (feeding.size() != 1) {
          BranchingWitness w;
          w.early_slice = ke;
          w.late_slice = kl;
          w.late = late.prefix;
          if (!feeding.empty()) w.early_a = feeding[0]->prefix;
          if (feeding.size() > 1) w.early_b = feeding[1]->prefix;
          result.holds = false;
          result.witness = w;
          return result;
        }
      }
    }
  }
  return result;
}

double config_decoherence_functional(const HistorySpec& spec, const HistoryIndex& i, const HistoryIndex& ip,
                                     bool normalize_branches)
{
  spec.validate();
  if (!spec.space.position_basis) throw DomainError("configuration-space functional needs a position basis");
  check_index(spec, i);
  check_index(spec, ip);
  const Eigen::MatrixXcd u = step_propagator(spec);
  Eigen::VectorXcd bi = apply_history(spec, u, i, spec.chi0);
  Eigen::VectorXcd bip = apply_history(spec, u, ip, spec.chi0);
  if (normalize_branches) {
    if (bi.norm() > 0.0) bi.normalize();
    if (bip.norm() > 0.0) bip.normalize();
  }
  const Eigen::MatrixXcd& basis = *spec.space.position_basis;
  const Eigen::VectorXcd ai = basis.adjoint() * bi;
  const Eigen::VectorXcd aip = basis.adjoint() * bip;
  return (ai.cwiseAbs().cwiseProduct(aip.cwiseAbs())).maxCoeff();
}

} // namespace reductcheck
