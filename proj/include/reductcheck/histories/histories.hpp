#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace reductcheck {

struct FiniteHilbert {
  Eigen::MatrixXcd hamiltonian;
  /// Columns form an orthonormal configuration basis, when present.
  std::optional<Eigen::MatrixXcd> position_basis;

  Eigen::Index dim() const { return hamiltonian.rows(); }
};

enum class FamilyKind { pvm, povm };

struct ProjectorFamily {
  FamilyKind kind = FamilyKind::pvm;
  std::vector<Eigen::MatrixXcd> operators;
  std::vector<std::string> labels;
};

struct FamilyValidation {
  double completeness = 0.0;   ///< ||sum E - I||
  double idempotency = 0.0;    ///< max ||P^2 - P||
  double orthogonality = 0.0;  ///< max ||P_a P_b||, a != b
  double hermiticity = 0.0;    ///< max ||E - E^dagger||
  double min_eigenvalue = 0.0; ///< smallest eigenvalue over the family
  bool pvm = false;
  bool povm = false;
  /// Valid as the declared kind.
  bool valid = false;
};

FamilyValidation validate_family(const ProjectorFamily& f);

struct HistorySpec {
  FiniteHilbert space;
  int n_slices = 1;
  double dt = 1.0;
  /// One family for every slice, or exactly one per slice.
  std::vector<ProjectorFamily> families;
  Eigen::VectorXcd chi0;
  /// Amplitude-norm threshold for a realised history.
  double epsilon = 1e-8;

  /// Throws ConfigError on inconsistent sizes, non-Hermitian H, or a non-unit chi0.
  void validate() const;
  const ProjectorFamily& family(int slice) const;
  /// Total number of histories; enumeration is capped at 4096.
  std::size_t count() const;
};

using HistoryIndex = std::vector<int>;

/// exp(-i H dt) by spectral decomposition.
Eigen::MatrixXcd step_propagator(const HistorySpec& spec);

/// All histories in lexicographic order (slice 1 slowest).
std::vector<HistoryIndex> enumerate_histories(const HistorySpec& spec);

/// C = P_{i_N} U ... P_{i_1} U
Eigen::MatrixXcd history_operator(const HistorySpec& spec, const HistoryIndex& idx);

/// D(i, i') = <chi0| C_{i'}^dagger C_i |chi0>
std::complex<double> decoherence_functional(const HistorySpec& spec, const HistoryIndex& i, const HistoryIndex& ip);

double history_probability(const HistorySpec& spec, const HistoryIndex& i);

/// Branch vectors C_i chi0 for every history, in enumeration order (parallel).
std::vector<Eigen::VectorXcd> branch_vectors(const HistorySpec& spec);

/// Full matrix D(i, i') over all histories, indexed in enumeration order.
Eigen::MatrixXcd decoherence_matrix(const HistorySpec& spec);

struct CoarseCell {
  std::vector<std::size_t> members;  ///< enumeration indices
  Eigen::MatrixXcd op;               ///< sum of member history operators
  double probability = 0.0;          ///< ||op chi0||^2
  double fine_sum = 0.0;             ///< sum of member probabilities
  double defect = 0.0;               ///< |probability - fine_sum|
  double cross_bound = 0.0;          ///< sum over member pairs i != i' of |D(i,i')|
};

/// `cell_of[k]` assigns enumeration index k to a cell 0..n_cells-1. Throws
/// ConfigError unless every history is in exactly one cell and no cell is empty.
std::vector<CoarseCell> coarse_grain(const HistorySpec& spec, const std::vector<std::size_t>& cell_of);

/// ||P_late U^(late_steps-early_steps) P_early U^early_steps chi0||^2 /
/// ||P_early U^early_steps chi0||^2, and 0 when the denominator is below eps^2.
double transition_weight(const HistorySpec& spec, const Eigen::MatrixXcd& p_early, int early_steps,
                         const Eigen::MatrixXcd& p_late, int late_steps);

struct BranchingWitness {
  int early_slice = 0;
  int late_slice = 0;
  HistoryIndex early_a;
  HistoryIndex early_b;
  HistoryIndex late;
};

struct BranchingResult {
  bool holds = true;
  std::optional<BranchingWitness> witness;
};

/// Nested branch projectors |b><b|/||b||^2 with b = C_{i_1..i_k} chi0 for
/// every realised prefix. Holds iff each realised late projector receives
/// transition weight above epsilon from exactly one earlier projector.
BranchingResult check_branching(const HistorySpec& spec);

/// max over configuration basis states X of |<X|C_i chi0>| |<X|C_i' chi0>|.
/// With normalize_branches each branch vector is scaled to unit norm first.
double config_decoherence_functional(const HistorySpec& spec, const HistoryIndex& i, const HistoryIndex& ip,
                                     bool normalize_branches = false);

} // namespace reductcheck
