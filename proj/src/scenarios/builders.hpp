#pragma once

#include "reductcheck/histories/histories.hpp"
#include "reductcheck/quantum/wavefunction.hpp"

namespace reductcheck::scenarios::detail {

/// {|0><0|, |1><1|} on the first qubit of a 2^n_qubits space.
ProjectorFamily sigma_z_family(int n_qubits = 1);

/// d=2, H=0, sigma_z PVM at every slice, chi0 = (|0> + |1>)/sqrt2.
HistorySpec trivial_sigma_z(int n_slices);

/// d=2, H = omega sigma_x, sigma_z PVM, chi0 = |0>.
HistorySpec sigma_x_precession(double omega, double dt, int n_slices);

/// System qubit plus an n_slices-bit register. Each step rotates the system
/// by exp(-i theta sigma_x) and shifts the register, writing the system bit
/// into its first cell, so distinct outcome sequences leave orthogonal
/// records. sigma_z PVM on the system, chi0 = |0, 0...0>, dt = 1.
HistorySpec record_keeping(double theta, int n_slices);

/// d=2, H=0, one slice of the {|+><+|, |-><-|} PVM, chi0 = |0>, with the
/// computational basis as the configuration basis.
HistorySpec plus_minus_witness();

/// Normalized a + b.
GridWavefunction superpose(const GridWavefunction& a, const GridWavefunction& b);

} // namespace reductcheck::scenarios::detail
