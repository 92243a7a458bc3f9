#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/state.hpp"

namespace rks {

// ---------------------------------------------------------------------------
// Stabilizer Renyi entropy M_n = (1-n)^{-1} ln( sum_P |<P>|^{2n} / 2^N ),
// natural logarithm, sum over all 4^N Pauli strings.
// ---------------------------------------------------------------------------

enum class SreStrategy {
  Auto,               // support-restricted transform for n_qubits <= 16
  Direct,             // explicit 4^N loop, n_qubits <= 8 (oracle-grade)
  SupportRestricted,  // Walsh-Hadamard over displacement classes, n_qubits <= 16
};

// Requires a normalized state.  Throws std::invalid_argument when the qubit
// count exceeds what the chosen strategy can evaluate exactly.
double stabilizer_renyi_entropy(const SparseState& state, int order = 2,
                                SreStrategy strategy = SreStrategy::Auto, int threads = 1);

// Multifractal participation flatness over the computational (sector Fock)
// basis: F = sum_x p_x^3 - (sum_x p_x^2)^2 with p_x = |amp_x|^2.  Zero iff
// the probability distribution is uniform on its support.
double multifractal_flatness(const Eigen::VectorXcd& amplitudes);
double multifractal_flatness(const Eigen::VectorXd& amplitudes);

// ---------------------------------------------------------------------------
// Entanglement entropy of a link bipartition.
// ---------------------------------------------------------------------------

struct Bipartition {
  Word mask_a = 0;  // links belonging to subsystem A
};

// Links whose anchor vertex has x < Lx/2 (both orientations).
Bipartition half_system_cut(const LatticeGeometry& geom);

// Von Neumann entropy  S = -Tr rho_A ln rho_A  (natural log) of the reduced
// state on the A links.  Exploits the block structure of the coefficient
// matrix: connected components of the row/column bipartite graph are
// diagonalized independently via the Gram matrix of the smaller side.
// Throws std::invalid_argument for a trivial bipartition (A empty or full).
double entanglement_entropy(const SparseState& state, const Bipartition& cut);

// ---------------------------------------------------------------------------
// Per-eigenstate diagnostic report.
// ---------------------------------------------------------------------------

struct ReportRow {
  int index = 0;          // position in ascending-energy order
  double energy = 0.0;
  double kin = 0.0;       // <O_kin>
  double pot_even = 0.0;  // <V_even>
  double pot_odd = 0.0;   // <V_odd>
  double flatness = 0.0;  // multifractal flatness over the sector basis
  double svn = 0.0;       // half-system entanglement entropy
  bool has_m2 = false;
  double m2 = 0.0;        // stabilizer Renyi entropy M_2 (when evaluated)
};

// Diagnostics for every column of `basis` (energies[i] is the label for
// column i).  SRE is evaluated only when `sre_enabled` and the link count
// admits the exact support-restricted transform (N <= 16).
std::vector<ReportRow> spectrum_report(const GaugeSector& sector, const Eigen::VectorXd& energies,
                                       const Eigen::MatrixXcd& basis, const Bipartition& cut,
                                       bool sre_enabled, int threads = 1);

std::vector<ReportRow> spectrum_report(const GaugeSector& sector, const Spectrum& spec,
                                       const Bipartition& cut, bool sre_enabled, int threads = 1);

}  // namespace rks
