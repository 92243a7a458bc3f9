#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rks/lattice.hpp"

namespace rks {

using Complex = std::complex<double>;

// Sparse amplitudes over the full 2^N register, support sorted by basis word.
// Gauge-sector states expand into this form for Pauli/stabilizer work.
struct SparseState {
  int n_qubits = 0;
  std::vector<Word> words;
  std::vector<Complex> amps;

  int support_size() const { return static_cast<int>(words.size()); }
  // Index into the support, or -1.
  int find(Word w) const;
  Complex amp_of(Word w) const;
  double norm() const;
  bool is_real(double tol = 1e-12) const;
  void normalize();
  // Drops entries with |amp| <= tol, keeping order.
  SparseState pruned(double tol) const;
};

SparseState make_fock_state(int n_qubits, Word config);

// Expansion of a sector-basis amplitude vector (keeps every sector entry).
SparseState sector_state(const GaugeSector& s, const Eigen::VectorXd& amps);
SparseState sector_state(const GaugeSector& s, const Eigen::VectorXcd& amps);

// Inverse of sector_state; throws if a support word is not a sector member.
Eigen::VectorXcd to_sector_vector(const GaugeSector& s, const SparseState& v);

struct PauliString {
  Word x = 0;  // X support
  Word z = 0;  // Z support
};

// <v|P|v> in the Hermitian convention P|w> = i^|x&z| (-1)^|z&w| |w^x>.
// The accumulated value must be real up to 1e-10; a larger imaginary residue
// signals an inconsistent state and raises std::runtime_error.
double pauli_expectation(const SparseState& v, PauliString p);

}  // namespace rks
