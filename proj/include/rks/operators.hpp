#pragma once

#include <Eigen/Dense>

#include "rks/lattice.hpp"

namespace rks {

enum class PotentialParity { Even, Odd, Both };

// Sparse symmetric operator over a gauge sector, compressed rows.  Entries are
// exact small integers (stored as doubles) except for Hamiltonian diagonals,
// which carry the lambda coupling.
struct SectorOperator {
  enum class Kind { Kinetic, PotentialEven, PotentialOdd, PotentialBoth, Hamiltonian };

  Kind kind = Kind::Kinetic;
  double lambda = 0.0;  // meaningful for Kind::Hamiltonian only
  int dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd to_dense() const;
  double trace() const;
  double frobenius_norm() const;
};

SectorOperator build_kinetic(const GaugeSector& s);
SectorOperator build_potential(const GaugeSector& s, PotentialParity parity);
SectorOperator build_hamiltonian(const GaugeSector& s, double lambda);

// Full orthonormal eigensystem, eigenvalues ascending.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues[k]
  double lambda = 0.0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// Dense symmetric eigendecomposition (Householder tridiagonalization with
// implicit-shift iterations).  Verifies the residual contract
// ||H v - E v|| <= 1e-10 ||H||_F and max |V^T V - 1| <= 1e-10, and throws
// std::runtime_error with diagnostics if the solve misses it.
Spectrum diagonalize(const SectorOperator& op);

// <v|M|v> for a unit vector over the same sector.
double expectation(const SectorOperator& op, const Eigen::VectorXd& v);

// Residual max_k ||H v_k - E_k v_k||_2; used both by diagonalize and when
// revalidating spectra loaded from disk.
double max_eigenpair_residual(const SectorOperator& op, const Spectrum& spec);

}  // namespace rks
