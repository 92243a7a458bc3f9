#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rks/diagnostics.hpp"
#include "rks/operators.hpp"
#include "rks/stabilizer_form.hpp"
#include "rks/state.hpp"

namespace rks {

// One degenerate energy cluster of a spectrum; members are the eigenvector
// columns belonging to it, orthonormal to 1e-10.
struct DegenerateSector {
  double energy = 0.0;
  double lambda = 0.0;
  Eigen::MatrixXd members;

  int dim() const { return static_cast<int>(members.cols()); }
};

// Greedy gap clustering of an ascending spectrum.  cluster_tol <= 0 selects
// the adaptive default 1e-9 * max(1, |E|); the union of members over all
// sectors is the full eigenbasis.
std::vector<DegenerateSector> cluster_spectrum(const Spectrum& spec,
                                               double cluster_tol = 0.0);

// Simultaneous refinement of a degenerate sector by the projected kinetic and
// potential operators.  kin/even/odd values are the (near-constant) projected
// eigenvalues on the piece; integer flags record whether all relevant values
// sit within int_tol of an integer.
struct JointSubspace {
  double energy = 0.0;
  double kin_value = 0.0;
  double even_value = 0.0;
  double odd_value = 0.0;
  bool kin_integer = false;
  bool pot_integer = false;
  Eigen::MatrixXd basis;

  int dim() const { return static_cast<int>(basis.cols()); }
};

std::vector<JointSubspace> joint_integer_decomposition(
    const SectorOperator& kin, const SectorOperator& pot_even,
    const SectorOperator& pot_odd, const DegenerateSector& sec,
    double int_tol = 1e-8);

// A joint subspace whose potential eigenvalues show the sublattice-scar
// pattern (M, 0) or (0, M) with integer kinetic eigenvalue n, |n| <= 2.
struct CandidateSubspace {
  double energy = 0.0;
  int kin_eigenvalue = 0;
  PotentialParity active_parity = PotentialParity::Even;
  Eigen::MatrixXd basis;

  int dim() const { return static_cast<int>(basis.cols()); }
};

std::vector<CandidateSubspace> find_integer_joint_eigenvectors(
    const GaugeSector& sector, const SectorOperator& kin,
    const SectorOperator& pot_even, const SectorOperator& pot_odd,
    const DegenerateSector& sec, double int_tol = 1e-8);

struct SearchOptions {
  double tol = 1e-8;        // projection-residual acceptance; squared-residual
                            // tests are floored at 1e-12 (Gram noise)
  int k_cap = 6;            // affine-support dimension cap (support <= 2^6)
  int exhaustive_k = 4;     // full phase enumeration up to this k
  long phase_budget = 1u << 22;  // phase assignments allowed past exhaustive_k
};

struct SearchOutcome {
  bool truncated = false;
  std::vector<std::string> warnings;
};

// Enumerates canonical stabilizer vectors inside span(basis), restricted to
// the support of the subspace.  basis columns must be orthonormal.  Results
// come in a deterministic census order (base word ascending, generators
// lexicographic, phases ascending) with the global phase fixed so the
// amplitude on the smallest support word is real positive; they are
// deduplicated up to that phase.  The census only depends on the subspace,
// not on the arbitrary basis chosen inside it.
std::vector<Eigen::VectorXcd> stabilizer_search_in_subspace(
    const GaugeSector& sector, const Eigen::MatrixXd& basis,
    const SearchOptions& opt = {}, SearchOutcome* outcome = nullptr);

// Exact maximum-cardinality pairwise-orthogonal subset (overlap <= tol),
// branch-and-bound over the list; among maximum subsets the lexicographically
// first in list order wins, so census order makes the result deterministic.
std::vector<Eigen::VectorXcd> select_orthogonal(
    const std::vector<Eigen::VectorXcd>& found, double tol = 1e-8);

// Gram-Schmidt over `found` (dropping dependent vectors, residual < 1e-8),
// completed with the projected sector members; output has exactly sec.dim()
// orthonormal columns (to 1e-10), found vectors first.
Eigen::MatrixXcd orthonormalize_and_complete(
    const std::vector<Eigen::VectorXcd>& found, const DegenerateSector& sec);

struct ScarMarkers {
  double flatness = 0.0;
  double svn = 0.0;
  std::optional<double> m2;
};

// How a scar was singled out inside its candidate piece:
//   Census        - stabilizer census member with sharp momentum under the
//                   parity-preserving translations (1,1), (2,0), (0,2);
//   MaxOrthogonal - no census member has sharp momentum; member of the
//                   maximum orthogonal census subset;
//   SymmetryFlat  - empty census; perfectly flat unit state spanning a
//                   one-dimensional joint translation sector of the piece
//                   (no exact stabilizer form exists there);
//   Frozen        - zero-energy Fock configuration with no flippable plaquette;
//   Analytic      - dimer-singlet product built by the singlet constructor.
enum class ScarOrigin { Census, MaxOrthogonal, SymmetryFlat, Frozen, Analytic };

struct ScarRecord {
  Eigen::VectorXcd coeffs;  // sector coordinates
  SparseState state;
  double energy = 0.0;
  int kin_eigenvalue = 0;
  PotentialParity active_parity = PotentialParity::Even;
  ScarOrigin origin = ScarOrigin::Census;
  std::optional<CanonicalStabilizerForm> form;  // absent only for SymmetryFlat
  // Eigenphases under the three translation generators when the state has
  // sharp momentum (always for Census / SymmetryFlat scars).
  std::optional<std::array<Complex, 3>> translation_phases;
  ScarMarkers markers;
};

// Canonical basis of one degenerate cluster: scar columns first, then frozen
// Fock rows, flat rows, and the Gram-Schmidt completion.
struct SectorBasis {
  double energy = 0.0;
  Eigen::MatrixXcd basis;
  int n_scars = 0;
  std::vector<int> scar_ids;  // indices into ScanResult::scars
};

struct ScanOptions {
  double cluster_tol = 0.0;  // <= 0: adaptive default
  double int_tol = 1e-8;
  double stab_tol = 1e-8;
  double flat_tol = 1e-10;   // flatness acceptance for SymmetryFlat scars
  int flat_support_cap = 20;  // sign-vector search bound for non-scar pieces
  SearchOptions search;
  int threads = 1;
};

struct ScanResult {
  std::vector<ScarRecord> scars;    // nontrivial sublattice scars
  std::vector<ScarRecord> trivial;  // frozen Fock eigenstates (all at E = 0)
  std::vector<SectorBasis> sectors; // ascending energy, covers the spectrum
  std::vector<std::string> warnings;

  // Canonical basis over the whole spectrum, sector blocks concatenated.
  Eigen::MatrixXcd canonical_basis() const;
  Eigen::VectorXd canonical_energies() const;
};

// Full pipeline: cluster, refine to integer joint eigenvalues, and resolve
// every sublattice-pattern piece into scars.  Within a piece the stabilizer
// census is taken first; the scars are the census members with sharp momentum
// under the parity-preserving translations.  When the census is nonempty but
// no member has sharp momentum, the maximum orthogonal census subset is kept
// instead; when the census is empty, the perfectly flat unit states spanning
// one-dimensional joint translation sectors of the piece are kept (those
// carry no exact stabilizer form).  Cluster bases are canonicalized with
// scars first.
ScanResult scan_all(const GaugeSector& sector, const Spectrum& spec,
                    const ScanOptions& opt = {});

}  // namespace rks
