#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rks/lattice.hpp"
#include "rks/state.hpp"

namespace rks {

// Canonical representation of a stabilizer state:
//   amp(x0 ^ t1 g1 ^ ... ^ tk gk) = 2^{-k/2} * i^{m.t} * (-1)^{sum_{i<j} B_ij t_i t_j}
// with the global phase fixed by amp(x0) = +2^{-k/2}.  Generators are in
// reduced row echelon form over F2; each generator owns a pivot bit (its
// highest set bit) that appears in no other generator and not in x0, so the
// coordinates t of a support word can be read off the pivot bits directly.
struct CanonicalStabilizerForm {
  int n_qubits = 0;
  Word x0 = 0;
  std::vector<Word> generators;  // sorted by ascending pivot bit
  std::vector<int> m;            // Z4 linear phase coefficients, size k
  std::vector<Word> b_rows;      // bit j of b_rows[i] = B_ij (strictly upper)

  int k() const { return static_cast<int>(generators.size()); }
  int pivot_bit(int i) const;     // highest set bit of generators[i]
  Word support_word(Word t) const;  // x(t)
  int phase_exponent(Word t) const;  // (m.t + 2 q(t)) mod 4
};

// Structural validity (echelon generators, pivot ownership, field ranges).
// Throws std::invalid_argument describing the first violation.
void validate_form(const CanonicalStabilizerForm& form);

enum class NotStabilizerReason {
  NonUniformMagnitudes,
  SupportNotPowerOfTwo,
  SupportNotAffine,
  PhaseNotFourthRoot,
  PhaseNotQuadratic,
};

const char* to_string(NotStabilizerReason reason);

struct NotStabilizer {
  NotStabilizerReason reason;
  std::string detail;
};

using ExtractResult = std::variant<CanonicalStabilizerForm, NotStabilizer>;

inline bool is_stabilizer(const ExtractResult& r) {
  return std::holds_alternative<CanonicalStabilizerForm>(r);
}

// Decides whether `v` is an exact stabilizer state (up to numerical noise)
// and extracts its canonical form.  `tol` bounds the relative support /
// magnitude-uniformity test; the phase test uses a fixed angular tolerance
// of 1e-6 rad.  Requires a normalized state.
ExtractResult extract_canonical_form(const SparseState& v, double tol = 1e-8);

// The unique normalized state obeying the amplitude law of `form`.  When a
// sector is supplied, every support word must be a sector member (throws
// std::invalid_argument otherwise).
SparseState synthesize_state(const CanonicalStabilizerForm& form,
                             const GaugeSector* sector = nullptr);

// JSON round-trip: {n, x0, generators[], m[], B_pairs[]} with words encoded
// as binary strings (most significant link first).
std::string form_to_json(const CanonicalStabilizerForm& form);
CanonicalStabilizerForm form_from_json(const std::string& text);

}  // namespace rks
