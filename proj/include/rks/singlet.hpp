#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/scar_search.hpp"
#include "rks/state.hpp"

namespace rks {

// All sector configurations with every active-parity plaquette flippable and
// every complementary plaquette inactive.  Fixing the C/A state of all active
// plaquettes fixes every link exactly once (each link belongs to exactly one
// plaquette of either parity), so configs and labels are in bijection.
struct SublatticeConfigSet {
  PotentialParity parity = PotentialParity::Even;
  std::vector<int> active_plaquettes;  // plaquette ids of the parity, ascending
  std::vector<Word> configs;           // sector configurations, ascending
  std::vector<Word> labels;            // bit a set = active_plaquettes[a] is C

  int num_active() const { return static_cast<int>(active_plaquettes.size()); }
  int size() const { return static_cast<int>(configs.size()); }
};

SublatticeConfigSet build_sublattice_config_set(const GaugeSector& sector,
                                                PotentialParity parity);

// Perfect matching of the active plaquettes into dimers.
struct DimerPairing {
  PotentialParity parity = PotentialParity::Even;
  std::vector<std::pair<int, int>> pairs;  // plaquette ids, first < second
};

// All perfect matchings, deterministic order: lowest unmatched plaquette is
// paired with each remaining partner in ascending order, recursively.
std::vector<DimerPairing> enumerate_pairings(const SublatticeConfigSet& set);

enum class SingletError { MissingBranch };

struct InvalidSinglet {
  SingletError reason = SingletError::MissingBranch;
  std::string detail;
};

using SingletResult = std::variant<SparseState, InvalidSinglet>;

inline bool is_valid_singlet(const SingletResult& r) {
  return std::holds_alternative<SparseState>(r);
}

// Product of logical singlets (|C>_p |A>_q - |A>_p |C>_q)/sqrt(2) over the
// pairing, expanded at configuration level: support = label words where every
// pair is discordant, amplitude = (-1)^{#pairs in AC order} * 2^{-#pairs/2}.
// Every support word must appear in set.labels -- that is the precise meaning
// of the inactive-sublattice factor, since active plaquettes share links with
// the inactive ones.  A missing word returns Invalid(MissingBranch).
SingletResult build_singlet_state(const SublatticeConfigSet& set, const DimerPairing& d);

struct SingletScan {
  std::vector<ScarRecord> scars;        // deduplicated valid singlet states
  std::vector<DimerPairing> valid;      // pairings that produced them
  std::vector<DimerPairing> rejected;   // pairings that hit MissingBranch
};

// Enumerates both parities and all pairings, keeps valid singlet states,
// drops linearly dependent duplicates, and validates each state as an exact
// O_kin = 0 / active-potential = M eigenstate lying in the E = lambda M
// eigenspace of the supplied spectrum.  Throws std::runtime_error if any
// validation fails (the construction is exact; failure means a bug).
SingletScan enumerate_scar_states(const GaugeSector& sector, const Spectrum& spec);

}  // namespace rks
