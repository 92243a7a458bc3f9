#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rks/bits.hpp"

namespace rks {

// Periodic Lx x Ly plaquette lattice of spin-1/2 links.
//
// Conventions, fixed once for the whole toolkit:
//   * vertices and plaquettes live on the same (x, y) grid, x in [0,Lx), y in [0,Ly);
//   * link_index((x,y), x-hat) = 2*(y*Lx + x), link_index((x,y), y-hat) = 2*(y*Lx + x) + 1;
//   * plaquette p = (px,py) has links (bottom, right, top, left) =
//       (x-link at (px,py), y-link at (px+1,py), x-link at (px,py+1), y-link at (px,py)),
//     coordinates wrapped mod (Lx, Ly);
//   * plaquette sublattice parity = (px + py) mod 2.
struct LatticeGeometry {
  int lx = 0;
  int ly = 0;

  int num_links() const { return 2 * lx * ly; }
  int num_plaquettes() const { return lx * ly; }
  int num_vertices() const { return lx * ly; }

  int site(int x, int y) const { return wrap(y, ly) * lx + wrap(x, lx); }

  // dir: 0 for the x-oriented link, 1 for the y-oriented link at vertex (x, y).
  int link_index(int x, int y, int dir) const { return 2 * site(x, y) + dir; }

  struct PlaquetteLinks {
    int bottom, right, top, left;
  };
  PlaquetteLinks plaquette_links(int px, int py) const {
    return {link_index(px, py, 0), link_index(px + 1, py, 1), link_index(px, py + 1, 0),
            link_index(px, py, 1)};
  }
  PlaquetteLinks plaquette_links(int p) const { return plaquette_links(p % lx, p / lx); }

  struct VertexLinks {
    int out_x, out_y, in_x, in_y;
  };
  VertexLinks vertex_links(int x, int y) const {
    return {link_index(x, y, 0), link_index(x, y, 1), link_index(x - 1, y, 0),
            link_index(x, y - 1, 1)};
  }

  int plaquette_parity(int px, int py) const { return (px + py) & 1; }
  int plaquette_parity(int p) const { return plaquette_parity(p % lx, p / lx); }

 private:
  static int wrap(int c, int m) { return ((c % m) + m) % m; }
};

// Throws std::invalid_argument unless Lx, Ly are even and >= 2; the checkerboard
// sublattice split needs even extents under periodic boundaries.
LatticeGeometry build_geometry(int lx, int ly);

// Net Sz flux out of vertex (x, y); zero at every vertex defines the physical sector.
int gauss_divergence(const LatticeGeometry& g, Word config, int x, int y);

bool satisfies_gauss_law(const LatticeGeometry& g, Word config);

enum class PlaquetteState { Clockwise, Anticlockwise, Inactive };

// Anticlockwise is the pattern (bottom,right,top,left) = (0,0,1,1), the one the
// ring-exchange raising operator maps to Clockwise = (1,1,0,0).
PlaquetteState plaquette_state(const LatticeGeometry& g, Word config, int p);

inline bool plaquette_flippable(const LatticeGeometry& g, Word config, int p) {
  return plaquette_state(g, config, p) != PlaquetteState::Inactive;
}

// Toggles the four links of plaquette p (C <-> A when p is flippable).
Word flip_plaquette(const LatticeGeometry& g, Word config, int p);

// Number of flippable plaquettes on the (even, odd) sublattices.
std::pair<int, int> flippable_counts(const LatticeGeometry& g, Word config);

// Gauge-invariant zero-charge sector, configurations sorted ascending.
struct GaugeSector {
  LatticeGeometry geometry;
  std::vector<Word> configs;

  int dim() const { return static_cast<int>(configs.size()); }
  // Position of config in the sorted list, or -1.
  int index_of(Word config) const;
  bool contains(Word config) const { return index_of(config) >= 0; }
};

// Depth-first enumeration over links with partial-divergence pruning at both
// endpoint vertices of every assigned link; avoids the blind 2^N scan.
GaugeSector enumerate_gauge_sector(const LatticeGeometry& g);

// Link-index permutation of the rigid translation by (dx, dy): link j maps to
// perm[j].  Translations with dx + dy even preserve the plaquette sublattice
// parity; (1,1), (2,0), (0,2) generate that subgroup.
std::vector<int> translation_permutation(const LatticeGeometry& g, int dx, int dy);

// Applies a link permutation to a configuration word.
Word permute_word(Word w, const std::vector<int>& perm);

}  // namespace rks
