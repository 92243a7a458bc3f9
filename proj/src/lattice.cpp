#include "rks/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace rks {

LatticeGeometry build_geometry(int lx, int ly) {
  if (lx < 2 || ly < 2 || (lx % 2) != 0 || (ly % 2) != 0) {
    throw std::invalid_argument("lattice extents must be even and >= 2");
  }
  if (2 * lx * ly > 64) {
    throw std::invalid_argument("lattice needs more than 64 links");
  }
  return LatticeGeometry{lx, ly};
}

int gauss_divergence(const LatticeGeometry& g, Word config, int x, int y) {
  const auto v = g.vertex_links(x, y);
  return static_cast<int>(test_bit(config, v.out_x)) + static_cast<int>(test_bit(config, v.out_y)) -
         static_cast<int>(test_bit(config, v.in_x)) - static_cast<int>(test_bit(config, v.in_y));
}

bool satisfies_gauss_law(const LatticeGeometry& g, Word config) {
  for (int y = 0; y < g.ly; ++y) {
    for (int x = 0; x < g.lx; ++x) {
      if (gauss_divergence(g, config, x, y) != 0) return false;
    }
  }
  return true;
}

PlaquetteState plaquette_state(const LatticeGeometry& g, Word config, int p) {
  const auto pl = g.plaquette_links(p);
  const bool b = test_bit(config, pl.bottom);
  const bool r = test_bit(config, pl.right);
  const bool t = test_bit(config, pl.top);
  const bool l = test_bit(config, pl.left);
  if (!b && !r && t && l) return PlaquetteState::Anticlockwise;
  if (b && r && !t && !l) return PlaquetteState::Clockwise;
  return PlaquetteState::Inactive;
}

Word flip_plaquette(const LatticeGeometry& g, Word config, int p) {
  const auto pl = g.plaquette_links(p);
  const Word mask = set_bit(set_bit(set_bit(set_bit(Word{0}, pl.bottom), pl.right), pl.top), pl.left);
  return config ^ mask;
}

std::pair<int, int> flippable_counts(const LatticeGeometry& g, Word config) {
  int even = 0;
  int odd = 0;
  for (int p = 0; p < g.num_plaquettes(); ++p) {
    if (plaquette_flippable(g, config, p)) {
      (g.plaquette_parity(p) == 0 ? even : odd) += 1;
    }
  }
  return {even, odd};
}

int GaugeSector::index_of(Word config) const {
  const auto it = std::lower_bound(configs.begin(), configs.end(), config);
  if (it == configs.end() || *it != config) return -1;
  return static_cast<int>(it - configs.begin());
}

namespace {

// Per-vertex bookkeeping for the pruned DFS: partial divergence plus the number
// of still-unassigned outgoing/incoming links.
struct VertexCounters {
  int div = 0;
  int free_out = 2;
  int free_in = 2;

  bool feasible() const { return div - free_in <= 0 && 0 <= div + free_out; }
};

struct SectorDfs {
  const LatticeGeometry& g;
  // For link l: the vertex it leaves and the vertex it enters.
  std::vector<int> tail_of, head_of;
  std::vector<VertexCounters> vertex;
  std::vector<Word> out;

  explicit SectorDfs(const LatticeGeometry& geom) : g(geom) {
    const int n = g.num_links();
    tail_of.assign(n, -1);
    head_of.assign(n, -1);
    for (int y = 0; y < g.ly; ++y) {
      for (int x = 0; x < g.lx; ++x) {
        const auto v = g.vertex_links(x, y);
        tail_of[v.out_x] = g.site(x, y);
        tail_of[v.out_y] = g.site(x, y);
        head_of[v.in_x] = g.site(x, y);
        head_of[v.in_y] = g.site(x, y);
      }
    }
    vertex.assign(static_cast<std::size_t>(g.num_vertices()), VertexCounters{});
  }

  void run(int link, Word word) {
    if (link == g.num_links()) {
      out.push_back(word);
      return;
    }
    VertexCounters& tail = vertex[static_cast<std::size_t>(tail_of[link])];
    VertexCounters& head = vertex[static_cast<std::size_t>(head_of[link])];
    for (int bit = 0; bit <= 1; ++bit) {
      tail.free_out -= 1;
      tail.div += bit;
      head.free_in -= 1;
      head.div -= bit;
      if (tail.feasible() && head.feasible()) {
        run(link + 1, bit ? set_bit(word, link) : word);
      }
      tail.free_out += 1;
      tail.div -= bit;
      head.free_in += 1;
      head.div += bit;
    }
  }
};

}  // namespace

GaugeSector enumerate_gauge_sector(const LatticeGeometry& g) {
  SectorDfs dfs(g);
  dfs.run(0, 0);
  std::sort(dfs.out.begin(), dfs.out.end());
  return GaugeSector{g, std::move(dfs.out)};
}

std::vector<int> translation_permutation(const LatticeGeometry& g, int dx, int dy) {
  std::vector<int> perm(static_cast<std::size_t>(g.num_links()));
  for (int y = 0; y < g.ly; ++y)
    for (int x = 0; x < g.lx; ++x)
      for (int d = 0; d < 2; ++d)
        perm[static_cast<std::size_t>(g.link_index(x, y, d))] = g.link_index(x + dx, y + dy, d);
  return perm;
}

Word permute_word(Word w, const std::vector<int>& perm) {
  Word r = 0;
  for (std::size_t j = 0; j < perm.size(); ++j)
    if (test_bit(w, static_cast<int>(j))) r = set_bit(r, perm[j]);
  return r;
}

}  // namespace rks
