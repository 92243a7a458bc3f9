#pragma once

// Test-side oracles, kept deliberately independent of the library internals:
// dense statevector gate application, brute-force Pauli expectations, and a
// from-scratch Hamiltonian assembly that only leans on the documented link
// indexing.

#include <algorithm>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "rks/clifford.hpp"
#include "rks/lattice.hpp"
#include "rks/stabilizer_form.hpp"
#include "rks/state.hpp"

namespace testor {

using rks::Word;
using C = std::complex<double>;

// Gate-by-gate dense evolution of |0...0>; the reference the tableau must match.
inline Eigen::VectorXcd dense_sim(const rks::CliffordCircuit& c) {
  std::size_t dim = std::size_t{1} << c.n_qubits;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  psi(0) = 1.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const rks::Gate& g : c.gates) {
    Word ba = Word{1} << g.a;
    switch (g.kind) {
      case rks::GateKind::X:
        for (Word w = 0; w < dim; ++w)
          if (!(w & ba))
            std::swap(psi(static_cast<Eigen::Index>(w)), psi(static_cast<Eigen::Index>(w | ba)));
        break;
      case rks::GateKind::H:
        for (Word w = 0; w < dim; ++w)
          if (!(w & ba)) {
            C u = psi(static_cast<Eigen::Index>(w)), v = psi(static_cast<Eigen::Index>(w | ba));
            psi(static_cast<Eigen::Index>(w)) = (u + v) * inv_sqrt2;
            psi(static_cast<Eigen::Index>(w | ba)) = (u - v) * inv_sqrt2;
          }
        break;
      case rks::GateKind::Z:
        for (Word w = 0; w < dim; ++w)
          if (w & ba) psi(static_cast<Eigen::Index>(w)) = -psi(static_cast<Eigen::Index>(w));
        break;
      case rks::GateKind::S:
        for (Word w = 0; w < dim; ++w)
          if (w & ba) psi(static_cast<Eigen::Index>(w)) *= C(0, 1);
        break;
      case rks::GateKind::Sdg:
        for (Word w = 0; w < dim; ++w)
          if (w & ba) psi(static_cast<Eigen::Index>(w)) *= C(0, -1);
        break;
      case rks::GateKind::Cnot: {
        Word bb = Word{1} << g.b;
        for (Word w = 0; w < dim; ++w)
          if ((w & ba) && !(w & bb))
            std::swap(psi(static_cast<Eigen::Index>(w)), psi(static_cast<Eigen::Index>(w | bb)));
        break;
      }
      case rks::GateKind::Cz: {
        Word bb = Word{1} << g.b;
        for (Word w = 0; w < dim; ++w)
          if ((w & ba) && (w & bb)) psi(static_cast<Eigen::Index>(w)) = -psi(static_cast<Eigen::Index>(w));
        break;
      }
    }
  }
  return psi;
}

// <psi| i^|x&z| X^x Z^z |psi> summed literally over the register.
inline C dense_pauli_exp(const Eigen::VectorXcd& psi, rks::PauliString p, int n) {
  std::size_t dim = std::size_t{1} << n;
  C phase = 1.0;
  for (int r = 0; r < (rks::popcount(p.x & p.z) & 3); ++r) phase *= C(0, 1);
  C acc = 0.0;
  for (Word w = 0; w < dim; ++w) {
    C amp = psi(static_cast<Eigen::Index>(w));
    if (amp == 0.0) continue;
    double sgn = rks::bit_parity(p.z & w) ? -1.0 : 1.0;
    acc += std::conj(psi(static_cast<Eigen::Index>(w ^ p.x))) * phase * sgn * amp;
  }
  return acc;
}

inline rks::SparseState dense_to_sparse(const Eigen::VectorXcd& psi, int n) {
  rks::SparseState st;
  st.n_qubits = n;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (std::abs(psi(i)) > 1e-12) {
      st.words.push_back(static_cast<Word>(i));
      st.amps.push_back(psi(i));
    }
  }
  return st;
}

inline Eigen::VectorXcd sparse_to_dense(const rks::SparseState& st) {
  Eigen::VectorXcd psi =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << st.n_qubits));
  for (std::size_t i = 0; i < st.words.size(); ++i)
    psi(static_cast<Eigen::Index>(st.words[i])) = st.amps[i];
  return psi;
}

// Plaquette pattern read straight off the documented link indexing:
// link(x,y,dir) = 2*(y*lx+x)+dir, plaquette (bottom,right,top,left).
struct FlatGeometry {
  int lx, ly;
  int link(int x, int y, int dir) const {
    return 2 * ((((y % ly) + ly) % ly) * lx + (((x % lx) + lx) % lx)) + dir;
  }
  // 0 = clockwise (1,1,0,0), 1 = anticlockwise (0,0,1,1), -1 = inactive.
  int plaquette_pattern(Word w, int px, int py) const {
    int b = static_cast<int>((w >> link(px, py, 0)) & 1);
    int r = static_cast<int>((w >> link(px + 1, py, 1)) & 1);
    int t = static_cast<int>((w >> link(px, py + 1, 0)) & 1);
    int l = static_cast<int>((w >> link(px, py, 1)) & 1);
    if (b == 1 && r == 1 && t == 0 && l == 0) return 0;
    if (b == 0 && r == 0 && t == 1 && l == 1) return 1;
    return -1;
  }
  Word flip(Word w, int px, int py) const {
    Word m = (Word{1} << link(px, py, 0)) | (Word{1} << link(px + 1, py, 1)) |
             (Word{1} << link(px, py + 1, 0)) | (Word{1} << link(px, py, 1));
    return w ^ m;
  }
  // Gauss law in bit form: sum of outgoing bits equals sum of incoming bits at
  // every vertex (equivalent to zero divergence for any +-1 spin convention).
  bool gauss_ok(Word w) const {
    for (int y = 0; y < ly; ++y)
      for (int x = 0; x < lx; ++x) {
        int out = static_cast<int>((w >> link(x, y, 0)) & 1) +
                  static_cast<int>((w >> link(x, y, 1)) & 1);
        int in = static_cast<int>((w >> link(x - 1, y, 0)) & 1) +
                 static_cast<int>((w >> link(x, y - 1, 1)) & 1);
        if (out != in) return false;
      }
    return true;
  }
};

// Dense H = O_kin + lambda O_pot assembled from scratch over a sorted config
// list: -1 between flip partners, lambda * (#flippable) on the diagonal.
inline Eigen::MatrixXd dense_hamiltonian(const FlatGeometry& fg, const std::vector<Word>& configs,
                                         double lambda) {
  int dim = static_cast<int>(configs.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  auto index_of = [&](Word w) {
    auto it = std::lower_bound(configs.begin(), configs.end(), w);
    return (it != configs.end() && *it == w) ? static_cast<int>(it - configs.begin()) : -1;
  };
  for (int i = 0; i < dim; ++i) {
    int active = 0;
    for (int py = 0; py < fg.ly; ++py)
      for (int px = 0; px < fg.lx; ++px) {
        if (fg.plaquette_pattern(configs[static_cast<std::size_t>(i)], px, py) < 0) continue;
        ++active;
        int j = index_of(fg.flip(configs[static_cast<std::size_t>(i)], px, py));
        h(i, j) -= 1.0;
      }
    h(i, i) += lambda * active;
  }
  return h;
}

// Random valid canonical form: distinct pivots, generators echelon-reduced
// (pivot = highest bit, other pivots excluded), x0 clear of all pivots.
inline rks::CanonicalStabilizerForm random_form(std::mt19937& rng, int n, int k) {
  std::set<int> pivset;
  while (static_cast<int>(pivset.size()) < k) pivset.insert(static_cast<int>(rng() % n));
  std::vector<int> pivots(pivset.begin(), pivset.end());  // ascending
  Word pivmask = 0;
  for (int p : pivots) pivmask = rks::set_bit(pivmask, p);
  rks::CanonicalStabilizerForm f;
  f.n_qubits = n;
  for (int i = 0; i < k; ++i) {
    Word below = (pivots[static_cast<std::size_t>(i)] == 0)
                     ? 0
                     : ((Word{1} << pivots[static_cast<std::size_t>(i)]) - 1);
    Word extra = (static_cast<Word>(rng()) & below) & ~pivmask;
    f.generators.push_back(rks::set_bit(extra, pivots[static_cast<std::size_t>(i)]));
    f.m.push_back(static_cast<int>(rng() % 4));
  }
  f.x0 = (static_cast<Word>(rng()) & ((Word{1} << n) - 1)) & ~pivmask;
  f.b_rows.assign(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (rng() & 1)
        f.b_rows[static_cast<std::size_t>(i)] = rks::set_bit(f.b_rows[static_cast<std::size_t>(i)], j);
  return f;
}

inline rks::CliffordCircuit random_circuit(std::mt19937& rng, int n, int n_gates) {
  rks::CliffordCircuit c;
  c.n_qubits = n;
  for (int gi = 0; gi < n_gates; ++gi) {
    int kind = static_cast<int>(rng() % 7);
    int a = static_cast<int>(rng() % static_cast<unsigned>(n));
    if (kind >= 5 && n == 1) kind = static_cast<int>(rng() % 5);
    switch (kind) {
      case 0: c.x(a); break;
      case 1: c.h(a); break;
      case 2: c.z(a); break;
      case 3: c.s(a); break;
      case 4: c.sdg(a); break;
      default: {
        int b = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        if (b >= a) ++b;
        if (kind == 5) c.cnot(a, b); else c.cz(a, b);
      }
    }
  }
  return c;
}

}  // namespace testor
