#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "rks/diagnostics.hpp"
#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/state.hpp"

using namespace rks;
using testor::C;

namespace {

SparseState random_sparse(std::mt19937& rng, int n, int support) {
  std::vector<Word> words;
  Word dim = Word{1} << n;
  std::set<Word> used;
  while (static_cast<int>(used.size()) < support) used.insert(rng() % dim);
  SparseState st;
  st.n_qubits = n;
  std::normal_distribution<double> gauss;
  for (Word w : used) {
    st.words.push_back(w);
    st.amps.push_back(C(gauss(rng), gauss(rng)));
  }
  st.normalize();
  return st;
}

// Brute-force sum_P |<P>|^{2q} / 2^n straight from the definition.
double sre_oracle(const SparseState& st, int q) {
  Eigen::VectorXcd psi = testor::sparse_to_dense(st);
  double acc = 0.0;
  Word dim = Word{1} << st.n_qubits;
  for (Word x = 0; x < dim; ++x)
    for (Word z = 0; z < dim; ++z) {
      double e = std::abs(testor::dense_pauli_exp(psi, PauliString{x, z}, st.n_qubits));
      acc += std::pow(e * e, q);
    }
  return -std::log(acc / static_cast<double>(dim)) / (q - 1);
}

// Schmidt-based entropy across an arbitrary link mask.
double svn_oracle(const SparseState& st, Word mask) {
  std::vector<int> abits, bbits;
  for (int j = 0; j < st.n_qubits; ++j) (test_bit(mask, j) ? abits : bbits).push_back(j);
  auto pack = [](Word w, const std::vector<int>& bits) {
    Word r = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (test_bit(w, bits[i])) r = set_bit(r, static_cast<int>(i));
    return r;
  };
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(Eigen::Index{1} << abits.size(),
                                              Eigen::Index{1} << bbits.size());
  for (std::size_t i = 0; i < st.words.size(); ++i)
    A(static_cast<Eigen::Index>(pack(st.words[i], abits)),
      static_cast<Eigen::Index>(pack(st.words[i], bbits))) = st.amps[i];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  double s = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

}  // namespace

TEST_CASE("sre vanishes on stabilizer states and hits the T-state value") {
  // computational basis states and uniform superpositions
  for (Word w : {Word{0}, Word{13}, Word{255}}) {
    auto st = make_fock_state(8, w);
    CHECK(stabilizer_renyi_entropy(st, 2, SreStrategy::Direct) == doctest::Approx(0.0).epsilon(1e-12));
  }
  // random Clifford-circuit outputs are exact stabilizer states
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    auto psi = testor::dense_sim(testor::random_circuit(rng, n, 30));
    auto st = testor::dense_to_sparse(psi, n);
    CHECK(std::abs(stabilizer_renyi_entropy(st, 2, SreStrategy::Direct)) < 1e-10);
    CHECK(std::abs(stabilizer_renyi_entropy(st, 2, SreStrategy::SupportRestricted)) < 1e-10);
  }
  // single-qubit T state: sum <P>^4 = 1 + 2 (1/2)^2 = 3/2, M2 = ln(4/3)
  SparseState t;
  t.n_qubits = 1;
  t.words = {0, 1};
  t.amps = {C(1 / std::sqrt(2.0), 0), std::polar(1 / std::sqrt(2.0), M_PI / 4)};
  CHECK(stabilizer_renyi_entropy(t, 2, SreStrategy::Direct) ==
        doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("sre strategies agree with the brute-force oracle") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);  // up to 5 qubits keeps the 16^n oracle cheap
    auto st = random_sparse(rng, n, 2 + static_cast<int>(rng() % 5));
    for (int q : {2, 3}) {
      double ref = sre_oracle(st, q);
      CHECK(stabilizer_renyi_entropy(st, q, SreStrategy::Direct) ==
            doctest::Approx(ref).epsilon(1e-9));
      CHECK(stabilizer_renyi_entropy(st, q, SreStrategy::SupportRestricted) ==
            doctest::Approx(ref).epsilon(1e-9));
      CHECK(stabilizer_renyi_entropy(st, q, SreStrategy::Auto) ==
            doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("sre strategy limits and normalization contract") {
  auto st = make_fock_state(9, 0);
  CHECK_THROWS_AS(stabilizer_renyi_entropy(st, 2, SreStrategy::Direct), std::invalid_argument);
  auto st17 = make_fock_state(17, 0);
  CHECK_THROWS_AS(stabilizer_renyi_entropy(st17, 2, SreStrategy::SupportRestricted),
                  std::invalid_argument);
  SparseState bad;
  bad.n_qubits = 2;
  bad.words = {0};
  bad.amps = {C(0.5, 0)};
  CHECK_THROWS_AS(stabilizer_renyi_entropy(bad, 2, SreStrategy::Direct), std::invalid_argument);
}

TEST_CASE("sre is threads-invariant") {
  std::mt19937 rng(43);
  auto st = random_sparse(rng, 10, 24);
  double one = stabilizer_renyi_entropy(st, 2, SreStrategy::SupportRestricted, 1);
  double four = stabilizer_renyi_entropy(st, 2, SreStrategy::SupportRestricted, 4);
  CHECK(one == doctest::Approx(four).epsilon(1e-12));
}

TEST_CASE("flatness is zero exactly on uniform distributions") {
  Eigen::VectorXcd v(6);
  std::mt19937 rng(44);
  for (int i = 0; i < 6; ++i) v(i) = std::polar(1.0 / std::sqrt(6.0), 0.37 * i);
  CHECK(multifractal_flatness(v) == doctest::Approx(0.0).epsilon(1e-14));
  // padding with exact zeros keeps it flat on its support
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(10);
  w.head(6) = v;
  CHECK(multifractal_flatness(w) == doctest::Approx(0.0).epsilon(1e-14));
  // any nonuniformity registers
  v(0) *= 1.2;
  v.normalize();
  CHECK(multifractal_flatness(v) > 1e-4);
  // real overload consistent with complex
  Eigen::VectorXd r(4);
  r << 0.5, 0.5, 0.5, 0.5;
  CHECK(multifractal_flatness(r) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("entanglement entropy matches the dense Schmidt oracle") {
  std::mt19937 rng(45);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 6 + static_cast<int>(rng() % 3);
    auto st = random_sparse(rng, n, 3 + static_cast<int>(rng() % 12));
    Word mask = rng() % ((Word{1} << n) - 2) + 1;  // nonempty, proper
    Bipartition cut{mask};
    CHECK(entanglement_entropy(st, cut) == doctest::Approx(svn_oracle(st, mask)).epsilon(1e-9));
  }
  // hand values: product state and a Bell pair
  auto fock = make_fock_state(4, 0b1010);
  CHECK(entanglement_entropy(fock, Bipartition{0b0011}) == doctest::Approx(0.0).epsilon(1e-12));
  SparseState bell;
  bell.n_qubits = 2;
  bell.words = {0b01, 0b10};
  bell.amps = {C(1 / std::sqrt(2.0), 0), C(-1 / std::sqrt(2.0), 0)};
  CHECK(entanglement_entropy(bell, Bipartition{0b01}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(entanglement_entropy(bell, Bipartition{0}), std::invalid_argument);
  CHECK_THROWS_AS(entanglement_entropy(bell, Bipartition{0b11}), std::invalid_argument);
}

TEST_CASE("half-system cut keeps both orientations of the left columns") {
  auto g2 = build_geometry(2, 2);
  CHECK(half_system_cut(g2).mask_a == Word{0b00110011});
  auto g4 = build_geometry(4, 2);
  CHECK(half_system_cut(g4).mask_a == Word{0x0F0F});
  CHECK(popcount(half_system_cut(g4).mask_a) == g4.num_links() / 2);
}

TEST_CASE("spectrum report rows are self-consistent") {
  auto sector = enumerate_gauge_sector(build_geometry(2, 2));
  auto spec = diagonalize(build_hamiltonian(sector, 1.0));
  auto cut = half_system_cut(sector.geometry);
  auto rows = spectrum_report(sector, spec, cut, true);
  REQUIRE(static_cast<int>(rows.size()) == sector.dim());
  auto kin = build_kinetic(sector);
  auto pe = build_potential(sector, PotentialParity::Even);
  auto po = build_potential(sector, PotentialParity::Odd);
  for (int i : {0, 7, 17}) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    CHECK(row.index == i);
    CHECK(row.energy == doctest::Approx(spec.eigenvalues(i)).epsilon(1e-14));
    Eigen::VectorXd v = spec.eigenvectors.col(i);
    CHECK(row.kin == doctest::Approx(expectation(kin, v)).epsilon(1e-11));
    CHECK(row.pot_even == doctest::Approx(expectation(pe, v)).epsilon(1e-11));
    CHECK(row.pot_odd == doctest::Approx(expectation(po, v)).epsilon(1e-11));
    auto st = sector_state(sector, v);
    CHECK(row.flatness == doctest::Approx(multifractal_flatness(v)).epsilon(1e-10));
    CHECK(row.svn == doctest::Approx(entanglement_entropy(st, cut)).epsilon(1e-10));
    REQUIRE(row.has_m2);
    CHECK(row.m2 == doctest::Approx(stabilizer_renyi_entropy(st, 2, SreStrategy::Direct))
                        .epsilon(1e-9));
  }
  // with SRE disabled the m2 column is absent
  auto rows_off = spectrum_report(sector, spec, cut, false);
  for (const auto& row : rows_off) CHECK(!row.has_m2);
}
