#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rks/clifford.hpp"
#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/scar_search.hpp"
#include "rks/singlet.hpp"
#include "rks/stabilizer_form.hpp"

using namespace rks;
using testor::C;

TEST_CASE("tableau stabilizers stabilize the dense statevector") {
  std::mt19937 rng(20240823);
  int n_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto c = testor::random_circuit(rng, n, 1 + static_cast<int>(rng() % 40));
    StabilizerTableau t = simulate(c);
    Eigen::VectorXcd psi = testor::dense_sim(c);
    for (int i = 0; i < n; ++i) {
      C e = static_cast<double>(t.stabilizer_sign(i)) * testor::dense_pauli_exp(psi, t.stabilizer(i), n);
      CHECK(std::abs(e - 1.0) < 1e-10);
      ++n_checked;
    }
    // destabilizer row i anticommutes with stabilizer i only
    if (trial % 23 == 0) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          PauliString d{t.x_bits[static_cast<std::size_t>(i)], t.z_bits[static_cast<std::size_t>(i)]};
          PauliString s = t.stabilizer(j);
          int anti = bit_parity(d.x & s.z) ^ bit_parity(d.z & s.x);
          CHECK(anti == (i == j ? 1 : 0));
        }
    }
    VerifyReport rep = verify_preparation(t, testor::dense_to_sparse(psi, n));
    CHECK(rep.pass);
    REQUIRE(static_cast<int>(rep.expectations.size()) == n);
  }
  CHECK(n_checked > 500);
}

TEST_CASE("verify_preparation rejects the wrong target") {
  CliffordCircuit c;
  c.n_qubits = 2;
  c.h(0);
  c.cnot(0, 1);
  auto t = simulate(c);
  auto good = testor::dense_to_sparse(testor::dense_sim(c), 2);
  CHECK(verify_preparation(t, good).pass);
  auto bad = make_fock_state(2, 0b01);
  auto rep = verify_preparation(t, bad);
  CHECK(!rep.pass);
  bool some_off = false;
  for (double e : rep.expectations) some_off |= std::abs(e - 1.0) > 1e-9;
  CHECK(some_off);
}

TEST_CASE("two-branch circuits prepare (|b0> - |b1>)/sqrt(2) exactly") {
  std::mt19937 rng(91);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    Word lim = Word{1} << n;
    Word b0 = rng() % lim, b1 = rng() % lim;
    if (b0 == b1) b1 = (b1 + 1) % lim;
    auto c = synthesize_two_branch(b0, b1, n);
    validate_circuit(c);
    Eigen::VectorXcd psi = testor::dense_sim(c);
    const double r = 1 / std::sqrt(2.0);
    // support {b0, b1}, equal weight, opposite sign, real amplitudes
    for (Word w = 0; w < lim; ++w) {
      double a = std::abs(psi(static_cast<Eigen::Index>(w)));
      if (w == b0 || w == b1) {
        CHECK(a == doctest::Approx(r).epsilon(1e-12));
        CHECK(std::abs(psi(static_cast<Eigen::Index>(w)).imag()) < 1e-14);
      } else {
        CHECK(a < 1e-14);
      }
    }
    C rel = psi(static_cast<Eigen::Index>(b0)) + psi(static_cast<Eigen::Index>(b1));
    CHECK(std::abs(rel) < 1e-12);
    // global phase: +1 on the branch holding a 0 at the pivot
    CHECK(psi(static_cast<Eigen::Index>(b0)).real() * psi(static_cast<Eigen::Index>(b1)).real() <
          0.0);
  }
}

TEST_CASE("2x2 scar: two-branch layout and exact preparation") {
  auto sector = enumerate_gauge_sector(build_geometry(2, 2));
  auto spec = diagonalize(build_hamiltonian(sector, 1.0));
  auto scan = scan_all(sector, spec);
  REQUIRE(scan.scars.size() == 2);
  for (const auto& sc : scan.scars) {
    const auto& st = sc.state;
    REQUIRE(st.support_size() == 2);
    auto two = synthesize_two_branch(st.words[0], st.words[1], st.n_qubits);
    // branch words are bitwise complements: X writes one branch, one H opens
    // the superposition, CNOTs copy it to the other seven links, Z signs it
    CHECK(two.count(GateKind::X) == 4);
    CHECK(two.count(GateKind::H) == 1);
    CHECK(two.count(GateKind::Cnot) == 7);
    CHECK(two.count(GateKind::Z) == 1);
    auto rep = verify_preparation(simulate(two), st);
    CHECK(rep.pass);
    for (double e : rep.expectations) CHECK(std::abs(e - 1.0) < 1e-9);
    // dense amplitudes agree including the global phase
    Eigen::VectorXcd psi = testor::dense_sim(two);
    for (int i = 0; i < st.support_size(); ++i)
      CHECK(std::abs(psi(static_cast<Eigen::Index>(st.words[static_cast<std::size_t>(i)])) -
                     st.amps[static_cast<std::size_t>(i)]) < 1e-12);
  }
}

TEST_CASE("canonical-form synthesis is exact on random forms and real scars") {
  std::mt19937 rng(92);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);
    // reuse the library round-trip: random stabilizer state from a circuit
    auto circ = testor::random_circuit(rng, n, 25);
    auto st = testor::dense_to_sparse(testor::dense_sim(circ), n);
    auto res = extract_canonical_form(st);
    REQUIRE(is_stabilizer(res));
    const auto& form = std::get<CanonicalStabilizerForm>(res);
    auto prep = synthesize_from_canonical_form(form);
    validate_circuit(prep);
    Eigen::VectorXcd psi = testor::dense_sim(prep);
    auto target = synthesize_state(form);
    double dev = 0.0;
    for (int i = 0; i < target.support_size(); ++i)
      dev = std::max(dev, std::abs(psi(static_cast<Eigen::Index>(
                                       target.words[static_cast<std::size_t>(i)])) -
                                   target.amps[static_cast<std::size_t>(i)]));
    CHECK(dev < 1e-12);
    CHECK(verify_preparation(simulate(prep), target).pass);
  }
  // 4x2 scars go through the canonical route
  auto sector = enumerate_gauge_sector(build_geometry(4, 2));
  auto spec = diagonalize(build_hamiltonian(sector, 1.0));
  auto scan = scan_all(sector, spec);
  for (const auto& sc : scan.scars) {
    REQUIRE(sc.form.has_value());
    auto prep = synthesize_from_canonical_form(*sc.form);
    auto rep = verify_preparation(simulate(prep), sc.state);
    CHECK(rep.pass);
    // gate-count identities of the synthesis layout
    const auto& f = *sc.form;
    int cnot_expect = 0;
    for (Word gen : f.generators) cnot_expect += popcount(gen) - 1;
    int bsum = 0;
    for (std::size_t i = 0; i < f.b_rows.size(); ++i)
      bsum += popcount(f.b_rows[i] >> (i + 1));
    CHECK(prep.count(GateKind::H) == f.k());
    CHECK(prep.count(GateKind::Cnot) == cnot_expect);
    CHECK(prep.count(GateKind::X) == popcount(f.x0));
    CHECK(prep.count(GateKind::Cz) == bsum);
  }
}

TEST_CASE("parallel two-branch blocks prepare 4x2 singlet products") {
  auto g = build_geometry(4, 2);
  auto sector = enumerate_gauge_sector(g);
  auto set = build_sublattice_config_set(sector, PotentialParity::Even);
  int prepared = 0;
  for (const auto& pr : enumerate_pairings(set)) {
    auto built = build_singlet_state(set, pr);
    REQUIRE(is_valid_singlet(built));
    const auto& target = std::get<SparseState>(built);
    CliffordCircuit par;
    par.n_qubits = target.n_qubits;
    Word covered = 0;
    for (auto [p, q] : pr.pairs) {
      auto plp = g.plaquette_links(p);
      auto plq = g.plaquette_links(q);
      Word mask = 0;
      for (int l : {plp.bottom, plp.right, plp.top, plp.left, plq.bottom, plq.right, plq.top,
                    plq.left})
        mask = set_bit(mask, l);
      REQUIRE((covered & mask) == 0);  // per-dimer supports stay disjoint at 4x2
      covered |= mask;
      Word bCA =
          set_bit(set_bit(set_bit(set_bit(Word{0}, plp.bottom), plp.right), plq.top), plq.left);
      Word bAC =
          set_bit(set_bit(set_bit(set_bit(Word{0}, plp.top), plp.left), plq.bottom), plq.right);
      auto blk = synthesize_two_branch(bCA, bAC, target.n_qubits);
      for (const Gate& gt : blk.gates) par.gates.push_back(gt);
    }
    auto rep = verify_preparation(simulate(par), target);
    CHECK(rep.pass);
    ++prepared;
  }
  CHECK(prepared == 3);
}

TEST_CASE("circuit validation catches malformed gates") {
  CliffordCircuit c;
  c.n_qubits = 3;
  c.h(0);
  validate_circuit(c);
  c.cnot(1, 1);
  CHECK_THROWS_AS(validate_circuit(c), std::invalid_argument);
  c.gates.pop_back();
  c.x(3);
  CHECK_THROWS_AS(validate_circuit(c), std::invalid_argument);
  c.gates.pop_back();
  c.cz(-1, 0);
  CHECK_THROWS_AS(validate_circuit(c), std::invalid_argument);
}

TEST_CASE("qasm export emits the standard header and one line per gate") {
  CliffordCircuit c;
  c.n_qubits = 3;
  c.x(2);
  c.h(0);
  c.s(1);
  c.sdg(1);
  c.cnot(0, 2);
  c.cz(1, 2);
  c.z(0);
  std::string qasm = export_qasm(c);
  CHECK(qasm ==
        "OPENQASM 2.0;\n"
        "include \"qelib1.inc\";\n"
        "qreg q[3];\n"
        "x q[2];\n"
        "h q[0];\n"
        "s q[1];\n"
        "sdg q[1];\n"
        "cx q[0],q[2];\n"
        "cz q[1],q[2];\n"
        "z q[0];\n");
}

TEST_CASE("circuit json round-trips and rejects junk") {
  std::mt19937 rng(93);
  auto c = testor::random_circuit(rng, 5, 30);
  auto rt = circuit_from_json(circuit_to_json(c));
  REQUIRE(rt.gates.size() == c.gates.size());
  CHECK(rt.n_qubits == c.n_qubits);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    CHECK(rt.gates[i].kind == c.gates[i].kind);
    CHECK(rt.gates[i].a == c.gates[i].a);
    CHECK(rt.gates[i].b == c.gates[i].b);
  }
  CHECK_THROWS(circuit_from_json("{\"n\": 2, \"gates\": [{\"g\": \"toffoli\", \"q\": 0}]}"));
  CHECK_THROWS(circuit_from_json("not json"));
}
