#pragma once

#include <string>
#include <vector>

#include "rks/bits.hpp"
#include "rks/stabilizer_form.hpp"
#include "rks/state.hpp"

namespace rks {

enum class GateKind { X, H, Z, S, Sdg, Cnot, Cz };

const char* to_string(GateKind kind);

struct Gate {
  GateKind kind = GateKind::X;
  int a = 0;   // qubit for single-qubit gates; control (Cnot) / first endpoint (Cz)
  int b = -1;  // target (Cnot) / second endpoint (Cz)
};

struct CliffordCircuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  void x(int q) { gates.push_back({GateKind::X, q, -1}); }
  void h(int q) { gates.push_back({GateKind::H, q, -1}); }
  void z(int q) { gates.push_back({GateKind::Z, q, -1}); }
  void s(int q) { gates.push_back({GateKind::S, q, -1}); }
  void sdg(int q) { gates.push_back({GateKind::Sdg, q, -1}); }
  void cnot(int c, int t) { gates.push_back({GateKind::Cnot, c, t}); }
  void cz(int a, int b) { gates.push_back({GateKind::Cz, a, b}); }
  int count(GateKind kind) const;
};

// Throws std::invalid_argument on out-of-range qubits or equal two-qubit
// endpoints.
void validate_circuit(const CliffordCircuit& c);

// Two-branch preparation of (|b0> - |b1>)/sqrt(2) up to global phase:
// X layer writing the branch word with a 0 at the pivot, H on the pivot
// (lowest differing bit where that branch is 0), CNOT fan-out from the pivot
// to every other differing bit, Z on the pivot.  When b0 is 1 on every
// differing bit the roles of b0 and b1 swap (global sign only).
CliffordCircuit synthesize_two_branch(Word b0, Word b1, int n);

// General preparation from the canonical form: H on the pivot bits, phase
// layer (S^m on pivots, CZ across B couplings), CNOT fan-out realizing the
// generators on non-pivot bits, X layer writing the base word.  Output equals
// synthesize_state(form) up to (exactly none) global phase.
CliffordCircuit synthesize_from_canonical_form(const CanonicalStabilizerForm& form);

// Aaronson-Gottesman tableau over words: rows 0..n-1 destabilizers, n..2n-1
// stabilizers, each a Hermitian Pauli (-1)^r * prod_j W_j(x_j, z_j) with
// W(1,1) = Y.
struct StabilizerTableau {
  int n = 0;
  std::vector<Word> x_bits;  // 2n rows
  std::vector<Word> z_bits;
  std::vector<int> r;  // sign exponents, 0 or 1

  int sign(int row) const { return r[static_cast<std::size_t>(row)] ? -1 : 1; }
  // Stabilizer row i (0..n-1) as a PauliString plus sign.
  PauliString stabilizer(int i) const;
  int stabilizer_sign(int i) const { return sign(n + i); }
};

// Tableau of circuit|0...0>; per-gate symplectic updates.
StabilizerTableau simulate(const CliffordCircuit& c);

struct VerifyReport {
  bool pass = false;
  std::vector<double> expectations;  // sign * <target|P_i|target> per generator
};

// The n generator expectations determine the state: all equal +1 (within tol)
// iff target is the tableau's stabilizer state.
VerifyReport verify_preparation(const StabilizerTableau& t, const SparseState& target,
                                double tol = 1e-9);

// OPENQASM 2.0, three-line header then one line per gate in list order.
std::string export_qasm(const CliffordCircuit& c);

// {"n": n, "gates": [{"g": "h", "q": 0}, {"g": "cx", "c": 0, "t": 1}, ...]}
std::string circuit_to_json(const CliffordCircuit& c);
CliffordCircuit circuit_from_json(const std::string& text);

}  // namespace rks
