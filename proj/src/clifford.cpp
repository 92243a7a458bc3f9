#include "rks/clifford.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rks {

namespace {

using nlohmann::json;

bool two_qubit(GateKind kind) { return kind == GateKind::Cnot || kind == GateKind::Cz; }

}  // namespace

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "x";
    case GateKind::H: return "h";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::Cnot: return "cx";
    case GateKind::Cz: return "cz";
  }
  throw std::logic_error("unknown gate kind");
}

int CliffordCircuit::count(GateKind kind) const {
  return static_cast<int>(std::count_if(gates.begin(), gates.end(),
                                        [kind](const Gate& g) { return g.kind == kind; }));
}

void validate_circuit(const CliffordCircuit& c) {
  if (c.n_qubits < 1 || c.n_qubits > 64) {
    throw std::invalid_argument("circuit must act on 1..64 qubits");
  }
  for (const Gate& g : c.gates) {
    if (g.a < 0 || g.a >= c.n_qubits) throw std::invalid_argument("gate qubit out of range");
    if (two_qubit(g.kind)) {
      if (g.b < 0 || g.b >= c.n_qubits) throw std::invalid_argument("gate qubit out of range");
      if (g.a == g.b) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
  }
}

CliffordCircuit synthesize_two_branch(Word b0, Word b1, int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("qubit count out of range");
  Word mask = n == 64 ? ~Word{0} : (Word{1} << n) - 1;
  if ((b0 | b1) & ~mask) throw std::invalid_argument("branch word exceeds qubit count");
  Word diff = b0 ^ b1;
  if (diff == 0) throw std::invalid_argument("branch words must differ");
  // Pivot: lowest differing bit where the first branch is 0; if the first
  // branch is 1 on all of them, swapping branches only flips the global sign.
  if ((diff & ~b0) == 0) std::swap(b0, b1);
  int pivot = std::countr_zero(diff & ~b0);

  CliffordCircuit c;
  c.n_qubits = n;
  for (int j = 0; j < n; ++j) {
    if (test_bit(b0, j)) c.x(j);
  }
  c.h(pivot);
  for (int j = 0; j < n; ++j) {
    if (j != pivot && test_bit(diff, j)) c.cnot(pivot, j);
  }
  c.z(pivot);
  return c;
}

CliffordCircuit synthesize_from_canonical_form(const CanonicalStabilizerForm& form) {
  int k = form.k();
  CliffordCircuit c;
  c.n_qubits = form.n_qubits;
  for (int i = 0; i < k; ++i) c.h(form.pivot_bit(i));
  for (int i = 0; i < k; ++i) {
    int reps = ((form.m[static_cast<std::size_t>(i)] % 4) + 4) % 4;
    for (int rep = 0; rep < reps; ++rep) c.s(form.pivot_bit(i));
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (test_bit(form.b_rows[static_cast<std::size_t>(i)], j)) {
        c.cz(form.pivot_bit(i), form.pivot_bit(j));
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    Word rest = form.generators[static_cast<std::size_t>(i)] & ~set_bit(0, form.pivot_bit(i));
    for (int j = 0; j < form.n_qubits; ++j) {
      if (test_bit(rest, j)) c.cnot(form.pivot_bit(i), j);
    }
  }
  for (int j = 0; j < form.n_qubits; ++j) {
    if (test_bit(form.x0, j)) c.x(j);
  }
  return c;
}

PauliString StabilizerTableau::stabilizer(int i) const {
  std::size_t row = static_cast<std::size_t>(n + i);
  return PauliString{x_bits[row], z_bits[row]};
}

StabilizerTableau simulate(const CliffordCircuit& c) {
  validate_circuit(c);
  StabilizerTableau t;
  t.n = c.n_qubits;
  std::size_t rows = static_cast<std::size_t>(2 * t.n);
  t.x_bits.assign(rows, 0);
  t.z_bits.assign(rows, 0);
  t.r.assign(rows, 0);
  for (int i = 0; i < t.n; ++i) {
    t.x_bits[static_cast<std::size_t>(i)] = set_bit(0, i);          // destabilizer X_i
    t.z_bits[static_cast<std::size_t>(t.n + i)] = set_bit(0, i);    // stabilizer Z_i
  }
  for (const Gate& g : c.gates) {
    for (std::size_t row = 0; row < rows; ++row) {
      Word& x = t.x_bits[row];
      Word& z = t.z_bits[row];
      int& r = t.r[row];
      Word xa = test_bit(x, g.a), za = test_bit(z, g.a);
      switch (g.kind) {
        case GateKind::X:
          r ^= static_cast<int>(za);
          break;
        case GateKind::Z:
          r ^= static_cast<int>(xa);
          break;
        case GateKind::H:
          r ^= static_cast<int>(xa & za);
          x ^= (xa ^ za) << g.a;
          z ^= (xa ^ za) << g.a;
          break;
        case GateKind::S:
          r ^= static_cast<int>(xa & za);
          z ^= xa << g.a;
          break;
        case GateKind::Sdg:
          r ^= static_cast<int>(xa & (za ^ 1));
          z ^= xa << g.a;
          break;
        case GateKind::Cnot: {
          Word xb = test_bit(x, g.b), zb = test_bit(z, g.b);
          r ^= static_cast<int>(xa & zb & (xb ^ za ^ 1));
          x ^= xa << g.b;
          z ^= zb << g.a;
          break;
        }
        case GateKind::Cz: {
          Word xb = test_bit(x, g.b), zb = test_bit(z, g.b);
          r ^= static_cast<int>(xa & xb & (za ^ zb));
          z ^= xb << g.a;
          z ^= xa << g.b;
          break;
        }
      }
    }
  }
  return t;
}

VerifyReport verify_preparation(const StabilizerTableau& t, const SparseState& target,
                                double tol) {
  if (target.n_qubits != t.n) throw std::invalid_argument("qubit count mismatch");
  VerifyReport rep;
  rep.pass = true;
  rep.expectations.reserve(static_cast<std::size_t>(t.n));
  for (int i = 0; i < t.n; ++i) {
    double e = t.stabilizer_sign(i) * pauli_expectation(target, t.stabilizer(i));
    rep.expectations.push_back(e);
    if (std::abs(e - 1.0) > tol) rep.pass = false;
  }
  return rep;
}

std::string export_qasm(const CliffordCircuit& c) {
  validate_circuit(c);
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.n_qubits << "];\n";
  for (const Gate& g : c.gates) {
    out << to_string(g.kind) << " q[" << g.a << "]";
    if (two_qubit(g.kind)) out << ",q[" << g.b << "]";
    out << ";\n";
  }
  return out.str();
}

std::string circuit_to_json(const CliffordCircuit& c) {
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json jg;
    jg["g"] = to_string(g.kind);
    if (g.kind == GateKind::Cnot) {
      jg["c"] = g.a;
      jg["t"] = g.b;
    } else if (g.kind == GateKind::Cz) {
      jg["a"] = g.a;
      jg["b"] = g.b;
    } else {
      jg["q"] = g.a;
    }
    gates.push_back(jg);
  }
  json j;
  j["n"] = c.n_qubits;
  j["gates"] = gates;
  return j.dump(2);
}

CliffordCircuit circuit_from_json(const std::string& text) {
  json j = json::parse(text);
  CliffordCircuit c;
  c.n_qubits = j.at("n").get<int>();
  for (const json& jg : j.at("gates")) {
    std::string name = jg.at("g").get<std::string>();
    Gate g;
    if (name == "x") g.kind = GateKind::X;
    else if (name == "h") g.kind = GateKind::H;
    else if (name == "z") g.kind = GateKind::Z;
    else if (name == "s") g.kind = GateKind::S;
    else if (name == "sdg") g.kind = GateKind::Sdg;
    else if (name == "cx") g.kind = GateKind::Cnot;
    else if (name == "cz") g.kind = GateKind::Cz;
    else throw std::invalid_argument("unknown gate name: " + name);
    if (g.kind == GateKind::Cnot) {
      g.a = jg.at("c").get<int>();
      g.b = jg.at("t").get<int>();
    } else if (g.kind == GateKind::Cz) {
      g.a = jg.at("a").get<int>();
      g.b = jg.at("b").get<int>();
    } else {
      g.a = jg.at("q").get<int>();
    }
    c.gates.push_back(g);
  }
  validate_circuit(c);
  return c;
}

}  // namespace rks
