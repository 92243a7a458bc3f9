#include "rks/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rks {

int SparseState::find(Word w) const {
  const auto it = std::lower_bound(words.begin(), words.end(), w);
  if (it == words.end() || *it != w) return -1;
  return static_cast<int>(it - words.begin());
}

Complex SparseState::amp_of(Word w) const {
  const int i = find(w);
  return i < 0 ? Complex{0.0, 0.0} : amps[static_cast<std::size_t>(i)];
}

double SparseState::norm() const {
  double s = 0.0;
  for (const Complex& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

bool SparseState::is_real(double tol) const {
  for (const Complex& a : amps) {
    if (std::abs(a.imag()) > tol) return false;
  }
  return true;
}

void SparseState::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  for (Complex& a : amps) a /= n;
}

SparseState SparseState::pruned(double tol) const {
  SparseState out;
  out.n_qubits = n_qubits;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (std::abs(amps[i]) > tol) {
      out.words.push_back(words[i]);
      out.amps.push_back(amps[i]);
    }
  }
  return out;
}

SparseState make_fock_state(int n_qubits, Word config) {
  return SparseState{n_qubits, {config}, {Complex{1.0, 0.0}}};
}

SparseState sector_state(const GaugeSector& s, const Eigen::VectorXd& amps) {
  if (static_cast<int>(amps.size()) != s.dim()) throw std::invalid_argument("sector/vector dimension mismatch");
  SparseState out;
  out.n_qubits = s.geometry.num_links();
  out.words = s.configs;
  out.amps.resize(s.configs.size());
  for (int i = 0; i < s.dim(); ++i) out.amps[static_cast<std::size_t>(i)] = Complex{amps[i], 0.0};
  return out;
}

SparseState sector_state(const GaugeSector& s, const Eigen::VectorXcd& amps) {
  if (static_cast<int>(amps.size()) != s.dim()) throw std::invalid_argument("sector/vector dimension mismatch");
  SparseState out;
  out.n_qubits = s.geometry.num_links();
  out.words = s.configs;
  out.amps.assign(amps.data(), amps.data() + amps.size());
  return out;
}

Eigen::VectorXcd to_sector_vector(const GaugeSector& s, const SparseState& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.dim());
  for (std::size_t i = 0; i < v.words.size(); ++i) {
    const int j = s.index_of(v.words[i]);
    if (j < 0) throw std::invalid_argument("state support lies outside the gauge sector");
    out[j] = v.amps[i];
  }
  return out;
}

double pauli_expectation(const SparseState& v, PauliString p) {
  // Sum over the support of conj(amp(w^x)) * amp(w) * (-1)^|z&w|.
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < v.words.size(); ++i) {
    const Word w = v.words[i];
    const int j = v.find(w ^ p.x);
    if (j < 0) continue;
    const double sign = bit_parity(w & p.z) ? -1.0 : 1.0;
    acc += std::conj(v.amps[static_cast<std::size_t>(j)]) * v.amps[i] * sign;
  }
  // i^|x&z| from the Hermitian Y convention.
  switch (popcount(p.x & p.z) & 3) {
    case 1: acc *= Complex{0.0, 1.0}; break;
    case 2: acc *= -1.0; break;
    case 3: acc *= Complex{0.0, -1.0}; break;
    default: break;
  }
  if (std::abs(acc.imag()) > 1e-10) {
    throw std::runtime_error("Pauli expectation accumulated a non-Hermitian imaginary part");
  }
  return acc.real();
}

}  // namespace rks
