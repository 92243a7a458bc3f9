#include "rks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rks/bits.hpp"
#include "rks/parallel.hpp"

namespace rks {

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kSreClip = 1e-10;
constexpr double kFlatnessClip = 1e-12;
constexpr double kPurityTol = 1e-8;

void require_normalized(const SparseState& state, const char* where) {
  const double nrm = state.norm();
  if (std::abs(nrm - 1.0) > kNormTol) {
    std::ostringstream msg;
    msg << where << ": state must be normalized (|norm-1| = " << std::abs(nrm - 1.0) << ")";
    throw std::invalid_argument(msg.str());
  }
}

// --- stabilizer Renyi entropy ----------------------------------------------

// Accumulates sum_b |f(b)|^2 and |f(b)|^{2*order} for one displacement class
// a, where f(b) = sum_x (-1)^{b.x} g(x) and g is supported on `xs`.
// Small classes are evaluated term by term; dense classes go through an
// in-place fast Walsh-Hadamard transform of length 2^n.
template <typename Scalar>
void displacement_sums(int n, const std::vector<Word>& xs, const std::vector<Scalar>& gs, int order,
                       double& out_pow, double& out_purity) {
  const std::size_t full = std::size_t{1} << n;
  double sum_pow = 0.0, sum_purity = 0.0;
  const auto accumulate = [&](Scalar f) {
    double mag2;
    if constexpr (std::is_same_v<Scalar, double>) {
      mag2 = f * f;
    } else {
      mag2 = std::norm(f);
    }
    sum_purity += mag2;
    sum_pow += order == 2 ? mag2 * mag2 : std::pow(mag2, order);
  };
  if (xs.size() <= static_cast<std::size_t>(n)) {
    for (std::size_t b = 0; b < full; ++b) {
      Scalar f{};
      for (std::size_t k = 0; k < xs.size(); ++k)
        f += bit_parity(static_cast<Word>(b) & xs[k]) ? -gs[k] : gs[k];
      accumulate(f);
    }
  } else {
    thread_local std::vector<Scalar> buf;
    buf.assign(full, Scalar{});
    for (std::size_t k = 0; k < xs.size(); ++k) buf[xs[k]] += gs[k];
    for (std::size_t len = 1; len < full; len <<= 1) {
      for (std::size_t i = 0; i < full; i += len << 1) {
        for (std::size_t j = i; j < i + len; ++j) {
          const Scalar u = buf[j], v = buf[j + len];
          buf[j] = u + v;
          buf[j + len] = u - v;
        }
      }
    }
    for (std::size_t b = 0; b < full; ++b) accumulate(buf[b]);
  }
  out_pow = sum_pow;
  out_purity = sum_purity;
}

template <typename Scalar>
Scalar displaced_product(Complex lhs, Complex rhs);  // conj(amp(x^a)) * amp(x)

template <>
double displaced_product<double>(Complex lhs, Complex rhs) {
  return lhs.real() * rhs.real();
}

template <>
Complex displaced_product<Complex>(Complex lhs, Complex rhs) {
  return std::conj(lhs) * rhs;
}

template <typename Scalar>
double sre_support_restricted(const SparseState& state, int order, int threads) {
  const int n = state.n_qubits;
  const std::size_t full = std::size_t{1} << n;
  const std::size_t s = state.words.size();

  std::vector<char> member(full, 0);
  for (Word w : state.words) member[w] = 1;

  // Distinct displacements between support elements; every other Pauli
  // x-mask has a vanishing expectation value.
  std::vector<char> seen(full, 0);
  std::vector<Word> displacements;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      const Word d = state.words[i] ^ state.words[j];
      if (!seen[d]) {
        seen[d] = 1;
        displacements.push_back(d);
      }
    }
  }
  std::sort(displacements.begin(), displacements.end());

  std::vector<double> pow_part(displacements.size(), 0.0);
  std::vector<double> purity_part(displacements.size(), 0.0);
  parallel_for(displacements.size(), threads, [&](std::size_t idx) {
    const Word a = displacements[idx];
    std::vector<Word> xs;
    std::vector<Scalar> gs;
    for (std::size_t k = 0; k < s; ++k) {
      const Word x = state.words[k];
      const Word y = x ^ a;
      if (!member[y]) continue;
      const std::ptrdiff_t pos = state.find(y);
      xs.push_back(x);
      gs.push_back(displaced_product<Scalar>(state.amps[static_cast<std::size_t>(pos)], state.amps[k]));
    }
    displacement_sums(n, xs, gs, order, pow_part[idx], purity_part[idx]);
  });

  long double sum_pow = 0.0L, sum_purity = 0.0L;
  for (std::size_t idx = 0; idx < displacements.size(); ++idx) {
    sum_pow += pow_part[idx];
    sum_purity += purity_part[idx];
  }
  const double scale = static_cast<double>(full);
  const double purity = static_cast<double>(sum_purity) / scale;
  if (std::abs(purity - 1.0) > kPurityTol) {
    std::ostringstream msg;
    msg << "stabilizer_renyi_entropy: Pauli purity identity violated (sum <P>^2 / 2^N = " << purity
        << ")";
    throw std::logic_error(msg.str());
  }
  return std::log(static_cast<double>(sum_pow) / scale) / (1.0 - order);
}

double sre_direct(const SparseState& state, int order, int threads) {
  const int n = state.n_qubits;
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> pow_part(full, 0.0);
  std::vector<double> purity_part(full, 0.0);
  parallel_for(full, threads, [&](std::size_t xa) {
    double sp = 0.0, s2 = 0.0;
    for (std::size_t zb = 0; zb < full; ++zb) {
      const double e = pauli_expectation(state, PauliString{static_cast<Word>(xa), static_cast<Word>(zb)});
      const double e2 = e * e;
      s2 += e2;
      sp += order == 2 ? e2 * e2 : std::pow(e2, order);
    }
    pow_part[xa] = sp;
    purity_part[xa] = s2;
  });
  long double sum_pow = 0.0L, sum_purity = 0.0L;
  for (std::size_t xa = 0; xa < full; ++xa) {
    sum_pow += pow_part[xa];
    sum_purity += purity_part[xa];
  }
  const double scale = static_cast<double>(full);
  const double purity = static_cast<double>(sum_purity) / scale;
  if (std::abs(purity - 1.0) > kPurityTol)
    throw std::logic_error("stabilizer_renyi_entropy: Pauli purity identity violated in direct sum");
  return std::log(static_cast<double>(sum_pow) / scale) / (1.0 - order);
}

double clip_small_negative(double value, double clip, const char* what) {
  if (value >= 0.0) return value;
  if (value >= -clip) return 0.0;
  std::ostringstream msg;
  msg << what << " evaluated to " << value << ", below the -" << clip << " round-off budget";
  throw std::logic_error(msg.str());
}

// --- entanglement entropy ---------------------------------------------------

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<int> mask_positions(Word mask) {
  std::vector<int> pos;
  for (int j = 0; j < 64; ++j)
    if (test_bit(mask, j)) pos.push_back(j);
  return pos;
}

Word compress_bits(Word w, const std::vector<int>& pos) {
  Word key = 0;
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (test_bit(w, pos[k])) key = set_bit(key, static_cast<int>(k));
  return key;
}

// Entropy contribution of one connected block of the coefficient matrix.
template <typename Scalar>
double block_entropy(int nr, int nc, const std::vector<int>& rows, const std::vector<int>& cols,
                     const std::vector<Scalar>& vals) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = Mat::Zero(nr, nc);
  for (std::size_t k = 0; k < vals.size(); ++k) m(rows[k], cols[k]) += vals[k];
  Mat gram = nr <= nc ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat> solver(gram, Eigen::EigenvaluesOnly);
  double s = 0.0;
  const auto& evals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    const double p = evals[i];
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

template <typename Scalar>
double entanglement_entropy_impl(const SparseState& state, Word mask_a, Word mask_b) {
  const std::vector<int> pos_a = mask_positions(mask_a);
  const std::vector<int> pos_b = mask_positions(mask_b);
  const std::size_t s = state.words.size();

  std::vector<int> row_of(s), col_of(s);
  std::unordered_map<Word, int> row_ids, col_ids;
  for (std::size_t k = 0; k < s; ++k) {
    const Word rk = compress_bits(state.words[k], pos_a);
    const Word ck = compress_bits(state.words[k], pos_b);
    auto [rit, rnew] = row_ids.try_emplace(rk, static_cast<int>(row_ids.size()));
    auto [cit, cnew] = col_ids.try_emplace(ck, static_cast<int>(col_ids.size()));
    row_of[k] = rit->second;
    col_of[k] = cit->second;
  }

  const int nr = static_cast<int>(row_ids.size());
  const int nc = static_cast<int>(col_ids.size());
  Dsu dsu(nr + nc);
  for (std::size_t k = 0; k < s; ++k) dsu.unite(row_of[k], nr + col_of[k]);

  // Group support entries by connected component, in first-appearance order.
  std::unordered_map<int, int> comp_of_root;
  std::vector<std::vector<std::size_t>> comp_entries;
  for (std::size_t k = 0; k < s; ++k) {
    const int root = dsu.find(row_of[k]);
    auto [it, inserted] = comp_of_root.try_emplace(root, static_cast<int>(comp_entries.size()));
    if (inserted) comp_entries.emplace_back();
    comp_entries[it->second].push_back(k);
  }

  double total = 0.0;
  for (const auto& entries : comp_entries) {
    std::unordered_map<int, int> local_rows, local_cols;
    std::vector<int> rows, cols;
    std::vector<Scalar> vals;
    rows.reserve(entries.size());
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k : entries) {
      auto [rit, rn] = local_rows.try_emplace(row_of[k], static_cast<int>(local_rows.size()));
      auto [cit, cn] = local_cols.try_emplace(col_of[k], static_cast<int>(local_cols.size()));
      rows.push_back(rit->second);
      cols.push_back(cit->second);
      if constexpr (std::is_same_v<Scalar, double>) {
        vals.push_back(state.amps[k].real());
      } else {
        vals.push_back(state.amps[k]);
      }
    }
    total += block_entropy<Scalar>(static_cast<int>(local_rows.size()),
                                   static_cast<int>(local_cols.size()), rows, cols, vals);
  }
  return total;
}

// --- report helpers ---------------------------------------------------------

double quadratic_form(const SectorOperator& op, const Eigen::VectorXd& v) {
  return v.dot(op.apply(v));
}

double quadratic_form(const SectorOperator& op, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = v.real();
  const Eigen::VectorXd im = v.imag();
  return re.dot(op.apply(re)) + im.dot(op.apply(im));
}

SparseState column_state(const GaugeSector& sector, const Eigen::VectorXd& v) {
  return sector_state(sector, v).pruned(1e-14);
}

SparseState column_state(const GaugeSector& sector, const Eigen::VectorXcd& v) {
  return sector_state(sector, v).pruned(1e-14);
}

template <typename Matrix>
std::vector<ReportRow> report_impl(const GaugeSector& sector, const Eigen::VectorXd& energies,
                                   const Matrix& basis, const Bipartition& cut, bool sre_enabled,
                                   int threads) {
  if (basis.rows() != static_cast<Eigen::Index>(sector.dim()) || basis.cols() != energies.size())
    throw std::invalid_argument("spectrum_report: basis shape does not match sector/energies");
  const SectorOperator kin = build_kinetic(sector);
  const SectorOperator pot_even = build_potential(sector, PotentialParity::Even);
  const SectorOperator pot_odd = build_potential(sector, PotentialParity::Odd);
  const bool do_sre = sre_enabled && sector.geometry.num_links() <= 16;

  std::vector<ReportRow> rows(static_cast<std::size_t>(basis.cols()));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const auto col = basis.col(static_cast<Eigen::Index>(i)).eval();
    ReportRow& row = rows[i];
    row.index = static_cast<int>(i);
    row.energy = energies[static_cast<Eigen::Index>(i)];
    row.kin = quadratic_form(kin, col);
    row.pot_even = quadratic_form(pot_even, col);
    row.pot_odd = quadratic_form(pot_odd, col);
    row.flatness = multifractal_flatness(col);
    const SparseState st = column_state(sector, col);
    row.svn = entanglement_entropy(st, cut);
    if (do_sre) {
      row.has_m2 = true;
      row.m2 = stabilizer_renyi_entropy(st, 2, SreStrategy::Auto, 1);
    }
  });
  return rows;
}

template <typename Vec>
double flatness_impl(const Vec& amplitudes) {
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) total += std::norm(Complex(amplitudes[i]));
  if (total <= 0.0L) throw std::invalid_argument("multifractal_flatness: zero vector");
  long double p2 = 0.0L, p3 = 0.0L;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    const long double p = std::norm(Complex(amplitudes[i])) / total;
    p2 += p * p;
    p3 += p * p * p;
  }
  return clip_small_negative(static_cast<double>(p3 - p2 * p2), kFlatnessClip,
                             "multifractal_flatness");
}

}  // namespace

double stabilizer_renyi_entropy(const SparseState& state, int order, SreStrategy strategy,
                                int threads) {
  if (order < 2) throw std::invalid_argument("stabilizer_renyi_entropy: order must be >= 2");
  if (state.n_qubits < 1) throw std::invalid_argument("stabilizer_renyi_entropy: empty register");
  require_normalized(state, "stabilizer_renyi_entropy");

  SreStrategy chosen = strategy;
  if (chosen == SreStrategy::Auto) {
    if (state.n_qubits > 16) {
      std::ostringstream msg;
      msg << "stabilizer_renyi_entropy: exact evaluation is limited to 16 qubits (got "
          << state.n_qubits << "); restrict the state to a smaller register or skip the SRE column";
      throw std::invalid_argument(msg.str());
    }
    chosen = SreStrategy::SupportRestricted;
  }

  double raw = 0.0;
  if (chosen == SreStrategy::Direct) {
    if (state.n_qubits > 8)
      throw std::invalid_argument("stabilizer_renyi_entropy: Direct strategy is limited to 8 qubits");
    raw = sre_direct(state, order, threads);
  } else {
    if (state.n_qubits > 16)
      throw std::invalid_argument(
          "stabilizer_renyi_entropy: SupportRestricted strategy is limited to 16 qubits");
    raw = state.is_real() ? sre_support_restricted<double>(state, order, threads)
                          : sre_support_restricted<Complex>(state, order, threads);
  }
  return clip_small_negative(raw, kSreClip, "stabilizer_renyi_entropy");
}

double multifractal_flatness(const Eigen::VectorXcd& amplitudes) { return flatness_impl(amplitudes); }

double multifractal_flatness(const Eigen::VectorXd& amplitudes) { return flatness_impl(amplitudes); }

Bipartition half_system_cut(const LatticeGeometry& geom) {
  Bipartition cut;
  for (int x = 0; x < geom.lx / 2; ++x)
    for (int y = 0; y < geom.ly; ++y)
      for (int dir = 0; dir < 2; ++dir) cut.mask_a = set_bit(cut.mask_a, geom.link_index(x, y, dir));
  return cut;
}

double entanglement_entropy(const SparseState& state, const Bipartition& cut) {
  const int n = state.n_qubits;
  if (n < 2 || n > 63) throw std::invalid_argument("entanglement_entropy: need 2..63 qubits");
  const Word full = (Word{1} << n) - 1;
  const Word mask_a = cut.mask_a & full;
  const Word mask_b = full & ~mask_a;
  if (mask_a == 0 || mask_b == 0)
    throw std::invalid_argument("entanglement_entropy: bipartition must split the register");
  require_normalized(state, "entanglement_entropy");
  if (state.words.empty()) throw std::invalid_argument("entanglement_entropy: empty state");
  return state.is_real() ? entanglement_entropy_impl<double>(state, mask_a, mask_b)
                         : entanglement_entropy_impl<Complex>(state, mask_a, mask_b);
}

std::vector<ReportRow> spectrum_report(const GaugeSector& sector, const Eigen::VectorXd& energies,
                                       const Eigen::MatrixXcd& basis, const Bipartition& cut,
                                       bool sre_enabled, int threads) {
  return report_impl(sector, energies, basis, cut, sre_enabled, threads);
}

std::vector<ReportRow> spectrum_report(const GaugeSector& sector, const Spectrum& spec,
                                       const Bipartition& cut, bool sre_enabled, int threads) {
  return report_impl(sector, spec.eigenvalues, spec.eigenvectors, cut, sre_enabled, threads);
}

}  // namespace rks
