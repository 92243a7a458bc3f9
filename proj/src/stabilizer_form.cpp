#include "rks/stabilizer_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rks/bits.hpp"

namespace rks {

namespace {

constexpr double kPhaseTol = 1e-6;  // radians
constexpr double kNormTol = 1e-8;

const Complex kFourthRoots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// Reduced row echelon basis of span{vs} with pivots at highest set bits.
std::vector<Word> rref_basis(std::vector<Word> vs) {
  std::vector<Word> basis;
  for (Word v : vs) {
    for (Word g : basis) {
      if (test_bit(v, highest_bit(g))) v ^= g;
    }
    if (v != 0) basis.push_back(v);
  }
  // Back-substitute so each pivot appears in exactly one generator.
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i != j && test_bit(basis[i], highest_bit(basis[j]))) basis[i] ^= basis[j];
    }
  }
  std::sort(basis.begin(), basis.end(),
            [](Word a, Word b) { return highest_bit(a) < highest_bit(b); });
  return basis;
}

NotStabilizer fail(NotStabilizerReason reason, std::string detail) {
  return NotStabilizer{reason, std::move(detail)};
}

}  // namespace

int CanonicalStabilizerForm::pivot_bit(int i) const { return highest_bit(generators[i]); }

Word CanonicalStabilizerForm::support_word(Word t) const {
  Word x = x0;
  for (int i = 0; i < k(); ++i) {
    if (test_bit(t, i)) x ^= generators[i];
  }
  return x;
}

int CanonicalStabilizerForm::phase_exponent(Word t) const {
  int phi = 0;
  for (int i = 0; i < k(); ++i) {
    if (!test_bit(t, i)) continue;
    phi += m[i];
    phi += 2 * popcount(b_rows[i] & t);  // B_ij with j>i and t_j set
  }
  return phi & 3;
}

void validate_form(const CanonicalStabilizerForm& form) {
  const int k = form.k();
  if (form.n_qubits < 1 || form.n_qubits > 63)
    throw std::invalid_argument("canonical form: n_qubits must be 1..63");
  const Word full = (Word{1} << form.n_qubits) - 1;
  if (form.x0 & ~full) throw std::invalid_argument("canonical form: x0 exceeds register");
  if (static_cast<int>(form.m.size()) != k || static_cast<int>(form.b_rows.size()) != k)
    throw std::invalid_argument("canonical form: m/B size must equal generator count");
  Word pivots = 0;
  for (int i = 0; i < k; ++i) {
    const Word g = form.generators[i];
    if (g == 0 || (g & ~full)) throw std::invalid_argument("canonical form: bad generator word");
    const int p = highest_bit(g);
    if (i > 0 && p <= form.pivot_bit(i - 1))
      throw std::invalid_argument("canonical form: generators must have ascending pivots");
    pivots = set_bit(pivots, p);
    if (form.m[i] < 0 || form.m[i] > 3)
      throw std::invalid_argument("canonical form: m entries must lie in Z4");
    if (form.b_rows[i] & ~((Word{1} << k) - 1))
      throw std::invalid_argument("canonical form: B row exceeds generator count");
    if (form.b_rows[i] & ((Word{1} << (i + 1)) - 1))
      throw std::invalid_argument("canonical form: B must be strictly upper triangular");
  }
  for (int i = 0; i < k; ++i) {
    if ((form.generators[i] & pivots) != (Word{1} << form.pivot_bit(i)))
      throw std::invalid_argument("canonical form: generator touches a foreign pivot");
  }
  if (form.x0 & pivots) throw std::invalid_argument("canonical form: x0 overlaps a pivot bit");
}

ExtractResult extract_canonical_form(const SparseState& v, double tol) {
  if (tol <= 0) throw std::invalid_argument("extract_canonical_form: tol must be positive");
  const double nrm = v.norm();
  if (std::abs(nrm - 1.0) > kNormTol)
    throw std::invalid_argument("extract_canonical_form: state must be normalized");

  double max_mag = 0.0;
  for (const Complex& a : v.amps) max_mag = std::max(max_mag, std::abs(a));

  // (1) support and magnitude uniformity (relative tolerance).
  std::vector<Word> support;
  std::vector<Complex> amps;
  double min_mag = max_mag;
  for (std::size_t i = 0; i < v.words.size(); ++i) {
    const double mag = std::abs(v.amps[i]);
    if (mag <= tol * max_mag) continue;
    support.push_back(v.words[i]);
    amps.push_back(v.amps[i]);
    min_mag = std::min(min_mag, mag);
  }
  if ((max_mag - min_mag) > tol * max_mag) {
    std::ostringstream d;
    d << "magnitudes span [" << min_mag << ", " << max_mag << "]";
    return fail(NotStabilizerReason::NonUniformMagnitudes, d.str());
  }

  const std::size_t size = support.size();
  if (size == 0 || (size & (size - 1)) != 0) {
    std::ostringstream d;
    d << "support has " << size << " words";
    return fail(NotStabilizerReason::SupportNotPowerOfTwo, d.str());
  }
  int k = 0;
  while ((std::size_t{1} << k) < size) ++k;

  // (2) offset and linearity of the difference set.
  const std::size_t min_pos =
      std::min_element(support.begin(), support.end()) - support.begin();
  const Word x0 = support[min_pos];
  std::vector<Word> diffs;
  diffs.reserve(size);
  for (Word w : support) diffs.push_back(w ^ x0);
  std::vector<Word> gens = rref_basis(diffs);
  if (static_cast<int>(gens.size()) != k) {
    std::ostringstream d;
    d << "difference set spans dimension " << gens.size() << ", support needs " << k;
    return fail(NotStabilizerReason::SupportNotAffine, d.str());
  }

  // (3) fourth-root phases relative to amp(x0).
  const Complex ref = amps[min_pos];
  const double h = std::abs(ref);
  std::vector<int> phi(size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    const Complex z = amps[i] / ref;
    const double ang = std::arg(z);
    const int q = static_cast<int>(std::lround(ang / (std::numbers::pi / 2))) & 3;
    const double delta = std::abs(std::arg(z * std::conj(kFourthRoots[q])));
    if (delta > kPhaseTol) {
      std::ostringstream d;
      d << "relative phase " << ang << " rad on word " << to_bitstring(support[i], v.n_qubits);
      return fail(NotStabilizerReason::PhaseNotFourthRoot, d.str());
    }
    phi[i] = q;
  }

  // Coordinates via pivot bits; phase exponent lookup per word.
  std::vector<int> phase_of(size);
  {
    std::vector<std::pair<Word, int>> by_word(size);
    for (std::size_t i = 0; i < size; ++i) by_word[i] = {support[i], phi[i]};
    std::sort(by_word.begin(), by_word.end());
    std::sort(support.begin(), support.end());
    for (std::size_t i = 0; i < size; ++i) phase_of[i] = by_word[i].second;
  }
  const auto phase_at = [&](Word w) {
    const auto it = std::lower_bound(support.begin(), support.end(), w);
    return phase_of[static_cast<std::size_t>(it - support.begin())];
  };

  // (4) fit linear and quadratic coefficients.
  CanonicalStabilizerForm form;
  form.n_qubits = v.n_qubits;
  form.x0 = x0;
  form.generators = std::move(gens);
  form.m.resize(k);
  form.b_rows.assign(k, 0);
  for (int i = 0; i < k; ++i) form.m[i] = phase_at(x0 ^ form.generators[i]);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const int d =
          (phase_at(x0 ^ form.generators[i] ^ form.generators[j]) - form.m[i] - form.m[j] + 8) & 3;
      if (d == 1 || d == 3) {
        std::ostringstream msg;
        msg << "pair (" << i << "," << j << ") fits an odd quadratic coefficient " << d;
        return fail(NotStabilizerReason::PhaseNotQuadratic, msg.str());
      }
      if (d == 2) form.b_rows[i] = set_bit(form.b_rows[i], j);
    }
  }

  // (5) verify the amplitude law on every support point.
  for (Word t = 0; t < (Word{1} << k); ++t) {
    if (form.phase_exponent(t) != phase_at(form.support_word(t))) {
      std::ostringstream msg;
      msg << "phase at t=" << t << " is not quadratic";
      return fail(NotStabilizerReason::PhaseNotQuadratic, msg.str());
    }
  }
  (void)h;
  return form;
}

SparseState synthesize_state(const CanonicalStabilizerForm& form, const GaugeSector* sector) {
  validate_form(form);
  const int k = form.k();
  const double h = std::pow(2.0, -0.5 * k);
  SparseState state;
  state.n_qubits = form.n_qubits;
  std::vector<std::pair<Word, Complex>> entries;
  entries.reserve(std::size_t{1} << k);
  for (Word t = 0; t < (Word{1} << k); ++t) {
    const Word x = form.support_word(t);
    if (sector != nullptr && !sector->contains(x)) {
      std::ostringstream msg;
      msg << "canonical form support word " << to_bitstring(x, form.n_qubits)
          << " lies outside the gauge sector";
      throw std::invalid_argument(msg.str());
    }
    entries.emplace_back(x, h * kFourthRoots[form.phase_exponent(t)]);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  state.words.reserve(entries.size());
  state.amps.reserve(entries.size());
  for (auto& [w, a] : entries) {
    state.words.push_back(w);
    state.amps.push_back(a);
  }
  return state;
}

const char* to_string(NotStabilizerReason reason) {
  switch (reason) {
    case NotStabilizerReason::NonUniformMagnitudes: return "NonUniformMagnitudes";
    case NotStabilizerReason::SupportNotPowerOfTwo: return "SupportNotPowerOfTwo";
    case NotStabilizerReason::SupportNotAffine: return "SupportNotAffine";
    case NotStabilizerReason::PhaseNotFourthRoot: return "PhaseNotFourthRoot";
    case NotStabilizerReason::PhaseNotQuadratic: return "PhaseNotQuadratic";
  }
  return "Unknown";
}

std::string form_to_json(const CanonicalStabilizerForm& form) {
  nlohmann::json j;
  j["n"] = form.n_qubits;
  j["x0"] = to_bitstring(form.x0, form.n_qubits);
  j["generators"] = nlohmann::json::array();
  for (Word g : form.generators) j["generators"].push_back(to_bitstring(g, form.n_qubits));
  j["m"] = form.m;
  j["B_pairs"] = nlohmann::json::array();
  for (int i = 0; i < form.k(); ++i) {
    for (int jj = i + 1; jj < form.k(); ++jj) {
      if (test_bit(form.b_rows[i], jj)) j["B_pairs"].push_back({i, jj});
    }
  }
  return j.dump(2);
}

CanonicalStabilizerForm form_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CanonicalStabilizerForm form;
  form.n_qubits = j.at("n").get<int>();
  form.x0 = parse_bitstring(j.at("x0").get<std::string>());
  for (const auto& g : j.at("generators")) form.generators.push_back(parse_bitstring(g.get<std::string>()));
  form.m = j.at("m").get<std::vector<int>>();
  form.b_rows.assign(form.generators.size(), 0);
  for (const auto& pair : j.at("B_pairs")) {
    const int a = pair.at(0).get<int>(), b = pair.at(1).get<int>();
    if (a < 0 || b <= a || b >= form.k())
      throw std::invalid_argument("canonical form JSON: bad B pair");
    form.b_rows[static_cast<std::size_t>(a)] = set_bit(form.b_rows[static_cast<std::size_t>(a)], b);
  }
  validate_form(form);
  return form;
}

}  // namespace rks
