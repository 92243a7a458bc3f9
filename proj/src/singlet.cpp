#include "rks/singlet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rks/diagnostics.hpp"
#include "rks/stabilizer_form.hpp"

namespace rks {

namespace {

constexpr double kResidTol = 1e-8;

Eigen::VectorXcd apply_complex(const SectorOperator& op, const Eigen::VectorXcd& v) {
  Eigen::VectorXd re = op.apply(Eigen::VectorXd(v.real()));
  Eigen::VectorXd im = op.apply(Eigen::VectorXd(v.imag()));
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

}  // namespace

SublatticeConfigSet build_sublattice_config_set(const GaugeSector& sector,
                                                PotentialParity parity) {
  const auto& geom = sector.geometry;
  int active = parity == PotentialParity::Even ? 0 : 1;
  SublatticeConfigSet out;
  out.parity = parity;
  for (int p = 0; p < geom.num_plaquettes(); ++p)
    if (geom.plaquette_parity(p) == active) out.active_plaquettes.push_back(p);
  for (Word cfg : sector.configs) {
    Word label = 0;
    bool keep = true;
    for (int p = 0; p < geom.num_plaquettes() && keep; ++p) {
      PlaquetteState st = plaquette_state(geom, cfg, p);
      if (geom.plaquette_parity(p) == active) {
        if (st == PlaquetteState::Inactive) keep = false;
      } else {
        if (st != PlaquetteState::Inactive) keep = false;
      }
    }
    if (!keep) continue;
    for (int a = 0; a < out.num_active(); ++a)
      if (plaquette_state(geom, cfg, out.active_plaquettes[a]) == PlaquetteState::Clockwise)
        label = set_bit(label, a);
    out.configs.push_back(cfg);
    out.labels.push_back(label);
  }
  return out;
}

std::vector<DimerPairing> enumerate_pairings(const SublatticeConfigSet& set) {
  std::vector<DimerPairing> out;
  int m = set.num_active();
  if (m == 0 || m % 2 != 0) return out;
  std::vector<int> unmatched(set.active_plaquettes);
  std::vector<std::pair<int, int>> cur;
  auto rec = [&](auto&& self) -> void {
    if (unmatched.empty()) {
      out.push_back(DimerPairing{set.parity, cur});
      return;
    }
    int first = unmatched.front();
    std::vector<int> rest(unmatched.begin() + 1, unmatched.end());
    for (std::size_t j = 0; j < rest.size(); ++j) {
      std::vector<int> next;
      for (std::size_t l = 0; l < rest.size(); ++l)
        if (l != j) next.push_back(rest[l]);
      cur.emplace_back(first, rest[j]);
      std::swap(unmatched, next);
      self(self);
      std::swap(unmatched, next);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

SingletResult build_singlet_state(const SublatticeConfigSet& set, const DimerPairing& d) {
  if (d.parity != set.parity)
    throw std::invalid_argument("build_singlet_state: pairing parity mismatch");
  int m = set.num_active();
  int n_pairs = static_cast<int>(d.pairs.size());
  if (n_pairs * 2 != m)
    throw std::invalid_argument("build_singlet_state: pairing is not a perfect matching");
  std::unordered_map<Word, Word> config_of;
  for (int i = 0; i < set.size(); ++i) config_of.emplace(set.labels[i], set.configs[i]);
  auto index_of_plaquette = [&](int p) {
    auto it = std::lower_bound(set.active_plaquettes.begin(), set.active_plaquettes.end(), p);
    if (it == set.active_plaquettes.end() || *it != p)
      throw std::invalid_argument("build_singlet_state: pair references a non-active plaquette");
    return static_cast<int>(it - set.active_plaquettes.begin());
  };

  double mag = std::pow(2.0, -0.5 * n_pairs);
  std::vector<std::pair<Word, Complex>> entries;
  for (Word t = 0; t < (Word{1} << n_pairs); ++t) {
    Word label = 0;
    for (int i = 0; i < n_pairs; ++i) {
      int ip = index_of_plaquette(d.pairs[static_cast<std::size_t>(i)].first);
      int iq = index_of_plaquette(d.pairs[static_cast<std::size_t>(i)].second);
      // t_i = 0: CA order (C at p, A at q); t_i = 1: AC order
      if (test_bit(t, i)) label = set_bit(label, iq);
      else label = set_bit(label, ip);
    }
    auto it = config_of.find(label);
    if (it == config_of.end()) {
      std::ostringstream os;
      os << "branch " << to_bitstring(label, m) << " absent from the "
         << (set.parity == PotentialParity::Even ? "even" : "odd") << " config set";
      return InvalidSinglet{SingletError::MissingBranch, os.str()};
    }
    double sign = bit_parity(t) ? -1.0 : 1.0;
    entries.emplace_back(it->second, Complex(sign * mag, 0.0));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseState st;
  st.n_qubits = 2 * m * 2;  // num_links = 2 * num_plaquettes = 2 * (2m)
  for (auto& [w, a] : entries) {
    st.words.push_back(w);
    st.amps.push_back(a);
  }
  return st;
}

SingletScan enumerate_scar_states(const GaugeSector& sector, const Spectrum& spec) {
  const auto& geom = sector.geometry;
  int m_total = geom.num_plaquettes() / 2;
  double energy = spec.lambda * m_total;  // singlets are zero modes: E = lambda M
  SectorOperator kin = build_kinetic(sector);
  SectorOperator pot_even = build_potential(sector, PotentialParity::Even);
  SectorOperator pot_odd = build_potential(sector, PotentialParity::Odd);
  SectorOperator h_half = build_hamiltonian(sector, 0.5);
  SectorOperator h_two = build_hamiltonian(sector, 2.0);

  // E = lambda M eigenspace members of the supplied spectrum
  std::vector<int> emembers;
  for (int i = 0; i < spec.dim(); ++i)
    if (std::abs(spec.eigenvalues[i] - energy) <= 1e-9 * std::max(1.0, std::abs(energy)))
      emembers.push_back(i);
  Eigen::MatrixXd espan(spec.dim(), emembers.size());
  for (std::size_t c = 0; c < emembers.size(); ++c)
    espan.col(static_cast<int>(c)) = spec.eigenvectors.col(emembers[c]);

  std::vector<std::vector<int>> transl;
  for (auto [dx, dy] : {std::pair<int, int>{1, 1}, {2, 0}, {0, 2}}) {
    auto lp = translation_permutation(geom, dx, dy);
    std::vector<int> sp(static_cast<std::size_t>(sector.dim()));
    for (int i = 0; i < sector.dim(); ++i)
      sp[static_cast<std::size_t>(i)] = sector.index_of(permute_word(sector.configs[i], lp));
    transl.push_back(std::move(sp));
  }

  SingletScan scan;
  for (PotentialParity parity : {PotentialParity::Even, PotentialParity::Odd}) {
    auto set = build_sublattice_config_set(sector, parity);
    for (auto& d : enumerate_pairings(set)) {
      auto r = build_singlet_state(set, d);
      if (!is_valid_singlet(r)) {
        scan.rejected.push_back(d);
        continue;
      }
      SparseState st = std::get<SparseState>(std::move(r));
      st.n_qubits = geom.num_links();
      Eigen::VectorXcd v = to_sector_vector(sector, st);
      bool dup = false;
      for (const auto& prev : scan.scars)
        if (std::abs(prev.coeffs.dot(v)) >= 1.0 - 1e-9) { dup = true; break; }
      if (dup) {
        scan.valid.push_back(d);
        continue;
      }

      double mval = static_cast<double>(m_total);
      const SectorOperator& pot_active = parity == PotentialParity::Even ? pot_even : pot_odd;
      const SectorOperator& pot_inactive = parity == PotentialParity::Even ? pot_odd : pot_even;
      Eigen::VectorXcd proj = espan.cast<Complex>() * (espan.cast<Complex>().adjoint() * v);
      bool ok = apply_complex(kin, v).norm() <= kResidTol &&
                (apply_complex(pot_active, v) - mval * v).norm() <= kResidTol &&
                apply_complex(pot_inactive, v).norm() <= kResidTol &&
                (apply_complex(h_half, v) - 0.5 * mval * v).norm() <= kResidTol &&
                (apply_complex(h_two, v) - 2.0 * mval * v).norm() <= kResidTol &&
                (proj - v).norm() <= kResidTol;
      auto ex = extract_canonical_form(st, 1e-8);
      if (!ok || !is_stabilizer(ex))
        throw std::runtime_error("enumerate_scar_states: singlet state failed validation");

      ScarRecord rec;
      rec.coeffs = v;
      rec.state = std::move(st);
      rec.energy = energy;
      rec.kin_eigenvalue = 0;
      rec.active_parity = parity;
      rec.origin = ScarOrigin::Analytic;
      rec.form = std::get<CanonicalStabilizerForm>(ex);
      std::array<Complex, 3> ph{};
      bool sharp = true;
      for (std::size_t gi = 0; gi < transl.size(); ++gi) {
        Eigen::VectorXcd tv(v.size());
        for (int i = 0; i < v.size(); ++i) tv[transl[gi][static_cast<std::size_t>(i)]] = v[i];
        Complex ov = v.dot(tv);
        if (std::abs(ov) < 1.0 - 1e-8) { sharp = false; break; }
        ph[gi] = ov / std::abs(ov);
      }
      if (sharp) rec.translation_phases = ph;
      rec.markers.flatness = multifractal_flatness(rec.coeffs);
      rec.markers.svn = entanglement_entropy(rec.state, half_system_cut(geom));
      if (geom.num_links() <= 16)
        rec.markers.m2 = stabilizer_renyi_entropy(rec.state, 2, SreStrategy::Auto, 1);
      scan.scars.push_back(std::move(rec));
      scan.valid.push_back(d);
    }
  }
  return scan;
}

}  // namespace rks
