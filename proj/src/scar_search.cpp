#include "rks/scar_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "rks/parallel.hpp"

namespace rks {

namespace {

constexpr double kGroupTol = 1e-8;     // projected-eigenvalue grouping
constexpr double kOrthoTol = 1e-10;    // orthonormality contract on outputs
constexpr double kDropTol = 1e-8;      // Gram-Schmidt dependence cutoff
constexpr double kWeightTol = 1e-12;   // support membership on weight profile

double adaptive_cluster_tol(double energy) {
  return 1e-9 * std::max(1.0, std::abs(energy));
}

Eigen::MatrixXd project(const SectorOperator& op, const Eigen::MatrixXd& q) {
  Eigen::MatrixXd m = q.transpose() * op.apply(q);
  return 0.5 * (m + m.transpose());
}

Eigen::VectorXcd apply_complex(const SectorOperator& op, const Eigen::VectorXcd& v) {
  Eigen::VectorXd re = op.apply(Eigen::VectorXd(v.real()));
  Eigen::VectorXd im = op.apply(Eigen::VectorXd(v.imag()));
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

// Ranges of near-equal values in an ascending eigenvalue list.
std::vector<std::pair<int, int>> group_ranges(const Eigen::VectorXd& vals, double tol) {
  std::vector<std::pair<int, int>> out;
  int n = static_cast<int>(vals.size());
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && vals[j] - vals[i] <= tol) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

bool near_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

// Phase exponent phi(t) mod 4 for generator phases m (2 bits per generator in
// mword) and quadratic couplings B (packed upper triangle in bword).
int phase_exponent_of(int t, int k, unsigned mword, unsigned bword) {
  int phi = 0, bpos = 0;
  for (int a = 0; a < k; ++a)
    if ((t >> a) & 1) phi += (mword >> (2 * a)) & 3;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b, ++bpos)
      if (((bword >> bpos) & 1) && ((t >> a) & 1) && ((t >> b) & 1)) phi += 2;
  return phi & 3;
}

// 1 - <v|P|v> for the flat canonical-phase vector with phase table phi over
// the support Gram matrix g; equals the squared projection residual.
double phase_residual_sq(const std::vector<int>& phi, const Eigen::MatrixXd& g) {
  int np = static_cast<int>(phi.size());
  double quad = 0;
  for (int s = 0; s < np; ++s) {
    quad += g(s, s);
    for (int t = s + 1; t < np; ++t) {
      int dp = (phi[t] - phi[s]) & 3;
      if (dp == 0) quad += 2 * g(s, t);
      else if (dp == 2) quad -= 2 * g(s, t);
    }
  }
  return 1.0 - quad / np;
}

// Fits phi(t) = sum m_a t_a + 2 sum_{a<b} B_ab t_a t_b (mod 4); false if the
// table is not quadratic of that shape.
bool fit_quadratic_phases(const std::vector<int>& phi, int k, unsigned& mword,
                          unsigned& bword) {
  mword = 0;
  bword = 0;
  for (int a = 0; a < k; ++a) mword |= static_cast<unsigned>(phi[1 << a] & 3) << (2 * a);
  int bpos = 0;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b, ++bpos) {
      int d = (phi[(1 << a) | (1 << b)] - phi[1 << a] - phi[1 << b]) & 3;
      if (d == 1 || d == 3) return false;
      if (d == 2) bword |= 1u << bpos;
    }
  int np = 1 << k;
  for (int t = 0; t < np; ++t)
    if (phase_exponent_of(t, k, mword, bword) != (phi[t] & 3)) return false;
  return true;
}

}  // namespace

std::vector<DegenerateSector> cluster_spectrum(const Spectrum& spec, double cluster_tol) {
  std::vector<DegenerateSector> out;
  int n = spec.dim();
  for (int i = 0; i < n;) {
    double e0 = spec.eigenvalues[i];
    double tol = cluster_tol > 0 ? cluster_tol : adaptive_cluster_tol(e0);
    int j = i + 1;
    while (j < n && std::abs(spec.eigenvalues[j] - e0) <= tol) ++j;
    DegenerateSector sec;
    sec.energy = spec.eigenvalues.segment(i, j - i).mean();
    sec.lambda = spec.lambda;
    sec.members = spec.eigenvectors.middleCols(i, j - i);
    out.push_back(std::move(sec));
    i = j;
  }
  return out;
}

std::vector<JointSubspace> joint_integer_decomposition(const SectorOperator& kin,
                                                       const SectorOperator& pot_even,
                                                       const SectorOperator& pot_odd,
                                                       const DegenerateSector& sec,
                                                       double int_tol) {
  std::vector<JointSubspace> out;
  if (sec.dim() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(project(kin, sec.members));
  for (auto [ka, kb] : group_ranges(ek.eigenvalues(), kGroupTol)) {
    double kval = ek.eigenvalues().segment(ka, kb - ka).mean();
    Eigen::MatrixXd q1 = sec.members * ek.eigenvectors().middleCols(ka, kb - ka);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ev(project(pot_even, q1));
    for (auto [va, vb] : group_ranges(ev.eigenvalues(), kGroupTol)) {
      JointSubspace js;
      js.energy = sec.energy;
      js.kin_value = kval;
      js.even_value = ev.eigenvalues().segment(va, vb - va).mean();
      js.basis = q1 * ev.eigenvectors().middleCols(va, vb - va);
      Eigen::MatrixXd vo = project(pot_odd, js.basis);
      js.odd_value = vo.trace() / js.dim();
      double dev = (vo - js.odd_value * Eigen::MatrixXd::Identity(js.dim(), js.dim()))
                       .cwiseAbs()
                       .maxCoeff();
      js.kin_integer = near_integer(js.kin_value, int_tol);
      js.pot_integer = near_integer(js.even_value, int_tol) &&
                       near_integer(js.odd_value, int_tol) && dev <= 1e-6;
      out.push_back(std::move(js));
    }
  }
  return out;
}

std::vector<CandidateSubspace> find_integer_joint_eigenvectors(
    const GaugeSector& sector, const SectorOperator& kin,
    const SectorOperator& pot_even, const SectorOperator& pot_odd,
    const DegenerateSector& sec, double int_tol) {
  int m = sector.geometry.num_plaquettes() / 2;
  std::vector<CandidateSubspace> out;
  for (auto& js : joint_integer_decomposition(kin, pot_even, pot_odd, sec, int_tol)) {
    if (!js.kin_integer || !js.pot_integer) continue;
    int n = static_cast<int>(std::lround(js.kin_value));
    int ve = static_cast<int>(std::lround(js.even_value));
    int vo = static_cast<int>(std::lround(js.odd_value));
    if (std::abs(n) > 2) continue;
    bool even_active = (ve == m && vo == 0);
    bool odd_active = (ve == 0 && vo == m);
    if (!even_active && !odd_active) continue;
    CandidateSubspace cs;
    cs.energy = js.energy;
    cs.kin_eigenvalue = n;
    cs.active_parity = even_active ? PotentialParity::Even : PotentialParity::Odd;
    cs.basis = std::move(js.basis);
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<Eigen::VectorXcd> stabilizer_search_in_subspace(const GaugeSector& sector,
                                                            const Eigen::MatrixXd& basis,
                                                            const SearchOptions& opt,
                                                            SearchOutcome* outcome) {
  std::vector<Eigen::VectorXcd> found;
  int secdim = sector.dim();
  int r = static_cast<int>(basis.cols());
  if (r == 0) return found;
  auto warn = [&](const std::string& msg) {
    if (outcome) {
      outcome->truncated = true;
      outcome->warnings.push_back(msg);
    }
  };

  if (r == 1) {
    Eigen::VectorXd v = basis.col(0);
    SparseState ss = sector_state(sector, v).pruned(1e-14);
    if (ss.support_size() == 0) return found;
    if (is_stabilizer(extract_canonical_form(ss, opt.tol))) {
      int i0 = 0;
      while (std::abs(v[i0]) <= 1e-14) ++i0;
      // global phase: smallest support word carries a positive amplitude
      Eigen::VectorXcd vc = (v[i0] < 0 ? -v : v).cast<Complex>();
      found.push_back(std::move(vc));
    }
    return found;
  }

  // support of the subspace on the weight profile w(x) = sum_c |<x|c>|^2
  std::vector<Word> words;
  std::vector<int> rows;
  std::vector<double> weight;
  for (int i = 0; i < secdim; ++i) {
    double w = basis.row(i).squaredNorm();
    if (w > kWeightTol) {
      words.push_back(sector.configs[i]);
      rows.push_back(i);
      weight.push_back(w);
    }
  }
  int s = static_cast<int>(words.size());
  Eigen::MatrixXd bw(s, r);
  for (int i = 0; i < s; ++i) bw.row(i) = basis.row(rows[i]);
  auto support_row = [&](Word x) -> int {
    auto it = std::lower_bound(words.begin(), words.end(), x);
    if (it == words.end() || *it != x) return -1;
    return static_cast<int>(it - words.begin());
  };

  // Squared-residual floor: the projected Gram matrices carry O(1e-15)
  // eigensolver noise, so exact members can miss a bare tol^2 = 1e-16 cut
  // depending on the solve; genuine rejections sit many orders above 1e-12.
  double tol2 = std::max(opt.tol * opt.tol, 1e-12);
  auto emit = [&](const std::vector<int>& arows, const std::vector<int>& phi) {
    int np = static_cast<int>(arows.size());
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(secdim);
    double h = 1.0 / std::sqrt(static_cast<double>(np));
    static const Complex kRoots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int t = 0; t < np; ++t) v[rows[arows[t]]] = h * kRoots[phi[t] & 3];
    for (auto& f : found)
      if (std::abs(f.dot(v)) > 1.0 - 1e-8) return;
    found.push_back(std::move(v));
  };

  for (int i0 = 0; i0 < s; ++i0) {
    Word x0 = words[i0];
    // k = 0: bare Fock member
    if (1.0 - weight[i0] <= tol2) emit({i0}, {0});

    std::vector<Word> diffs;
    for (int j = i0 + 1; j < s; ++j) diffs.push_back(words[j] ^ x0);
    std::vector<Word> gens;
    std::vector<Word> span{0};
    std::function<void()> rec = [&]() {
      int k = static_cast<int>(gens.size());
      if (k >= 1) {
        int np = 1 << k;
        std::vector<int> arows(np);
        double trace = 0;
        for (int t = 0; t < np; ++t) {
          Word x = x0;
          for (int a = 0; a < k; ++a)
            if ((t >> a) & 1) x ^= gens[a];
          arows[t] = support_row(x);
          trace += weight[arows[t]];
        }
        if (trace >= 1.0 - tol2 - 1e-12) {
          Eigen::MatrixXd ba(np, r);
          for (int t = 0; t < np; ++t) ba.row(t) = bw.row(arows[t]);
          Eigen::MatrixXd g = ba * ba.transpose();
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(g);
          double lmax = eg.eigenvalues()[np - 1];
          if (lmax >= 1.0 - tol2 - 1e-12) {
            long nb = 1l << (k * (k - 1) / 2);
            long total = (1l << (2 * k)) * nb;
            bool exhaustive = k <= opt.exhaustive_k || total <= opt.phase_budget;
            if (exhaustive) {
              std::vector<int> phi(np);
              for (unsigned mw = 0; mw < (1u << (2 * k)); ++mw)
                for (unsigned bwd = 0; bwd < static_cast<unsigned>(nb); ++bwd) {
                  for (int t = 0; t < np; ++t) phi[t] = phase_exponent_of(t, k, mw, bwd);
                  if (phase_residual_sq(phi, g) <= tol2) emit(arows, phi);
                }
            } else {
              // round the dominant eigenvector onto canonical phases
              double lsecond = eg.eigenvalues()[np - 2];
              if (lsecond >= 1.0 - tol2 - 1e-12) {
                std::ostringstream os;
                os << "phase budget exceeded on a degenerate support (k=" << k
                   << "); census may be incomplete";
                warn(os.str());
              }
              Eigen::VectorXd y = eg.eigenvectors().col(np - 1);
              double h = 1.0 / std::sqrt(static_cast<double>(np));
              if (std::abs(y[0]) > 0.25 * h) {
                bool ok = true;
                std::vector<int> phi(np);
                phi[0] = 0;
                for (int t = 1; t < np && ok; ++t) {
                  if (std::abs(std::abs(y[t]) - h) > 0.5 * h) ok = false;
                  // real subspace: phases are 0 or 2 relative to the base word
                  phi[t] = (y[t] * y[0] > 0) ? 0 : 2;
                }
                unsigned mw, bwd;
                if (ok && fit_quadratic_phases(phi, k, mw, bwd) &&
                    phase_residual_sq(phi, g) <= tol2)
                  emit(arows, phi);
              }
            }
          }
        }
      }
      if (static_cast<int>(gens.size()) >= opt.k_cap) return;
      Word last = gens.empty() ? 0 : gens.back();
      for (Word d : diffs) {
        if (d <= last) continue;
        bool ok = true;
        std::vector<Word> fresh;
        for (Word e : span) {
          Word ne = e ^ d;
          if (e != 0 && ne < d) { ok = false; break; }  // not the coset minimum
          int row = support_row(x0 ^ ne);
          if (row <= i0) { ok = false; break; }  // outside support or below base
          fresh.push_back(ne);
        }
        if (!ok) continue;
        size_t keep = span.size();
        gens.push_back(d);
        span.insert(span.end(), fresh.begin(), fresh.end());
        rec();
        gens.pop_back();
        span.resize(keep);
      }
    };
    rec();
  }
  return found;
}

std::vector<Eigen::VectorXcd> select_orthogonal(const std::vector<Eigen::VectorXcd>& found,
                                                double tol) {
  int n = static_cast<int>(found.size());
  if (n == 0) return {};
  std::vector<std::vector<char>> compat(n, std::vector<char>(n, 1));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      compat[i][j] = compat[j][i] = std::abs(found[i].dot(found[j])) <= tol;
  // maximum clique of the orthogonality graph; strict-improvement pruning
  // keeps the lexicographically first maximum subset
  std::vector<int> best, cur;
  std::function<void(const std::vector<int>&)> rec = [&](const std::vector<int>& avail) {
    if (cur.size() + avail.size() <= best.size()) return;
    if (avail.empty()) {
      best = cur;
      return;
    }
    for (std::size_t a = 0; a < avail.size(); ++a) {
      if (cur.size() + (avail.size() - a) <= best.size()) break;
      int i = avail[a];
      std::vector<int> next;
      for (std::size_t b = a + 1; b < avail.size(); ++b)
        if (compat[i][avail[b]]) next.push_back(avail[b]);
      cur.push_back(i);
      rec(next);
      cur.pop_back();
    }
  };
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  rec(all);
  std::vector<Eigen::VectorXcd> sel;
  for (int i : best) sel.push_back(found[i]);
  return sel;
}

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass.
bool gs_append(std::vector<Eigen::VectorXcd>& basis, Eigen::VectorXcd v, double drop_tol) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b.dot(v) * b;
  double nrm = v.norm();
  if (nrm < drop_tol) return false;
  basis.push_back(v / nrm);
  return true;
}

}  // namespace

Eigen::MatrixXcd orthonormalize_and_complete(const std::vector<Eigen::VectorXcd>& found,
                                             const DegenerateSector& sec) {
  int dim = sec.dim();
  std::vector<Eigen::VectorXcd> basis;
  for (const auto& v : found) {
    // pre: found vectors live in the sector span
    Eigen::VectorXcd proj = sec.members.cast<Complex>() *
                            (sec.members.cast<Complex>().adjoint() * v);
    if ((proj - v).norm() > 1e-6)
      throw std::invalid_argument("orthonormalize_and_complete: vector outside sector span");
    gs_append(basis, v, kDropTol);
  }
  for (int c = 0; c < dim && static_cast<int>(basis.size()) < dim; ++c)
    gs_append(basis, sec.members.col(c).cast<Complex>(), kDropTol);
  if (static_cast<int>(basis.size()) != dim)
    throw std::runtime_error("orthonormalize_and_complete: failed to span the sector");
  Eigen::MatrixXcd out(sec.members.rows(), dim);
  for (int c = 0; c < dim; ++c) out.col(c) = basis[c];
  // orthonormality contract
  Eigen::MatrixXcd gram = out.adjoint() * out;
  double err = (gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (err > kOrthoTol)
    throw std::runtime_error("orthonormalize_and_complete: basis not orthonormal");
  return out;
}

namespace {

// Sector-index permutation induced by a link permutation; the gauge sector is
// closed under lattice translations.
std::vector<int> sector_permutation(const GaugeSector& sector,
                                    const std::vector<int>& link_perm) {
  std::vector<int> out(static_cast<std::size_t>(sector.dim()));
  for (int i = 0; i < sector.dim(); ++i) {
    int j = sector.index_of(permute_word(sector.configs[i], link_perm));
    if (j < 0) throw std::logic_error("gauge sector not closed under translation");
    out[static_cast<std::size_t>(i)] = j;
  }
  return out;
}

// The three generators of the parity-preserving translation subgroup, as
// sector-index permutations: (1,1), (2,0), (0,2).
std::vector<std::vector<int>> parity_translations(const GaugeSector& sector) {
  std::vector<std::vector<int>> out;
  for (auto [dx, dy] : {std::pair<int, int>{1, 1}, {2, 0}, {0, 2}})
    out.push_back(sector_permutation(
        sector, translation_permutation(sector.geometry, dx, dy)));
  return out;
}

Eigen::VectorXcd permute_vector(const std::vector<int>& sperm, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(v.size());
  for (int i = 0; i < v.size(); ++i) out[sperm[static_cast<std::size_t>(i)]] = v[i];
  return out;
}

// Eigenphases of a unit vector under the translation generators, or nullopt
// if any |<v|T|v>| falls below 1 - tol (not a momentum eigenstate).
std::optional<std::array<Complex, 3>> translation_eigenphases(
    const std::vector<std::vector<int>>& sperms, const Eigen::VectorXcd& v, double tol) {
  std::array<Complex, 3> ph{};
  for (std::size_t gi = 0; gi < sperms.size(); ++gi) {
    Complex ov = v.dot(permute_vector(sperms[gi], v));
    if (std::abs(ov) < 1.0 - tol) return std::nullopt;
    ph[gi] = ov / std::abs(ov);
  }
  return ph;
}

// Global phase convention: first sector coordinate of significant magnitude
// made real positive.
void fix_global_phase(Eigen::VectorXcd& v) {
  double peak = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-6 * peak) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
}

// Joint eigenspaces of the translation generators restricted to the piece;
// returns the one-dimensional ones as unit vectors in sector coordinates.
// Eigenvector groups are re-orthonormalized per eigenvalue (dense complex
// eigensolvers do not return orthonormal vectors inside degenerate groups).
std::vector<Eigen::VectorXcd> one_dim_translation_states(
    const Eigen::MatrixXd& basis, const std::vector<std::vector<int>>& sperms) {
  std::vector<Eigen::MatrixXcd> blocks{basis.cast<Complex>()};
  for (const auto& sp : sperms) {
    std::vector<Eigen::MatrixXcd> next;
    for (const auto& blk : blocks) {
      if (blk.cols() == 1) {
        next.push_back(blk);
        continue;
      }
      Eigen::MatrixXcd tb(blk.rows(), blk.cols());
      for (int c = 0; c < blk.cols(); ++c)
        tb.col(c) = permute_vector(sp, Eigen::VectorXcd(blk.col(c)));
      // unitary restriction: blocks stay invariant because the generators
      // commute with each other and with the operators defining the piece
      Eigen::MatrixXcd u = blk.adjoint() * tb;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
      std::vector<Complex> reps;
      std::vector<std::vector<int>> groups;
      for (int c = 0; c < blk.cols(); ++c) {
        Complex ev = es.eigenvalues()[c];
        std::size_t g = 0;
        while (g < reps.size() && std::abs(ev - reps[g]) > 1e-6) ++g;
        if (g == reps.size()) {
          reps.push_back(ev);
          groups.emplace_back();
        }
        groups[g].push_back(c);
      }
      for (const auto& grp : groups) {
        Eigen::MatrixXcd cols(blk.rows(), grp.size());
        for (std::size_t c = 0; c < grp.size(); ++c)
          cols.col(static_cast<int>(c)) = blk * es.eigenvectors().col(grp[c]);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(cols);
        Eigen::MatrixXcd q = qr.householderQ() *
                             Eigen::MatrixXcd::Identity(cols.rows(), cols.cols());
        next.push_back(std::move(q));
      }
    }
    blocks = std::move(next);
  }
  std::vector<Eigen::VectorXcd> out;
  for (const auto& blk : blocks)
    if (blk.cols() == 1) out.push_back(blk.col(0));
  return out;
}

struct ClusterOutput {
  std::vector<ScarRecord> scars;
  SectorBasis sector;
  std::vector<std::string> warnings;
};

ScarMarkers compute_markers(const GaugeSector& sector, const Eigen::VectorXcd& coeffs,
                            const SparseState& state) {
  ScarMarkers mk;
  mk.flatness = multifractal_flatness(coeffs);
  mk.svn = entanglement_entropy(state, half_system_cut(sector.geometry));
  if (sector.geometry.num_links() <= 16)
    mk.m2 = stabilizer_renyi_entropy(state, 2, SreStrategy::Auto, 1);
  return mk;
}

}  // namespace

Eigen::MatrixXcd ScanResult::canonical_basis() const {
  if (sectors.empty()) return {};
  int rows = static_cast<int>(sectors.front().basis.rows());
  int cols = 0;
  for (const auto& s : sectors) cols += static_cast<int>(s.basis.cols());
  Eigen::MatrixXcd out(rows, cols);
  int at = 0;
  for (const auto& s : sectors) {
    out.middleCols(at, s.basis.cols()) = s.basis;
    at += static_cast<int>(s.basis.cols());
  }
  return out;
}

Eigen::VectorXd ScanResult::canonical_energies() const {
  int cols = 0;
  for (const auto& s : sectors) cols += static_cast<int>(s.basis.cols());
  Eigen::VectorXd out(cols);
  int at = 0;
  for (const auto& s : sectors)
    for (int c = 0; c < s.basis.cols(); ++c) out[at++] = s.energy;
  return out;
}

ScanResult scan_all(const GaugeSector& sector, const Spectrum& spec,
                    const ScanOptions& opt) {
  ScanResult result;
  const auto& geom = sector.geometry;
  int m = geom.num_plaquettes() / 2;
  SectorOperator kin = build_kinetic(sector);
  SectorOperator pot_even = build_potential(sector, PotentialParity::Even);
  SectorOperator pot_odd = build_potential(sector, PotentialParity::Odd);
  SectorOperator h_half = build_hamiltonian(sector, 0.5);
  SectorOperator h_two = build_hamiltonian(sector, 2.0);
  auto transl = parity_translations(sector);

  auto clusters = cluster_spectrum(spec, opt.cluster_tol);
  std::vector<ClusterOutput> outputs(clusters.size());

  parallel_for(clusters.size(), opt.threads, [&](size_t ci) {
    const DegenerateSector& cl = clusters[ci];
    ClusterOutput& out = outputs[ci];
    auto pieces = joint_integer_decomposition(kin, pot_even, pot_odd, cl, opt.int_tol);

    std::vector<Eigen::VectorXcd> ordered;  // scars, then installs, then pieces
    std::vector<Eigen::VectorXcd> installs;

    for (size_t pi = 0; pi < pieces.size(); ++pi) {
      auto& js = pieces[pi];
      int n = static_cast<int>(std::lround(js.kin_value));
      int ve = static_cast<int>(std::lround(js.even_value));
      int vo = static_cast<int>(std::lround(js.odd_value));
      bool integer = js.kin_integer && js.pot_integer;
      bool scar_pattern = integer && std::abs(n) <= 2 &&
                          ((ve == m && vo == 0) || (ve == 0 && vo == m));
      bool fock_pattern = integer && n == 0 && ve == 0 && vo == 0;

      if (scar_pattern) {
        SearchOutcome so;
        auto census = stabilizer_search_in_subspace(sector, js.basis, opt.search, &so);
        for (auto& w : so.warnings) {
          std::ostringstream os;
          os << "E=" << cl.energy << ": " << w;
          out.warnings.push_back(os.str());
        }
        std::vector<Eigen::VectorXcd> picked;
        std::vector<std::optional<std::array<Complex, 3>>> phases;
        ScarOrigin origin = ScarOrigin::Census;
        if (!census.empty()) {
          for (const auto& v : census)
            if (auto ph = translation_eigenphases(transl, v, opt.stab_tol)) {
              picked.push_back(v);
              phases.push_back(ph);
            }
          if (picked.empty()) {
            // no census member has sharp momentum: keep the maximum
            // orthogonal subset instead
            origin = ScarOrigin::MaxOrthogonal;
            picked = select_orthogonal(census, opt.stab_tol);
            phases.assign(picked.size(), std::nullopt);
          }
        } else {
          // empty census: among the one-dimensional joint translation sectors
          // of the piece, keep the perfectly flat state invariant under the
          // diagonal translation (unique per piece on all lattices studied)
          origin = ScarOrigin::SymmetryFlat;
          for (auto& v : one_dim_translation_states(js.basis, transl)) {
            if (multifractal_flatness(v) > opt.flat_tol) continue;
            auto ph = translation_eigenphases(transl, v, opt.stab_tol);
            if (!ph || std::abs((*ph)[0] - 1.0) > 1e-6) continue;
            fix_global_phase(v);
            phases.push_back(ph);
            picked.push_back(std::move(v));
          }
        }
        for (std::size_t vi = 0; vi < picked.size(); ++vi) {
          const Eigen::VectorXcd& v = picked[vi];
          // full-space eigen-relations for kinetic, both potentials, and
          // lambda-independence of the total energy
          bool ok = (apply_complex(kin, v) - static_cast<double>(n) * v).norm() <= 1e-8 &&
                    (apply_complex(pot_even, v) - static_cast<double>(ve) * v).norm() <= 1e-8 &&
                    (apply_complex(pot_odd, v) - static_cast<double>(vo) * v).norm() <= 1e-8 &&
                    (apply_complex(h_half, v) - (n + 0.5 * m) * v).norm() <= 1e-8 &&
                    (apply_complex(h_two, v) - (n + 2.0 * m) * v).norm() <= 1e-8;
          if (!ok) {
            std::ostringstream os;
            os << "E=" << cl.energy << ": selected vector failed full-space validation";
            out.warnings.push_back(os.str());
            continue;
          }
          // census vectors are synthesized with exact amplitudes; symmetry
          // states carry eigensolver dust well below the flat 1/sqrt(s) level
          double prune = origin == ScarOrigin::SymmetryFlat ? 1e-6 : 1e-14;
          SparseState ss = sector_state(sector, v).pruned(prune);
          ScarRecord rec;
          auto ex = extract_canonical_form(ss, opt.stab_tol);
          if (is_stabilizer(ex)) {
            rec.form = std::get<CanonicalStabilizerForm>(ex);
          } else if (origin != ScarOrigin::SymmetryFlat) {
            std::ostringstream os;
            os << "E=" << cl.energy << ": census vector failed canonical-form extraction";
            out.warnings.push_back(os.str());
            continue;
          }
          rec.coeffs = v;
          rec.state = std::move(ss);
          rec.energy = cl.energy;
          rec.kin_eigenvalue = n;
          rec.active_parity = ve == m ? PotentialParity::Even : PotentialParity::Odd;
          rec.origin = origin;
          rec.translation_phases = phases[vi];
          rec.markers = compute_markers(sector, rec.coeffs, rec.state);
          ordered.push_back(v);
          out.scars.push_back(std::move(rec));
        }
      } else if (fock_pattern) {
        // install the frozen Fock members that lie exactly in the piece
        for (int i = 0; i < sector.dim(); ++i) {
          double w = js.basis.row(i).squaredNorm();
          if (w > kWeightTol && 1.0 - w <= std::max(opt.stab_tol * opt.stab_tol, 1e-12)) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(sector.dim());
            e[i] = 1.0;
            installs.push_back(std::move(e));
          }
        }
      } else if (js.dim() >= 2) {
        // expose flat sign vectors in the remaining integer pieces so the
        // report shows them deterministically
        std::vector<int> rows;
        for (int i = 0; i < sector.dim(); ++i)
          if (js.basis.row(i).squaredNorm() > kWeightTol) rows.push_back(i);
        int sdim = static_cast<int>(rows.size());
        if (sdim >= 2 && sdim <= opt.flat_support_cap) {
          Eigen::MatrixXd bwm(sdim, js.basis.cols());
          for (int i = 0; i < sdim; ++i) bwm.row(i) = js.basis.row(rows[i]);
          Eigen::MatrixXd g = bwm * bwm.transpose();
          std::vector<Eigen::VectorXcd> flats;
          double tol2 = std::max(opt.stab_tol * opt.stab_tol, 1e-12);  // Gram-noise floor
          for (Word signs = 0; signs < (Word{1} << (sdim - 1)); ++signs) {
            Eigen::VectorXd sv(sdim);
            sv[0] = 1.0;
            for (int i = 1; i < sdim; ++i) sv[i] = test_bit(signs, i - 1) ? -1.0 : 1.0;
            double quad = sv.dot(g * sv) / sdim;
            if (1.0 - quad <= tol2) {
              Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sector.dim());
              for (int i = 0; i < sdim; ++i) v[rows[i]] = sv[i] / std::sqrt(double(sdim));
              flats.push_back(std::move(v));
            }
          }
          for (auto& v : select_orthogonal(flats, opt.stab_tol))
            installs.push_back(std::move(v));
        }
      }
    }

    for (auto& v : installs) ordered.push_back(std::move(v));
    for (auto& js : pieces)
      for (int c = 0; c < js.dim(); ++c)
        ordered.push_back(js.basis.col(c).cast<Complex>());

    out.sector.energy = cl.energy;
    out.sector.n_scars = static_cast<int>(out.scars.size());
    out.sector.basis = orthonormalize_and_complete(ordered, cl);
  });

  for (auto& out : outputs) {
    for (auto& rec : out.scars) {
      out.sector.scar_ids.push_back(static_cast<int>(result.scars.size()));
      result.scars.push_back(std::move(rec));
    }
    result.sectors.push_back(std::move(out.sector));
    for (auto& w : out.warnings) result.warnings.push_back(std::move(w));
  }

  // frozen configurations are trivially stabilizer eigenstates at E = 0
  for (int i = 0; i < sector.dim(); ++i) {
    Word cfg = sector.configs[i];
    auto [fe, fo] = flippable_counts(geom, cfg);
    if (fe != 0 || fo != 0) continue;
    ScarRecord rec;
    rec.coeffs = Eigen::VectorXcd::Zero(sector.dim());
    rec.coeffs[i] = 1.0;
    rec.state = make_fock_state(geom.num_links(), cfg);
    rec.energy = 0.0;
    rec.kin_eigenvalue = 0;
    rec.active_parity = PotentialParity::Even;
    rec.origin = ScarOrigin::Frozen;
    auto ex = extract_canonical_form(rec.state, opt.stab_tol);
    rec.form = std::get<CanonicalStabilizerForm>(ex);
    bool invariant = true;
    for (const auto& sp : transl)
      if (sp[static_cast<std::size_t>(i)] != i) { invariant = false; break; }
    if (invariant) rec.translation_phases = std::array<Complex, 3>{1.0, 1.0, 1.0};
    rec.markers = compute_markers(sector, rec.coeffs, rec.state);
    result.trivial.push_back(std::move(rec));
  }
  return result;
}

}  // namespace rks
