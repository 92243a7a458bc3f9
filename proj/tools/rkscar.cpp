// Command-line front end: enumerate | spectrum | report | find-scars |
// construct-singlets | synthesize | verify.  Exit codes: 0 ok, 2 config
// error, 3 validation failure.
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "rks/artifacts.hpp"
#include "rks/clifford.hpp"
#include "rks/diagnostics.hpp"
#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/scar_search.hpp"
#include "rks/singlet.hpp"
#include "rks/stabilizer_form.hpp"

namespace {

using namespace rks;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* parity_name(PotentialParity p) { return p == PotentialParity::Even ? "even" : "odd"; }

const char* origin_name(ScarOrigin o) {
  switch (o) {
    case ScarOrigin::Census: return "census";
    case ScarOrigin::MaxOrthogonal: return "max-orthogonal";
    case ScarOrigin::SymmetryFlat: return "symmetry-flat";
    case ScarOrigin::Frozen: return "frozen";
    case ScarOrigin::Analytic: return "analytic";
  }
  return "?";
}

int cmd_enumerate(const RunConfig& cfg) {
  GaugeSector sector = ensure_sector(cfg);
  std::printf("lattice %dx%d: %d links, %d plaquettes\n", cfg.lx, cfg.ly,
              sector.geometry.num_links(), sector.geometry.num_plaquettes());
  std::printf("gauge-invariant sector: %d configurations\n", sector.dim());
  std::printf("artifact: %s\n", artifact_path(cfg, "sector", "json").string().c_str());
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  GaugeSector sector = ensure_sector(cfg);
  bool cached = has_spectrum_artifact(cfg);
  Spectrum spec = ensure_spectrum(cfg, sector);
  auto op = build_hamiltonian(sector, cfg.lambda);
  std::printf("%s spectrum at lambda=%g: %d eigenpairs, E in [%.6f, %.6f]\n",
              cached ? "cached" : "computed", cfg.lambda, spec.dim(), spec.eigenvalues(0),
              spec.eigenvalues(spec.dim() - 1));
  std::printf("eigenpair residual: %.3e\n", max_eigenpair_residual(op, spec));
  std::printf("artifact: %s\n", artifact_path(cfg, "spectrum", "json").string().c_str());
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  GaugeSector sector = ensure_sector(cfg);
  Spectrum spec = ensure_spectrum(cfg, sector);
  ScanResult scan = scan_all(sector, spec, scan_options(cfg));
  for (const std::string& w : scan.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  bool sre = cfg.sre_enabled && sector.geometry.num_links() <= 16;
  auto rows = spectrum_report(sector, scan.canonical_energies(), scan.canonical_basis(),
                              half_system_cut(sector.geometry), sre, cfg.threads);
  auto path = write_report_artifact(cfg, rows);
  std::printf("report: %zu rows over the canonical basis (m2 %s)\n", rows.size(),
              sre ? "evaluated" : "skipped");
  std::printf("artifact: %s\n", path.string().c_str());
  return kExitOk;
}

void print_scan(const ScanResult& scan) {
  for (std::size_t i = 0; i < scan.scars.size(); ++i) {
    const ScarRecord& r = scan.scars[i];
    std::printf("scar %zu: E=%g n=%+d parity=%s origin=%s support=%d flatness=%.3e svn=%.6f",
                i, r.energy, r.kin_eigenvalue, parity_name(r.active_parity),
                origin_name(r.origin), r.state.support_size(), r.markers.flatness, r.markers.svn);
    if (r.markers.m2) std::printf(" m2=%.3e", *r.markers.m2 + 0.0);
    std::printf("\n");
  }
  std::printf("frozen zero modes: %zu\n", scan.trivial.size());
}

int cmd_find_scars(const RunConfig& cfg) {
  if (!has_spectrum_artifact(cfg)) {
    std::fprintf(stderr,
                 "find-scars: no spectrum artifact for this configuration; run `rkscar "
                 "spectrum` with the same flags first\n");
    return kExitValidation;
  }
  GaugeSector sector = ensure_sector(cfg);
  Spectrum spec = load_spectrum_artifact(cfg, sector);  // revalidates residuals
  ScanResult scan = scan_all(sector, spec, scan_options(cfg));
  for (const std::string& w : scan.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  SingletScan singlets = enumerate_scar_states(sector, spec);
  CrossValidation cv = cross_validate(scan, singlets, cfg.stab_tol);
  auto path = write_scar_artifact(cfg, scan, singlets, cv);

  print_scan(scan);
  std::printf("analytic singlets: %zu (%zu valid pairings, %zu rejected)\n",
              singlets.scars.size(), singlets.valid.size(), singlets.rejected.size());
  std::printf("cross-validation: numeric zero modes=%d analytic=%d overlap rank=%d residual=%.3e\n",
              cv.n_numeric, cv.n_analytic, cv.overlap_rank, cv.span_residual);
  std::printf("artifact: %s\n", path.string().c_str());
  if (!cv.pass) {
    std::fprintf(stderr, "find-scars: analytic and numeric scar sets disagree\n");
    std::fprintf(stderr, "  numeric zero modes: %d, overlap rank: %d, span residual: %.3e\n",
                 cv.n_numeric, cv.overlap_rank, cv.span_residual);
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_construct_singlets(const RunConfig& cfg) {
  GaugeSector sector = ensure_sector(cfg);
  Spectrum spec = ensure_spectrum(cfg, sector);
  for (PotentialParity parity : {PotentialParity::Even, PotentialParity::Odd}) {
    auto set = build_sublattice_config_set(sector, parity);
    std::printf("%s sublattice: %d active plaquettes, %d configurations, %zu pairings\n",
                parity_name(parity), set.num_active(), set.size(),
                enumerate_pairings(set).size());
  }
  SingletScan singlets = enumerate_scar_states(sector, spec);
  for (std::size_t i = 0; i < singlets.scars.size(); ++i) {
    const ScarRecord& r = singlets.scars[i];
    std::printf("singlet %zu: E=%g parity=%s support=%d k=%d svn=%.6f\n", i, r.energy,
                parity_name(r.active_parity), r.state.support_size(), r.form->k(),
                r.markers.svn);
  }
  std::printf("valid pairings: %zu, rejected (missing branch): %zu, independent states: %zu\n",
              singlets.valid.size(), singlets.rejected.size(), singlets.scars.size());
  return kExitOk;
}

int cmd_synthesize(const RunConfig& cfg, int scar_id) {
  GaugeSector sector = ensure_sector(cfg);
  Spectrum spec = ensure_spectrum(cfg, sector);
  ScanResult scan = scan_all(sector, spec, scan_options(cfg));
  if (scar_id < 0 || scar_id >= static_cast<int>(scan.scars.size())) {
    std::fprintf(stderr, "synthesize: unknown scar id %d (have %zu)\n", scar_id,
                 scan.scars.size());
    return kExitConfig;
  }
  const ScarRecord& rec = scan.scars[static_cast<std::size_t>(scar_id)];
  if (!rec.form) {
    std::fprintf(stderr,
                 "synthesize: scar %d is not a stabilizer state (origin %s); no Clifford "
                 "preparation exists\n",
                 scar_id, origin_name(rec.origin));
    return kExitValidation;
  }
  CliffordCircuit circuit =
      rec.state.support_size() == 2
          ? synthesize_two_branch(rec.state.words[0], rec.state.words[1], rec.state.n_qubits)
          : synthesize_from_canonical_form(*rec.form);
  StabilizerTableau tableau = simulate(circuit);
  VerifyReport report = verify_preparation(tableau, rec.state);
  double min_exp = 2.0;
  for (double e : report.expectations) min_exp = std::min(min_exp, e);
  auto files = write_circuit_artifacts(cfg, scar_id, circuit);
  std::printf("scar %d: E=%g support=%d route=%s\n", scar_id, rec.energy,
              rec.state.support_size(),
              rec.state.support_size() == 2 ? "two-branch" : "canonical-form");
  std::printf("gates: %zu (x=%d h=%d s=%d cz=%d cx=%d z=%d)\n", circuit.gates.size(),
              circuit.count(GateKind::X), circuit.count(GateKind::H), circuit.count(GateKind::S),
              circuit.count(GateKind::Cz), circuit.count(GateKind::Cnot),
              circuit.count(GateKind::Z));
  std::printf("verification: %s, min generator expectation %.12f\n",
              report.pass ? "pass" : "FAIL", min_exp);
  std::printf("artifacts: %s %s\n", files.qasm.string().c_str(), files.json.string().c_str());
  return report.pass ? kExitOk : kExitValidation;
}

int cmd_verify(const RunConfig& cfg) {
  GaugeSector sector = ensure_sector(cfg);
  Spectrum spec = ensure_spectrum(cfg, sector);
  ScanResult scan = scan_all(sector, spec, scan_options(cfg));
  int failures = 0;
  for (const std::string& w : scan.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
    ++failures;
  }
  SingletScan singlets = enumerate_scar_states(sector, spec);
  CrossValidation cv = cross_validate(scan, singlets, cfg.stab_tol);
  std::printf("cross-validation: %s (rank %d / %d, residual %.3e)\n", cv.pass ? "pass" : "FAIL",
              cv.overlap_rank, cv.n_numeric, cv.span_residual);
  if (!cv.pass) ++failures;
  for (std::size_t i = 0; i < scan.scars.size(); ++i) {
    const ScarRecord& rec = scan.scars[i];
    if (!rec.form) {
      std::printf("scar %zu: E=%g origin=%s, no stabilizer form (skipped)\n", i, rec.energy,
                  origin_name(rec.origin));
      continue;
    }
    try {
      validate_form(*rec.form);
    } catch (const std::exception& e) {
      std::printf("scar %zu: invalid canonical form: %s\n", i, e.what());
      ++failures;
      continue;
    }
    CliffordCircuit circuit = synthesize_from_canonical_form(*rec.form);
    VerifyReport report = verify_preparation(simulate(circuit), rec.state);
    std::printf("scar %zu: E=%g k=%d gates=%zu preparation %s\n", i, rec.energy, rec.form->k(),
                circuit.gates.size(), report.pass ? "pass" : "FAIL");
    if (!report.pass) ++failures;
  }
  if (failures > 0) {
    std::fprintf(stderr, "verify: %d failure(s)\n", failures);
    return kExitValidation;
  }
  std::printf("verify: all checks passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sublattice scars in the spin-1/2 RK lattice gauge model: exact sector "
               "diagonalization, stabilizer census, and Clifford preparation"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_dir = "artifacts";
  bool no_sre = false;
  app.add_option("--lx", cfg.lx, "lattice extent in x (even, >= 2)")->capture_default_str();
  app.add_option("--ly", cfg.ly, "lattice extent in y (even, >= 2)")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "RK coupling")->capture_default_str();
  app.add_option("--out", out_dir, "artifact directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_flag("--no-sre", no_sre, "skip stabilizer Renyi entropies in reports");
  app.add_option("--cluster-tol", cfg.cluster_tol, "degeneracy clustering tolerance (<= 0: adaptive)")
      ->capture_default_str();
  app.add_option("--stab-tol", cfg.stab_tol, "stabilizer / validation tolerance")
      ->capture_default_str();

  int scar_id = -1;
  auto* c_enum = app.add_subcommand("enumerate", "enumerate the gauge-invariant sector");
  auto* c_spec = app.add_subcommand("spectrum", "diagonalize and persist the spectrum");
  auto* c_report = app.add_subcommand("report", "canonical-basis diagnostics CSV");
  auto* c_find = app.add_subcommand("find-scars", "stabilizer scar census, cross-validated");
  auto* c_sing = app.add_subcommand("construct-singlets", "analytic dimer-singlet construction");
  auto* c_syn = app.add_subcommand("synthesize", "Clifford preparation circuit for one scar");
  c_syn->add_option("scar", scar_id, "scar index from find-scars")->required();
  auto* c_ver = app.add_subcommand("verify", "end-to-end revalidation of the pipeline");
  for (CLI::App* sub : {c_enum, c_spec, c_report, c_find, c_sing, c_syn, c_ver}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  cfg.out_dir = out_dir;
  cfg.sre_enabled = !no_sre;

  try {
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    if (c_enum->parsed()) return cmd_enumerate(cfg);
    if (c_spec->parsed()) return cmd_spectrum(cfg);
    if (c_report->parsed()) return cmd_report(cfg);
    if (c_find->parsed()) return cmd_find_scars(cfg);
    if (c_sing->parsed()) return cmd_construct_singlets(cfg);
    if (c_syn->parsed()) return cmd_synthesize(cfg, scar_id);
    if (c_ver->parsed()) return cmd_verify(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitConfig;
}
