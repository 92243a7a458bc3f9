#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rks/clifford.hpp"
#include "rks/diagnostics.hpp"
#include "rks/lattice.hpp"
#include "rks/operators.hpp"
#include "rks/scar_search.hpp"
#include "rks/singlet.hpp"

namespace rks {

// One pipeline run; validated before any compute.
struct RunConfig {
  int lx = 2;
  int ly = 2;
  double lambda = 1.0;
  std::filesystem::path out_dir = "artifacts";
  double cluster_tol = 0.0;  // <= 0: adaptive scan default
  double stab_tol = 1e-8;
  bool sre_enabled = true;  // forced off beyond 16 links regardless
  int threads = 1;
};

// Throws std::invalid_argument on bad extents, nonpositive thread count, or
// nonpositive stab_tol.
void validate_config(const RunConfig& cfg);

ScanOptions scan_options(const RunConfig& cfg);

// 16-hex FNV-1a over (lx, ly, lambda, cluster_tol, stab_tol); every artifact
// of one run shares the key, so commands can reuse each other's files.
std::string config_key(const RunConfig& cfg);

// out_dir / "<kind>_<lx>x<ly>_<key>.<ext>"
std::filesystem::path artifact_path(const RunConfig& cfg, const std::string& kind,
                                    const std::string& ext);

// --- sector ---------------------------------------------------------------
std::filesystem::path write_sector_artifact(const RunConfig& cfg, const GaugeSector& sector);
bool has_sector_artifact(const RunConfig& cfg);
// Throws std::runtime_error on missing file, size mismatch, unsorted configs,
// or any Gauss-law violation.
GaugeSector load_sector_artifact(const RunConfig& cfg);
// Cached load when present, else enumerate and persist.
GaugeSector ensure_sector(const RunConfig& cfg);

// --- spectrum -------------------------------------------------------------
// JSON metadata (lambda, dim, energies, stored residual) next to a raw
// little-endian column-major double .vec.bin with the eigenvectors.
std::filesystem::path write_spectrum_artifact(const RunConfig& cfg, const GaugeSector& sector,
                                              const Spectrum& spec);
bool has_spectrum_artifact(const RunConfig& cfg);
// Rebuilds the Hamiltonian over `sector` and revalidates the eigenpair
// residual against the diagonalization contract before returning.
Spectrum load_spectrum_artifact(const RunConfig& cfg, const GaugeSector& sector);
Spectrum ensure_spectrum(const RunConfig& cfg, const GaugeSector& sector);

// --- diagnostics report ---------------------------------------------------
// Header `index,E,kin,pot_even,pot_odd,flatness,svn,m2`, floats %.12e, m2
// empty when not evaluated; byte-identical across reruns.
std::string report_csv(const std::vector<ReportRow>& rows);
std::filesystem::path write_report_artifact(const RunConfig& cfg,
                                            const std::vector<ReportRow>& rows);

// --- scars ----------------------------------------------------------------
struct CrossValidation {
  int n_numeric = 0;           // zero-mode (n = 0) numeric scars
  int n_analytic = 0;          // deduplicated singlet states
  int overlap_rank = 0;        // rank of the numeric x analytic overlap matrix
  double span_residual = 0.0;  // worst ||v - P_analytic v|| over numeric zero modes
  bool pass = false;
};

// Numeric zero modes must be reproduced by the analytic construction: full
// overlap rank and span residual within tol.
CrossValidation cross_validate(const ScanResult& scan, const SingletScan& singlets,
                               double tol = 1e-8);

std::string scar_json(const RunConfig& cfg, const ScanResult& scan, const SingletScan& singlets,
                      const CrossValidation& cv);
std::filesystem::path write_scar_artifact(const RunConfig& cfg, const ScanResult& scan,
                                          const SingletScan& singlets, const CrossValidation& cv);

// --- circuits -------------------------------------------------------------
struct CircuitArtifacts {
  std::filesystem::path qasm;
  std::filesystem::path json;
};

CircuitArtifacts write_circuit_artifacts(const RunConfig& cfg, int scar_id,
                                         const CliffordCircuit& circuit);

}  // namespace rks
