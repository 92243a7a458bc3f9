#include "rks/artifacts.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rks {

namespace {

using nlohmann::json;

const char* parity_name(PotentialParity p) {
  switch (p) {
    case PotentialParity::Even: return "even";
    case PotentialParity::Odd: return "odd";
    case PotentialParity::Both: return "both";
  }
  throw std::logic_error("unknown parity");
}

const char* origin_name(ScarOrigin o) {
  switch (o) {
    case ScarOrigin::Census: return "census";
    case ScarOrigin::MaxOrthogonal: return "max_orthogonal";
    case ScarOrigin::SymmetryFlat: return "symmetry_flat";
    case ScarOrigin::Frozen: return "frozen";
    case ScarOrigin::Analytic: return "analytic";
  }
  throw std::logic_error("unknown origin");
}

std::string format_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// IEEE -0.0 + 0.0 = +0.0; keeps persisted text free of negative zeros.
double unsign_zero(double x) { return x + 0.0; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json pairing_json(const DimerPairing& d) {
  json pairs = json::array();
  for (auto [a, b] : d.pairs) pairs.push_back(json::array({a, b}));
  return json{{"pairs", pairs}, {"parity", parity_name(d.parity)}};
}

json scar_record_json(const ScarRecord& rec, int id) {
  json j;
  j["id"] = id;
  j["E"] = rec.energy;
  j["n"] = rec.kin_eigenvalue;
  j["parity"] = parity_name(rec.active_parity);
  j["origin"] = origin_name(rec.origin);
  j["support_size"] = rec.state.support_size();
  json words = json::array();
  for (Word w : rec.state.words) words.push_back(w);
  j["support_words"] = words;
  if (rec.form) {
    j["form"] = json::parse(form_to_json(*rec.form));
  } else {
    j["form"] = nullptr;
  }
  j["flatness"] = unsign_zero(rec.markers.flatness);
  j["svn"] = unsign_zero(rec.markers.svn);
  if (rec.markers.m2) {
    j["m2"] = unsign_zero(*rec.markers.m2);
  } else {
    j["m2"] = nullptr;
  }
  if (rec.translation_phases) {
    json ph = json::array();
    for (const Complex& c : *rec.translation_phases) ph.push_back(json::array({c.real(), c.imag()}));
    j["translation_phases"] = ph;
  } else {
    j["translation_phases"] = nullptr;
  }
  return j;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  build_geometry(cfg.lx, cfg.ly);  // throws on bad extents
  if (!std::isfinite(cfg.lambda)) throw std::invalid_argument("lambda must be finite");
  if (!std::isfinite(cfg.cluster_tol)) throw std::invalid_argument("cluster_tol must be finite");
  if (!(cfg.stab_tol > 0.0)) throw std::invalid_argument("stab_tol must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (cfg.out_dir.empty()) throw std::invalid_argument("output directory must be set");
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions opt;
  opt.cluster_tol = cfg.cluster_tol;
  opt.stab_tol = cfg.stab_tol;
  opt.threads = cfg.threads;
  return opt;
}

std::string config_key(const RunConfig& cfg) {
  std::string text = std::to_string(cfg.lx) + "|" + std::to_string(cfg.ly) + "|" +
                     format_double(cfg.lambda) + "|" + format_double(cfg.cluster_tol) + "|" +
                     format_double(cfg.stab_tol);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path artifact_path(const RunConfig& cfg, const std::string& kind,
                                    const std::string& ext) {
  std::string name = kind + "_" + std::to_string(cfg.lx) + "x" + std::to_string(cfg.ly) + "_" +
                     config_key(cfg) + "." + ext;
  return cfg.out_dir / name;
}

// --- sector ---------------------------------------------------------------

std::filesystem::path write_sector_artifact(const RunConfig& cfg, const GaugeSector& sector) {
  json j;
  j["lx"] = sector.geometry.lx;
  j["ly"] = sector.geometry.ly;
  j["num_links"] = sector.geometry.num_links();
  j["dim"] = sector.dim();
  json configs = json::array();
  for (Word w : sector.configs) configs.push_back(w);
  j["configs"] = configs;
  auto path = artifact_path(cfg, "sector", "json");
  write_text(path, j.dump(2) + "\n");
  return path;
}

bool has_sector_artifact(const RunConfig& cfg) {
  return std::filesystem::exists(artifact_path(cfg, "sector", "json"));
}

GaugeSector load_sector_artifact(const RunConfig& cfg) {
  auto path = artifact_path(cfg, "sector", "json");
  json j = json::parse(read_text(path));
  if (j.at("lx").get<int>() != cfg.lx || j.at("ly").get<int>() != cfg.ly) {
    throw std::runtime_error("sector artifact extent mismatch: " + path.string());
  }
  GaugeSector sector;
  sector.geometry = build_geometry(cfg.lx, cfg.ly);
  for (const json& jw : j.at("configs")) sector.configs.push_back(jw.get<Word>());
  if (static_cast<int>(sector.configs.size()) != j.at("dim").get<int>()) {
    throw std::runtime_error("sector artifact dim mismatch: " + path.string());
  }
  Word prev = 0;
  bool first = true;
  for (Word w : sector.configs) {
    if (!first && w <= prev) throw std::runtime_error("sector artifact not sorted: " + path.string());
    if (!satisfies_gauss_law(sector.geometry, w)) {
      throw std::runtime_error("sector artifact violates the Gauss law: " + path.string());
    }
    prev = w;
    first = false;
  }
  return sector;
}

GaugeSector ensure_sector(const RunConfig& cfg) {
  if (has_sector_artifact(cfg)) return load_sector_artifact(cfg);
  GaugeSector sector = enumerate_gauge_sector(build_geometry(cfg.lx, cfg.ly));
  write_sector_artifact(cfg, sector);
  return sector;
}

// --- spectrum -------------------------------------------------------------

std::filesystem::path write_spectrum_artifact(const RunConfig& cfg, const GaugeSector& sector,
                                              const Spectrum& spec) {
  auto op = build_hamiltonian(sector, cfg.lambda);
  double residual = max_eigenpair_residual(op, spec);

  auto vec_path = artifact_path(cfg, "spectrum", "vec.bin");
  std::filesystem::create_directories(vec_path.parent_path());
  {
    std::ofstream out(vec_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + vec_path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(spec.eigenvectors.data()),
              static_cast<std::streamsize>(sizeof(double)) * spec.eigenvectors.size());
    if (!out) throw std::runtime_error("write failed: " + vec_path.string());
  }

  json j;
  j["lambda"] = spec.lambda;
  j["dim"] = spec.dim();
  j["residual"] = residual;
  j["vec_file"] = vec_path.filename().string();
  json energies = json::array();
  for (int i = 0; i < spec.dim(); ++i) energies.push_back(spec.eigenvalues(i));
  j["energies"] = energies;
  auto path = artifact_path(cfg, "spectrum", "json");
  write_text(path, j.dump(2) + "\n");
  return path;
}

bool has_spectrum_artifact(const RunConfig& cfg) {
  return std::filesystem::exists(artifact_path(cfg, "spectrum", "json")) &&
         std::filesystem::exists(artifact_path(cfg, "spectrum", "vec.bin"));
}

Spectrum load_spectrum_artifact(const RunConfig& cfg, const GaugeSector& sector) {
  auto path = artifact_path(cfg, "spectrum", "json");
  json j = json::parse(read_text(path));
  int dim = j.at("dim").get<int>();
  if (dim != sector.dim()) throw std::runtime_error("spectrum artifact dim mismatch: " + path.string());
  if (std::abs(j.at("lambda").get<double>() - cfg.lambda) > 1e-12) {
    throw std::runtime_error("spectrum artifact lambda mismatch: " + path.string());
  }

  Spectrum spec;
  spec.lambda = cfg.lambda;
  spec.eigenvalues.resize(dim);
  int i = 0;
  for (const json& je : j.at("energies")) spec.eigenvalues(i++) = je.get<double>();
  if (i != dim) throw std::runtime_error("spectrum artifact energy count mismatch: " + path.string());

  auto vec_path = artifact_path(cfg, "spectrum", "vec.bin");
  std::ifstream in(vec_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + vec_path.string());
  spec.eigenvectors.resize(dim, dim);
  in.read(reinterpret_cast<char*>(spec.eigenvectors.data()),
          static_cast<std::streamsize>(sizeof(double)) * spec.eigenvectors.size());
  if (in.gcount() != static_cast<std::streamsize>(sizeof(double)) * spec.eigenvectors.size()) {
    throw std::runtime_error("spectrum vector file truncated: " + vec_path.string());
  }

  // Same residual contract the in-process diagonalization enforces.  The
  // column-norm check catches corruption inside degenerate eigenspaces, which
  // the residual alone cannot see.
  for (int c = 0; c < dim; ++c) {
    if (std::abs(spec.eigenvectors.col(c).norm() - 1.0) > 1e-10) {
      throw std::runtime_error("spectrum artifact eigenvector " + std::to_string(c) +
                               " is not normalized: " + vec_path.string());
    }
  }
  auto op = build_hamiltonian(sector, cfg.lambda);
  double residual = max_eigenpair_residual(op, spec);
  double bound = 1e-10 * std::max(1.0, op.frobenius_norm());
  if (residual > bound) {
    throw std::runtime_error("spectrum artifact fails the residual contract: residual " +
                             format_double(residual) + " > " + format_double(bound));
  }
  return spec;
}

Spectrum ensure_spectrum(const RunConfig& cfg, const GaugeSector& sector) {
  if (has_spectrum_artifact(cfg)) return load_spectrum_artifact(cfg, sector);
  Spectrum spec = diagonalize(build_hamiltonian(sector, cfg.lambda));
  write_spectrum_artifact(cfg, sector, spec);
  return spec;
}

// --- diagnostics report ---------------------------------------------------

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "index,E,kin,pot_even,pot_odd,flatness,svn,m2\n";
  char buf[256];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e", r.index,
                  unsign_zero(r.energy), unsign_zero(r.kin), unsign_zero(r.pot_even),
                  unsign_zero(r.pot_odd), unsign_zero(r.flatness), unsign_zero(r.svn));
    out += buf;
    if (r.has_m2) {
      std::snprintf(buf, sizeof(buf), ",%.12e", unsign_zero(r.m2));
      out += buf;
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

std::filesystem::path write_report_artifact(const RunConfig& cfg,
                                            const std::vector<ReportRow>& rows) {
  auto path = artifact_path(cfg, "report", "csv");
  write_text(path, report_csv(rows));
  return path;
}

// --- scars ----------------------------------------------------------------

CrossValidation cross_validate(const ScanResult& scan, const SingletScan& singlets, double tol) {
  CrossValidation cv;
  std::vector<const Eigen::VectorXcd*> numeric;
  for (const ScarRecord& rec : scan.scars) {
    if (rec.kin_eigenvalue == 0) numeric.push_back(&rec.coeffs);
  }
  cv.n_numeric = static_cast<int>(numeric.size());
  cv.n_analytic = static_cast<int>(singlets.scars.size());
  if (cv.n_numeric == 0 || cv.n_analytic == 0) return cv;

  Eigen::Index dim = numeric.front()->size();
  Eigen::MatrixXcd a(dim, cv.n_numeric), b(dim, cv.n_analytic);
  for (int i = 0; i < cv.n_numeric; ++i) a.col(i) = *numeric[static_cast<std::size_t>(i)];
  for (int i = 0; i < cv.n_analytic; ++i) b.col(i) = singlets.scars[static_cast<std::size_t>(i)].coeffs;

  Eigen::MatrixXcd overlap = a.adjoint() * b;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap);
  double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1e-8 * std::max(1.0, top)) ++cv.overlap_rank;
  }

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(b);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, cv.n_analytic);
  for (int i = 0; i < cv.n_numeric; ++i) {
    const Eigen::VectorXcd& v = a.col(i);
    double res = (v - q * (q.adjoint() * v)).norm();
    cv.span_residual = std::max(cv.span_residual, res);
  }
  cv.pass = cv.overlap_rank == cv.n_numeric && cv.span_residual <= tol;
  return cv;
}

std::string scar_json(const RunConfig& cfg, const ScanResult& scan, const SingletScan& singlets,
                      const CrossValidation& cv) {
  json j;
  j["key"] = config_key(cfg);
  j["lambda"] = cfg.lambda;
  j["lattice"] = json{{"lx", cfg.lx}, {"ly", cfg.ly}, {"num_links", 2 * cfg.lx * cfg.ly}};

  json numeric;
  json scars = json::array();
  for (std::size_t i = 0; i < scan.scars.size(); ++i) {
    scars.push_back(scar_record_json(scan.scars[i], static_cast<int>(i)));
  }
  numeric["scars"] = scars;
  json trivial = json::array();
  for (const ScarRecord& rec : scan.trivial) trivial.push_back(rec.state.words.at(0));
  numeric["frozen_configs"] = trivial;
  numeric["warnings"] = scan.warnings;
  j["numeric"] = numeric;

  json analytic;
  json states = json::array();
  for (std::size_t i = 0; i < singlets.scars.size(); ++i) {
    states.push_back(scar_record_json(singlets.scars[i], static_cast<int>(i)));
  }
  analytic["states"] = states;
  json valid = json::array();
  for (const DimerPairing& d : singlets.valid) valid.push_back(pairing_json(d));
  analytic["valid_pairings"] = valid;
  json rejected = json::array();
  for (const DimerPairing& d : singlets.rejected) rejected.push_back(pairing_json(d));
  analytic["rejected_pairings"] = rejected;
  j["analytic"] = analytic;

  j["cross_validation"] = json{{"n_numeric", cv.n_numeric},
                               {"n_analytic", cv.n_analytic},
                               {"overlap_rank", cv.overlap_rank},
                               {"span_residual", cv.span_residual},
                               {"pass", cv.pass}};
  return j.dump(2) + "\n";
}

std::filesystem::path write_scar_artifact(const RunConfig& cfg, const ScanResult& scan,
                                          const SingletScan& singlets, const CrossValidation& cv) {
  auto path = artifact_path(cfg, "scars", "json");
  write_text(path, scar_json(cfg, scan, singlets, cv));
  return path;
}

// --- circuits -------------------------------------------------------------

CircuitArtifacts write_circuit_artifacts(const RunConfig& cfg, int scar_id,
                                         const CliffordCircuit& circuit) {
  std::string kind = "circuit-scar" + std::to_string(scar_id);
  CircuitArtifacts out;
  out.qasm = artifact_path(cfg, kind, "qasm");
  write_text(out.qasm, export_qasm(circuit));
  out.json = artifact_path(cfg, kind, "json");
  write_text(out.json, circuit_to_json(circuit) + "\n");
  return out;
}

}  // namespace rks
