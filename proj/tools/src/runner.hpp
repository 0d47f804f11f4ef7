#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace geoperiods::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kConvergenceError = 3, kHypothesisNotMet = 4 };

struct ResultBundle {
  std::string hash;
  std::string subcommand;
  std::map<std::string, std::string> csv;  // file name → contents
  json summary;
  json metadata;  // versions, seed, runtime; not part of the reproducible payload
  std::string plot_script;
  int status = kOk;
};

ResultBundle run_limiting_curvature(const ExperimentConfig& cfg, unsigned jobs = 0);
ResultBundle run_admissibility(const ExperimentConfig& cfg, unsigned jobs = 0);
ResultBundle run_periods_scan(const ExperimentConfig& cfg, unsigned jobs = 0);
ResultBundle run_phase_check(const ExperimentConfig& cfg, unsigned jobs = 0);
ResultBundle run_decay_scan(const ExperimentConfig& cfg, unsigned jobs = 0);
ResultBundle run(const ExperimentConfig& cfg, unsigned jobs = 0);

/// Writes every CSV, `summary.json`, `metadata.json` and `plot.py` into `dir`.
void write_bundle(const ResultBundle& b, const std::filesystem::path& dir);

json bundle_to_json(const ResultBundle& b);
ResultBundle bundle_from_json(const json& j);

/// $GEOPERIODS_CACHE, else $XDG_CACHE_HOME/geoperiods, else ~/.cache/geoperiods.
std::filesystem::path cache_dir();
std::optional<ResultBundle> cache_load(const std::filesystem::path& dir, const std::string& hash);
/// Write-temp-then-rename.
void cache_store(const std::filesystem::path& dir, const ResultBundle& b);
void atomic_write(const std::filesystem::path& target, const std::string& contents);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation with average ranks for ties; 0 for fewer than two points.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);
/// Lattice frequency k = (2πm1/L1, 2πm2/L2), m1, m2 ≥ 0, with |k| nearest to rho.
std::pair<long, long> nearest_lattice_vector(double L1, double L2, double rho);

/// Round-trip decimal (printf %.17g).
std::string fmt(double x);

}  // namespace geoperiods::cli
