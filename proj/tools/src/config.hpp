#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoperiods/curve.hpp"
#include "geoperiods/surface.hpp"
#include "json.hpp"

namespace geoperiods::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error("config error at " + (pointer.empty() ? std::string("/") : pointer) +
                           ": " + what),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Typed view of one JSON object that remembers which keys were read, so
/// `finish` can reject everything else.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string pointer);

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return ptr_ + "/" + key; }
  const std::string& pointer() const { return ptr_; }

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer(const std::string& key, long fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::array<double, 2> pair(const std::string& key, std::array<double, 2> fallback);
  ObjectReader object(const std::string& key);
  const json& raw(const std::string& key);

  /// Throws ConfigError naming the first unread key.
  void finish() const;

 private:
  const json& at(const std::string& key);

  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

struct SurfaceConfig {
  std::string kind = "hyperbolic";
  double L1 = 0, L2 = 0, a = 1, R = 1;
  std::string field;
  double beta = 0.05, x0 = 0, y0 = 1, sigma = 0.5;

  SurfaceSpec build() const;
};

struct CurveConfig {
  std::string kind = "geodesic_circle";
  std::array<double, 2> center{0, 1};
  double radius = 1;
  bool ccw = true;
  long cache = 4096;
  double ell = 1, y0 = 1, d = 1, eta = 0;
  long m = 1, n = 0, k = 0;
  std::string path;

  Curve build(const SurfaceSpec& S) const;
};

struct DeckConfig {
  std::string kind = "axis_translation";
  double length = 6;
  long m = 1, n = 0;
  double a = 1, b = 0, c = 0, d = 1;

  DeckTransform build() const;
};

struct EigenConfig {
  std::string family;
  bool cosine = false;
  long terms = 16;
  double spread = 4;
  long ensemble = 16;
};

struct PureConfig {
  double a = 0, b = 0;
  std::optional<double> eps0;
  double delta = 0.5;
  long n = 33;
};

struct PhaseConfig {
  DeckConfig deck;
  double eps = 0;
  long grid = 64;
  double r_min = 1;
  double slack = 1e-4;
  bool sandwich = true;
  long seeds = 8;
  std::optional<PureConfig> pure;
};

struct ExperimentConfig {
  std::string subcommand;
  SurfaceConfig surface;
  CurveConfig curve;
  std::optional<EigenConfig> eigen;
  std::vector<double> lambda;
  std::vector<double> eps;
  long envelope = 8;
  long quad_samples = 0;
  long samples = 64;
  long n_eps = 1001;
  double k_tol = 1e-8;
  PhaseConfig phase;
  std::uint64_t seed = 0;
  std::string output = "out";
  json canonical;  // hashed form: input with seed applied, output removed

  std::uint64_t hash() const;
  std::string hash_hex() const;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"limiting_curvature", "admissibility",
                                              "periods_scan", "phase_check", "decay_scan"};
  return names;
}

/// FNV-1a over the sorted-key dump.
std::uint64_t fnv1a64(const std::string& bytes);
json read_json_file(const std::filesystem::path& p);
/// Validates everything before any computation starts.
ExperimentConfig parse_config(const json& j, const std::string& subcommand,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace geoperiods::cli
