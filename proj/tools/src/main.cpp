#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "geoperiods/errors.hpp"
#include "runner.hpp"

namespace gc = geoperiods::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  unsigned jobs = 0;
  std::optional<std::uint64_t> seed;
  bool no_cache = false;
};

int execute(const std::string& sub, const Options& o) {
  const gc::ExperimentConfig cfg = gc::parse_config(gc::read_json_file(o.config), sub, o.seed);
  const std::filesystem::path out = std::filesystem::path(o.out.empty() ? cfg.output : o.out);
  const std::filesystem::path cache = gc::cache_dir();
  std::optional<gc::ResultBundle> bundle;
  if (!o.no_cache) bundle = gc::cache_load(cache, cfg.hash_hex());
  const bool hit = bundle.has_value();
  if (!hit) {
    bundle = gc::run(cfg, o.jobs);
    if (!o.no_cache) {
      try {
        gc::cache_store(cache, *bundle);
      } catch (const std::exception& e) {
        std::cerr << "warning: cache not written: " << e.what() << "\n";
      }
    }
  }
  bundle->metadata["cache"] = hit ? "hit" : "miss";
  gc::write_bundle(*bundle, out);
  std::cout << sub << " " << cfg.hash_hex() << (hit ? " (cached)" : "") << " -> " << out.string()
            << "\n"
            << bundle->summary.dump(2) << "\n";
  return bundle->status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoperiods: limiting curvature, admissibility, generalized periods and phase checks"};
  app.require_subcommand(1, 1);
  Options opt;
  for (const auto& name : gc::subcommands()) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", opt.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    s->add_option("--out", opt.out, "output directory (overrides the config)");
    s->add_option("--jobs", opt.jobs, "worker threads (0 = hardware)");
    s->add_option("--seed", opt.seed, "override the config seed");
    s->add_flag("--no-cache", opt.no_cache, "ignore and do not update the result cache");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gc::kConfigError;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return execute(sub, opt);
  } catch (const gc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return gc::kConfigError;
  } catch (const geoperiods::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return gc::kConvergenceError;
  } catch (const geoperiods::EscapeError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return gc::kConvergenceError;
  } catch (const geoperiods::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gc::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
