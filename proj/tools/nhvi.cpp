// nhvi: run, demo and validate discrete nonholonomic collision simulations.
//
//   nhvi run --config configs/ellipse.json --t-final 25 --out out/ellipse
//   nhvi run --sweep configs/*.json --out out/sweep
//   nhvi demo pendulum
//   nhvi validate --config configs/pendulum.json
//
// NHVI_LOG=error|info|debug controls solver tracing on stderr.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nhvi/io/checks.hpp"
#include "nhvi/io/config.hpp"
#include "nhvi/io/presets.hpp"
#include "nhvi/io/run.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::optional<double> h;
  std::optional<double> t_final;
};

std::shared_ptr<spdlog::logger> make_logger() {
  auto log = spdlog::stderr_color_mt("nhvi");
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("NHVI_LOG")) {
    const std::string level = env;
    if (level == "error") log->set_level(spdlog::level::err);
    else if (level == "info") log->set_level(spdlog::level::info);
    else if (level == "debug") log->set_level(spdlog::level::debug);
    else log->warn("ignoring NHVI_LOG='{}' (expected error, info or debug)", level);
  }
  return log;
}

nhvi::TraceSink trace_to(const std::shared_ptr<spdlog::logger>& log, const std::string& tag) {
  if (!log->should_log(spdlog::level::info)) return {};
  return [log, tag](nhvi::TraceLevel level, const std::string& msg) {
    if (level == nhvi::TraceLevel::Debug) log->debug("{}{}", tag, msg);
    else log->info("{}{}", tag, msg);
  };
}

void apply(nhvi::io::SimConfig& c, const Overrides& o) {
  if (o.h) c.h = *o.h;
  if (o.t_final) c.t_final = *o.t_final;
  nhvi::io::validate(c);
}

// Runs one config; failures leave error.json behind and map to exit codes.
int run_one(const nhvi::io::SimConfig& config, const fs::path& out_dir,
            const std::shared_ptr<spdlog::logger>& log, const std::string& tag = {}) {
  try {
    const auto res = nhvi::io::run_to_directory(config, out_dir, trace_to(log, tag));
    const auto& r = res.report;
    fmt::print("{}{} steps, {} impacts, energy drift {:.3e}, max |omega_d| {:.3e}, {:.2f} s -> {}\n",
               tag, r.steps, r.impact_count, r.energy_drift_rel, r.max_constraint_residual,
               res.wall_seconds, out_dir.string());
    return kExitOk;
  } catch (const nhvi::Error& e) {
    log->error("{}{}", tag, e.what());
    return e.kind() == nhvi::ErrorKind::SchemaError ||
                   e.kind() == nhvi::ErrorKind::DimensionMismatch
               ? kExitUsage
               : kExitSolver;
  }
}

int run_sweep(const std::vector<std::string>& paths, const Overrides& overrides,
              const fs::path& out_root, int jobs, const std::shared_ptr<spdlog::logger>& log) {
  std::vector<nhvi::io::SimConfig> configs;
  std::vector<fs::path> dirs;
  for (const auto& p : paths) {
    auto c = nhvi::io::parse_config(fs::path(p));
    apply(c, overrides);
    configs.push_back(std::move(c));
    dirs.push_back(out_root / fs::path(p).stem());
  }
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dirs[i] == dirs[j]) {
        throw nhvi::Error(nhvi::ErrorKind::SchemaError,
                          "two sweep configs share the output directory " + dirs[i].string());
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kExitOk};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const int rc = run_one(configs[i], dirs[i], log, "[" + fs::path(paths[i]).stem().string() + "] ");
      int prev = worst.load();
      while (rc > prev && !worst.compare_exchange_weak(prev, rc)) {
      }
    }
  };
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

int validate_config(const nhvi::io::SimConfig& config) {
  bool ok = true;
  for (const auto& r : nhvi::io::run_checks(config)) {
    fmt::print("{} {:<18} {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete nonholonomic variational integrator with elastic impacts"};
  // --h is the timestep, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Overrides overrides;
  std::string out_dir;
  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--h", overrides.h, "Timestep override")->check(CLI::PositiveNumber);
    sub->add_option("--t-final", overrides.t_final, "Final time override");
    sub->add_option("--out", out_dir, "Output directory");
  };

  auto* run = app.add_subcommand("run", "Integrate a config file and write its artifacts");
  std::string config_path;
  std::vector<std::string> sweep;
  int jobs = 0;
  auto* config_opt = run->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  auto* sweep_opt = run->add_option("--sweep", sweep, "Several configs, run in parallel")
                        ->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "Parallel workers for --sweep (default: all cores)");
  config_opt->excludes(sweep_opt);
  add_overrides(run);

  auto* demo = app.add_subcommand("demo", "Run a built-in experiment");
  std::string demo_name;
  demo->add_option("name", demo_name, "particle, ellipse or pendulum")
      ->required()
      ->check(CLI::IsMember({"particle", "ellipse", "pendulum"}));
  add_overrides(demo);

  auto* validate = app.add_subcommand("validate", "Check a config without integrating");
  std::string validate_path;
  validate->add_option("--config", validate_path, "JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  add_overrides(validate);

  CLI11_PARSE(app, argc, argv);
  const auto log = make_logger();

  try {
    if (run->parsed()) {
      if (!sweep.empty()) {
        return run_sweep(sweep, overrides, out_dir.empty() ? "out/sweep" : out_dir, jobs, log);
      }
      if (config_path.empty()) {
        log->error("run needs --config or --sweep");
        return kExitUsage;
      }
      auto c = nhvi::io::parse_config(fs::path(config_path));
      apply(c, overrides);
      return run_one(c, out_dir.empty() ? fs::path("out") / fs::path(config_path).stem()
                                        : fs::path(out_dir),
                     log);
    }
    if (demo->parsed()) {
      auto c = nhvi::io::preset(demo_name);
      apply(c, overrides);
      return run_one(c, out_dir.empty() ? fs::path("out") / demo_name : fs::path(out_dir), log);
    }
    auto c = nhvi::io::parse_config(fs::path(validate_path));
    apply(c, overrides);
    return validate_config(c);
  } catch (const nhvi::Error& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitUsage;
  }
}
