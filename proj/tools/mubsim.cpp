// mubsim — multi-user bandit spectrum-access simulator.
//
//   mubsim run <config.ini> [--trials N] [--seed S] [--out DIR] [--parallel P]
//                           [--trace] [--plot]
//   mubsim run --from-manifest <manifest.json> [--out DIR]
//   mubsim validate <config.ini>
//
// Exit codes: 0 success, 2 config error, 3 runtime contract violation.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mub/config.hpp"
#include "mub/engine.hpp"
#include "mub/errors.hpp"
#include "mub/metrics.hpp"

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mub::ContractViolation("cannot write " + path.string());
  out << bytes;
}

std::string exponent_json(const mub::Batch& batch) {
  std::vector<double> t, r;
  for (size_t i = 0; i < batch.cp_t.size(); ++i) {
    t.push_back(double(batch.cp_t[i]));
    r.push_back(batch.mean_cum_regret[i]);
  }
  // fit over the last decade of checkpoints, T/10..T
  std::vector<double> ft, fr;
  double tmax = t.empty() ? 0.0 : t.back();
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] >= tmax / 10.0) {
      ft.push_back(t[i]);
      fr.push_back(r[i]);
    }
  auto fit = mub::growth_exponent(ft, fr);
  nlohmann::json j;
  j["slope"] = fit.slope;
  j["r2"] = fit.r2;
  j["points_used"] = fit.points_used;
  j["ok"] = fit.ok;
  j["range"] = {ft.empty() ? 0.0 : ft.front(), ft.empty() ? 0.0 : ft.back()};
  return j.dump(2) + "\n";
}

int do_run(const mub::LoadedExperiment& loaded, const std::string& config_path,
           long trials, uint64_t seed, int parallelism, bool trace, bool plot,
           const std::string& out_dir) {
  mub::Experiment exp = loaded.experiment;
  exp.record_rounds = exp.record_rounds || trace;

  fs::create_directories(out_dir);
  auto batch = mub::run_batch(exp, trials, seed, parallelism);

  std::vector<std::string> artifacts = {"aggregate.csv"};
  write_file(fs::path(out_dir) / "aggregate.csv", mub::aggregate_csv(batch));
  if (exp.record_rounds) {
    write_file(fs::path(out_dir) / "trace.csv", mub::trace_csv(batch));
    artifacts.push_back("trace.csv");
  }
  bool stochastic = exp.scenario == mub::Scenario::Stochastic ||
                    exp.scenario == mub::Scenario::DynamicStochastic;
  if (stochastic) {
    write_file(fs::path(out_dir) / "estimation.csv", mub::estimation_csv(batch));
    artifacts.push_back("estimation.csv");
    write_file(fs::path(out_dir) / "estimates.csv", mub::estimates_csv(batch));
    artifacts.push_back("estimates.csv");
  } else {
    write_file(fs::path(out_dir) / "exponent.json", exponent_json(batch));
    artifacts.push_back("exponent.json");
    if (exp.record_rounds) {
      write_file(fs::path(out_dir) / "exp3_states.csv", mub::exp3_states_csv(batch));
      artifacts.push_back("exp3_states.csv");
    }
  }
  if (plot) {
    write_file(fs::path(out_dir) / "regret.svg",
               mub::regret_svg(batch, exp.name + ": mean cumulative regret"));
    artifacts.push_back("regret.svg");
  }
  write_file(fs::path(out_dir) / "manifest.json",
             mub::manifest_json(loaded, config_path, trials, seed, parallelism, artifacts));

  std::cout << "wrote " << artifacts.size() + 1 << " artifacts to " << out_dir << "\n";
  if (!batch.mean_cum_regret.empty())
    std::cout << "final mean cumulative regret: " << batch.mean_cum_regret.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-user bandit spectrum-access simulator"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, out_dir;
  long trials = -1;
  long seed = -1;
  int parallelism = -1;
  bool trace = false, plot = false;

  const char* env_out = std::getenv("MUBSIM_OUT");
  std::string default_out = env_out ? env_out : "out";

  auto* run = app.add_subcommand("run", "execute an experiment and write CSV artifacts");
  run->add_option("config", config_path, "experiment config file");
  run->add_option("--from-manifest", manifest_path, "re-run from a manifest");
  run->add_option("--trials", trials, "trial count (default from config)");
  run->add_option("--seed", seed, "root seed (default from config)");
  run->add_option("--out", out_dir, "output directory (default $MUBSIM_OUT or ./out)");
  run->add_option("--parallel", parallelism, "worker threads for trials");
  run->add_flag("--trace", trace, "write the full per-round trace.csv");
  run->add_flag("--plot", plot, "write regret.svg");

  auto* validate = app.add_subcommand("validate", "check a config and print the report");
  validate->add_option("config", config_path)->required();

  CLI11_PARSE(app, argc, argv);
  if (out_dir.empty()) out_dir = default_out;

  try {
    if (validate->parsed()) {
      auto loaded = mub::load_experiment_file(config_path);
      auto report = mub::validate_experiment(loaded);
      std::cout << report.text();
      return report.config_ok ? 0 : 2;
    }
    mub::LoadedExperiment loaded;
    std::string origin;
    if (!manifest_path.empty()) {
      auto m = mub::load_manifest(manifest_path);
      loaded = mub::parse_experiment(m.config_text, manifest_path);
      origin = manifest_path;
      if (trials < 0) trials = m.trials;
      if (seed < 0) seed = static_cast<long>(m.seed);
      if (parallelism < 0) parallelism = m.parallelism;
    } else {
      if (config_path.empty())
        throw mub::ConfigError("run: provide a config file or --from-manifest");
      loaded = mub::load_experiment_file(config_path);
      origin = config_path;
    }
    if (trials < 0) trials = loaded.run.trials;
    if (seed < 0) seed = static_cast<long>(loaded.run.seed);
    if (parallelism < 0) parallelism = loaded.run.parallelism;
    return do_run(loaded, origin, trials, static_cast<uint64_t>(seed), parallelism,
                  trace, plot, out_dir);
  } catch (const mub::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
