// Command-line front end: single runs, experiment matrices, config
// validation, and metric recomputation from event logs.
//
// Exit codes: 0 success, 1 configuration error, 2 run failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dilsim/config.hpp"
#include "dilsim/replay.hpp"
#include "dilsim/scenario.hpp"

using namespace dilsim;

namespace {

int cmd_run(const std::string& cfgPath, std::int64_t seedOverride,
            const std::string& out, bool logEvents) {
  ScenarioConfig cfg;
  try {
    cfg = parse_config_file(cfgPath);
    if (seedOverride >= 0) cfg.seed = static_cast<std::uint64_t>(seedOverride);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  const std::string dir = out.empty() ? "out/run_" + cfg.run_key() : out;
  const RunResult r = run_scenario(cfg, dir, logEvents);
  if (r.failed) {
    std::cerr << "run failed: " << r.error << "\n";
    return 2;
  }
  std::cout << "run " << r.key << " -> " << dir << "\n";
  for (const auto& s : r.summaries) {
    std::printf(
        "  consumer %d: delivered %lld/%u, goodput %.1f bit/s, "
        "mean delay %.3f s, mean hops %.2f, loss rate %.4f\n",
        s.consumer, static_cast<long long>(s.chunksDelivered), cfg.fileChunks,
        s.goodputBps, s.meanDelayS, s.meanHopCount, s.lossRate);
  }
  return 0;
}

int cmd_matrix(const std::string& cfgPath, const std::string& out, int jobs,
               bool logEvents) {
  MatrixConfig m;
  try {
    m = parse_matrix_file(cfgPath);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  const std::string dir = out.empty() ? "out/matrix" : out;
  const auto results = run_matrix(m, dir, jobs, logEvents);
  int failures = 0;
  for (const auto& r : results) {
    if (r.failed) {
      ++failures;
      std::cerr << "failed: " << r.key << ": " << r.error << "\n";
    }
  }
  std::cout << results.size() - failures << "/" << results.size()
            << " runs ok; outputs in " << dir << "\n";
  return failures == 0 ? 0 : 2;
}

int cmd_validate(const std::string& cfgPath) {
  try {
    const ScenarioConfig cfg = parse_config_file(cfgPath);
    // also exercise the layout checks without running
    build_scenario(cfg);
    std::cout << config_to_json(cfg) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_replay(const std::string& logPath, const std::string& out) {
  try {
    const ReplayResult r = replay_event_log(logPath);
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      std::ofstream(out + "/chunks.csv") << r.chunksCsv;
      std::ofstream(out + "/summary.csv") << r.summaryCsv;
      std::cout << "replayed metrics written to " << out << "\n";
    } else {
      std::cout << r.summaryCsv;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "replay failed: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dilsim: NDN vs OLSR wireless ad hoc network simulator"};
  app.require_subcommand(1);

  std::string cfgPath, out, logPath;
  std::int64_t seed = -1;
  int jobs = 0;
  bool logEvents = false;

  auto* run = app.add_subcommand("run", "run a single scenario");
  run->add_option("--config", cfgPath, "scenario config JSON")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "output directory");
  run->add_flag("--log-events", logEvents, "write events.ndjson");

  auto* matrix = app.add_subcommand("matrix", "run a scenario sweep");
  matrix->add_option("--config", cfgPath, "matrix config JSON")->required();
  matrix->add_option("--out", out, "output directory");
  matrix->add_option("--jobs", jobs, "parallel runs (default: cores)");
  matrix->add_flag("--log-events", logEvents, "write events.ndjson per run");

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("--config", cfgPath, "scenario config JSON")
      ->required();

  auto* replay = app.add_subcommand("replay", "recompute metrics from a log");
  replay->add_option("--log", logPath, "events.ndjson path")->required();
  replay->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(cfgPath, seed, out, logEvents);
  if (matrix->parsed()) return cmd_matrix(cfgPath, out, jobs, logEvents);
  if (validate->parsed()) return cmd_validate(cfgPath);
  if (replay->parsed()) return cmd_replay(logPath, out);
  return 1;
}
