// reswig command line: run / check / converge / report.
// Exit codes: 0 pass, 1 tolerance failure, 2 config or input error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "reswig/harness.hpp"

namespace fs = std::filesystem;
using namespace reswig;

namespace {

int report_config_error(const ConfigError& e) {
  std::cerr << "config error:\n";
  for (const std::string& s : e.issues()) std::cerr << "  " << s << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonant Wigner distributions on the flat torus: experiments and checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir;
  unsigned threads = 0;
  double tol_scale = 1.0;
  std::uint64_t seed = 20240611;

  CLI::App* run = app.add_subcommand("run", "Run an experiment config and write a run directory");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Run directory (overrides output.dir)");
  run->add_option("--threads", threads, "Worker threads (overrides workers)")->check(CLI::PositiveNumber);
  run->add_option("--tol-scale", tol_scale, "Multiplier for max_abs thresholds")->check(CLI::PositiveNumber);

  CLI::App* check = app.add_subcommand("check", "Run the randomized property suite");
  check->add_option("--seed", seed, "Generator seed");

  CLI::App* converge = app.add_subcommand("converge", "Sweep the schedule and fit rates only");
  converge->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  converge->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI::App* report = app.add_subcommand("report", "Re-render results.csv and the summary from summary.json");
  report->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load_config(config_path);
      RunOptions opt;
      opt.threads = threads;
      opt.tol_scale = tol_scale;
      const ConvergenceReport r = run_experiment(cfg, opt);
      const fs::path dir = out_dir.empty() ? fs::path(cfg.out_dir) : fs::path(out_dir);
      write_run(r, cfg, dir);
      print_summary(r, std::cout);
      std::cout << "wrote " << (dir / "results.csv").string() << '\n';
      return r.pass ? 0 : 1;
    }
    if (*check) return run_property_suite(std::cout, seed) ? 0 : 1;
    if (*converge) {
      const ExperimentConfig cfg = load_config(config_path);
      RunOptions opt;
      opt.threads = threads;
      opt.fit_all = true;
      const ConvergenceReport r = run_experiment(cfg, opt);
      print_summary(r, std::cout);
      return r.pass ? 0 : 1;
    }
    if (*report) {
      std::ifstream in(fs::path(run_dir) / "summary.json");
      if (!in) throw ConfigError({run_dir + "/summary.json: cannot open"});
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw ConfigError({std::string("summary.json: ") + e.what()});
      }
      const ConvergenceReport r = report_from_summary(j);
      std::ofstream(fs::path(run_dir) / "results.csv", std::ios::binary) << render_csv(r);
      print_summary(r, std::cout);
      return r.pass ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
