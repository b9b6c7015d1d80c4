// Command-line front end: sweeps, single runs, parameter schedules, self-checks.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bbcg/bbcg.hpp"
#include "bbcg/verify.hpp"

namespace {

std::optional<double> parse_c(const std::string& text) {
  if (text == "auto") return std::nullopt;
  return std::stod(text);
}

int cmd_run(const std::string& path, std::optional<bbcg::Index> workers) {
  auto config = bbcg::ExperimentConfig::load(path);
  if (workers) config.workers = *workers;
  const auto summary = bbcg::run_sweep(config);
  const auto dir = config.resolved_output_dir();
  bbcg::write_outputs(summary, dir);

  std::cout << bbcg::SweepSummary::csv_header() << '\n';
  for (const auto& line : summary.summary_csv_lines()) std::cout << line << '\n';
  std::cerr << "wrote " << (dir / "runs.csv").string() << " and " << (dir / "summary.csv").string() << '\n';
  return summary.any_error() ? 1 : 0;
}

struct SingleArgs {
  std::string algorithm = "bbcg";
  bbcg::Index T = 1024;
  std::uint64_t seed = 1;
  std::string set = "ball";
  bbcg::Index dim = 2;
  double size = 1.0;
  std::string family = "quadratic";
  std::uint64_t loss_seed = 1;
  std::string c = "auto";
  bool parallel = false;
  bool header = false;
};

int cmd_single(const SingleArgs& a) {
  bbcg::ExperimentConfig config;
  config.experiment_id = "single";
  config.set = {bbcg::parse_set_kind(a.set), a.dim, a.size};
  config.family = bbcg::parse_loss_family(a.family);
  config.scale_constant = parse_c(a.c);
  config.bbcg_mode = a.parallel ? bbcg::ExecutionMode::Parallel : bbcg::ExecutionMode::Sequential;
  config.horizons = {a.T};
  config.validate();

  const auto set = config.set.build();
  const auto seq = bbcg::LossSequence::generate(config.family, a.loss_seed, a.T, set);
  bbcg::RunRow row = bbcg::plan_row(config, bbcg::parse_algorithm(a.algorithm), set, seq);
  row.seed = a.seed;
  bbcg::RunOptions options;
  options.keep_details = false;
  options.check_feasibility = true;
  const auto start = std::chrono::steady_clock::now();
  const auto record = bbcg::execute_row(config, row, set, seq, options);
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  row.regret = bbcg::regret(record, bbcg::offline_optimum(seq, set));
  row.lmo_calls = record.lmo_calls;
  row.projections = record.projections;
  if (a.header) std::cout << bbcg::RunRow::csv_header() << '\n';
  std::cout << row.to_csv() << '\n';
  if (record.feasibility_violations > 0) {
    std::cerr << record.feasibility_violations << " feasibility violations\n";
    return 1;
  }
  return 0;
}

struct ParamsArgs {
  bbcg::Index T = 1024;
  std::string c = "auto";
  std::string set = "ball";
  bbcg::Index dim = 2;
  double size = 1.0;
  double G = 1.0;
  double M = 1.0;
};

int cmd_params(const ParamsArgs& a) {
  const auto set = bbcg::FeasibleSet::make(bbcg::parse_set_kind(a.set), a.dim, a.size);
  const auto cfg = bbcg::derive_config(a.T, set, a.G, a.M, parse_c(a.c));
  const double r = set.inner_radius();
  const double R = set.outer_radius();
  std::cout << "T        " << cfg.horizon << '\n'
            << "K        " << cfg.block_size << '\n'
            << "blocks   " << cfg.num_blocks() << '\n'
            << "eta      " << bbcg::format_double(cfg.eta) << '\n'
            << "delta    " << bbcg::format_double(cfg.delta) << '\n'
            << "epsilon  " << bbcg::format_double(cfg.epsilon) << '\n'
            << "c        " << bbcg::format_double(cfg.scale_constant) << '\n'
            << "n r R    " << set.dim() << ' ' << bbcg::format_double(r) << ' ' << bbcg::format_double(R) << '\n'
            << "regret_bound     "
            << bbcg::format_double(bbcg::regret_upper_bound(cfg.horizon, set.dim(), cfg.scale_constant, a.G, a.M, r, R))
            << '\n'
            << "lmo_call_bound   "
            << bbcg::format_double(bbcg::lmo_call_upper_bound(cfg.horizon, set.dim(), cfg.scale_constant, a.G, a.M))
            << '\n';
  return 0;
}

int cmd_verify(bool quick, bbcg::Index workers) {
  bbcg::verify::Options options;
  options.include_sweep = !quick;
  options.workers = workers;
  bool all = true;
  for (const auto& result : bbcg::verify::run_all(options)) {
    std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << " (" << bbcg::format_double(result.seconds)
              << " s): " << result.detail << '\n';
    all = all && result.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block bandit conditional gradient: experiments and checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<bbcg::Index> run_workers;
  auto* run = app.add_subcommand("run", "Run a sweep from a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", run_workers, "Override the worker count");

  SingleArgs single_args;
  auto* single = app.add_subcommand("single", "Run one algorithm once and print its CSV row");
  single->add_option("--algorithm", single_args.algorithm, "bbcg | fkm | ofw")->capture_default_str();
  single->add_option("--T", single_args.T, "Horizon")->capture_default_str();
  single->add_option("--seed", single_args.seed, "Run seed")->capture_default_str();
  single->add_option("--set", single_args.set, "ball | box | simplex | l1ball")->capture_default_str();
  single->add_option("--dim", single_args.dim, "Dimension")->capture_default_str();
  single->add_option("--size", single_args.size, "Radius or half-width")->capture_default_str();
  single->add_option("--family", single_args.family, "linear | quadratic | shifting | zero")->capture_default_str();
  single->add_option("--loss-seed", single_args.loss_seed, "Loss sequence seed")->capture_default_str();
  single->add_option("--c", single_args.c, "Scale constant or 'auto'")->capture_default_str();
  single->add_flag("--parallel", single_args.parallel, "Overlap FW solves with predictions");
  single->add_flag("--header", single_args.header, "Print the CSV header first");

  ParamsArgs params_args;
  auto* params = app.add_subcommand("params", "Print the derived parameter schedule");
  params->add_option("--T", params_args.T, "Horizon")->required();
  params->add_option("--c", params_args.c, "Scale constant or 'auto'")->capture_default_str();
  params->add_option("--set", params_args.set, "Set kind")->capture_default_str();
  params->add_option("--dim", params_args.dim, "Dimension")->capture_default_str();
  params->add_option("--size", params_args.size, "Radius or half-width")->capture_default_str();
  params->add_option("--G", params_args.G, "Gradient bound")->capture_default_str();
  params->add_option("--M", params_args.M, "Value bound")->capture_default_str();

  bool quick = false;
  bbcg::Index verify_workers = 1;
  auto* verify = app.add_subcommand("verify", "Run the property and acceptance checks");
  verify->add_flag("--quick", quick, "Skip the horizon sweep");
  verify->add_option("--workers", verify_workers, "Threads for the sweep")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, run_workers);
    if (*single) return cmd_single(single_args);
    if (*params) return cmd_params(params_args);
    if (*verify) return cmd_verify(quick, verify_workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
