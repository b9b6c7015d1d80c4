#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbcg/baselines.hpp"
#include "bbcg/block_bandit.hpp"
#include "bbcg/core.hpp"
#include "bbcg/geometry.hpp"
#include "bbcg/losses.hpp"

namespace bbcg {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "BBCG_OUTPUT_DIR";

enum class Algorithm { BBCG, FKM, OFW };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BBCG: return "bbcg";
    case Algorithm::FKM: return "fkm";
    case Algorithm::OFW: return "ofw";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "bbcg") return Algorithm::BBCG;
  if (s == "fkm") return Algorithm::FKM;
  if (s == "ofw") return Algorithm::OFW;
  throw ConfigurationError("unknown algorithm '" + std::string(s) + "'");
}

struct SetSpec {
  SetKind kind = SetKind::EuclideanBall;
  Index dim = 2;
  double size = 1.0;  // radius or half-width; ignored for simplex

  FeasibleSet build() const { return FeasibleSet::make(kind, dim, size); }
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string experiment_id = "experiment";
  SetSpec set;
  LossFamily family = LossFamily::Quadratic;
  std::uint64_t base_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::BBCG};
  std::vector<Index> horizons;
  Index seeds = 20;
  std::optional<double> scale_constant;  // nullopt = auto
  std::string output_dir = "results";
  Index workers = 1;
  ExecutionMode bbcg_mode = ExecutionMode::Sequential;
  bool record_wall_time = true;
  bool check_feasibility = false;

  void validate() const {
    if (schema_version != kConfigSchemaVersion)
      throw ConfigurationError("unsupported schema_version " + std::to_string(schema_version));
    if (experiment_id.empty() || experiment_id.find_first_of(",\"\r\n") != std::string::npos)
      throw ConfigurationError("experiment_id must be non-empty without commas, quotes or newlines");
    if (horizons.empty()) throw ConfigurationError("horizon grid is empty");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      if (horizons[i] < 1) throw ConfigurationError("horizons must be >= 1");
      if (i > 0 && horizons[i] <= horizons[i - 1]) throw ConfigurationError("horizon grid must be strictly increasing");
    }
    if (seeds < 1) throw ConfigurationError("seeds must be >= 1");
    if (workers < 1) throw ConfigurationError("workers must be >= 1");
    if (algorithms.empty()) throw ConfigurationError("no algorithms configured");
    if (scale_constant && !(*scale_constant > 0.0)) throw ConfigurationError("c must be positive or \"auto\"");
    (void)set.build();
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known{
        "schema_version", "experiment_id", "set",        "family",          "base_seed",        "algorithms",
        "horizons",       "seeds",         "c",          "output_dir",      "workers",          "bbcg_mode",
        "record_wall_time", "check_feasibility"};
    if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigurationError("unknown config key '" + key + "'");
    if (!j.contains("schema_version")) throw ConfigurationError("config is missing schema_version");

    ExperimentConfig c;
    try {
      c.schema_version = j.at("schema_version").get<int>();
      if (j.contains("experiment_id")) c.experiment_id = j.at("experiment_id").get<std::string>();
      if (j.contains("set")) {
        const auto& s = j.at("set");
        c.set.kind = parse_set_kind(s.at("kind").get<std::string>());
        c.set.dim = s.at("dim").get<Index>();
        if (s.contains("size")) c.set.size = s.at("size").get<double>();
      }
      if (j.contains("family")) c.family = parse_loss_family(j.at("family").get<std::string>());
      if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
      if (j.contains("algorithms")) {
        c.algorithms.clear();
        for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      }
      c.horizons = j.at("horizons").get<std::vector<Index>>();
      if (j.contains("seeds")) c.seeds = j.at("seeds").get<Index>();
      if (j.contains("c")) {
        const auto& v = j.at("c");
        if (v.is_string()) {
          if (v.get<std::string>() != "auto") throw ConfigurationError("c must be a number or \"auto\"");
        } else {
          c.scale_constant = v.get<double>();
        }
      }
      if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
      if (j.contains("workers")) c.workers = j.at("workers").get<Index>();
      if (j.contains("bbcg_mode")) {
        const auto mode = j.at("bbcg_mode").get<std::string>();
        if (mode == "sequential") c.bbcg_mode = ExecutionMode::Sequential;
        else if (mode == "parallel") c.bbcg_mode = ExecutionMode::Parallel;
        else throw ConfigurationError("bbcg_mode must be \"sequential\" or \"parallel\"");
      }
      if (j.contains("record_wall_time")) c.record_wall_time = j.at("record_wall_time").get<bool>();
      if (j.contains("check_feasibility")) c.check_feasibility = j.at("check_feasibility").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError("cannot parse " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  /// Output directory after applying the BBCG_OUTPUT_DIR override.
  std::filesystem::path resolved_output_dir() const {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return output_dir;
  }
};

// ---------------------------------------------------------------------------
// CSV formatting

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::string format_optional(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

/// Double-quoted CSV field with embedded quotes doubled.
inline std::string csv_quote(std::string_view text) {
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

/// One row of the per-run CSV.
struct RunRow {
  std::string experiment_id;
  Algorithm algorithm = Algorithm::BBCG;
  SetKind set_kind = SetKind::EuclideanBall;
  Index dim = 0;
  LossFamily family = LossFamily::Quadratic;
  Index T = 0;
  Index K = 1;
  double eta = 0.0;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> c;
  std::uint64_t seed = 0;
  double regret = 0.0;
  Index lmo_calls = 0;
  Index projections = 0;
  double wall_ms = 0.0;

  static std::string csv_header() {
    return "experiment_id,algorithm,set_kind,dim,family,T,K,eta,delta,epsilon,c,seed,regret,lmo_calls,projections,"
           "wall_ms";
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << experiment_id << ',' << to_string(algorithm) << ',' << to_string(set_kind) << ',' << dim << ','
       << to_string(family) << ',' << T << ',' << K << ',' << format_double(eta) << ',' << format_optional(delta) << ','
       << format_optional(epsilon) << ',' << format_optional(c) << ',' << seed << ',' << format_double(regret) << ','
       << lmo_calls << ',' << projections << ',' << format_double(wall_ms);
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Exponent fitting

struct ExponentFit {
  bool available = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  Index points_used = 0;
  std::string status;
};

/// Least squares of log(regret) on log(T). Non-positive regrets are dropped;
/// fewer than 4 remaining points leaves the fit unavailable.
inline ExponentFit fit_exponent(std::span<const std::pair<double, double>> points) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [T, value] : points)
    if (T > 0.0 && value > 0.0 && std::isfinite(value)) logs.emplace_back(std::log(T), std::log(value));

  ExponentFit fit;
  fit.points_used = static_cast<Index>(logs.size());
  if (logs.size() < 4) {
    fit.status = "fit-unavailable: " + std::to_string(logs.size()) + " positive points (need >= 4)";
    return fit;
  }
  const auto k = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) {
    fit.status = "fit-unavailable: all horizons equal";
    return fit;
  }
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (const auto& [x, y] : logs) {
    const double e = y - (intercept + fit.slope * x);
    sse += e * e;
  }
  fit.std_error = std::sqrt(sse / (k - 2.0) / sxx);
  fit.available = true;
  fit.status = "ok";
  return fit;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class CellStatus { Ok, Skipped, Error };

inline std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Skipped: return "skipped";
    case CellStatus::Error: return "error";
  }
  return "unknown";
}

struct CellSummary {
  Algorithm algorithm = Algorithm::BBCG;
  Index T = 0;
  CellStatus status = CellStatus::Ok;
  std::string message;
  Index runs = 0;
  double mean_regret = 0.0;
  double regret_std_error = 0.0;
  double mean_lmo_calls = 0.0;
  double mean_projections = 0.0;
  double mean_wall_ms = 0.0;
  double total_lmo_calls = 0.0;
  double total_projections = 0.0;
};

struct SweepSummary {
  std::string experiment_id;
  std::vector<RunRow> rows;  // fixed order: algorithm, then T, then replicate
  std::vector<CellSummary> cells;
  std::map<Algorithm, ExponentFit> fits;

  bool any_error() const {
    return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c.status == CellStatus::Error; });
  }
  const CellSummary* cell(Algorithm a, Index T) const {
    for (const auto& c : cells)
      if (c.algorithm == a && c.T == T) return &c;
    return nullptr;
  }

  static std::string csv_header() {
    return "schema_version,experiment_id,algorithm,T,status,runs,mean_regret,regret_stderr,mean_lmo_calls,"
           "mean_projections,mean_wall_ms,slope,slope_stderr,fit_status,message";
  }

  std::vector<std::string> summary_csv_lines() const {
    std::vector<std::string> lines;
    for (const auto& c : cells) {
      const auto it = fits.find(c.algorithm);
      const ExponentFit fit = it == fits.end() ? ExponentFit{} : it->second;
      std::ostringstream os;
      os << kSummarySchemaVersion << ',' << experiment_id << ',' << to_string(c.algorithm) << ',' << c.T << ','
         << to_string(c.status) << ',' << c.runs << ',' << format_double(c.mean_regret) << ','
         << format_double(c.regret_std_error) << ',' << format_double(c.mean_lmo_calls) << ','
         << format_double(c.mean_projections) << ',' << format_double(c.mean_wall_ms) << ','
         << format_double(fit.slope) << ',' << format_double(fit.std_error) << ',' << csv_quote(fit.status) << ','
         << csv_quote(c.message);
      lines.push_back(os.str());
    }
    return lines;
  }
};

/// Seed for one run: hash(base_seed, algorithm, T, replicate).
inline std::uint64_t run_seed(std::uint64_t base_seed, Algorithm algorithm, Index T, Index replicate) {
  std::uint64_t h = hash_combine(base_seed, hash_string(to_string(algorithm)));
  h = hash_combine(h, static_cast<std::uint64_t>(T));
  return hash_combine(h, static_cast<std::uint64_t>(replicate));
}

/// Seed of the loss sequence at horizon T; shared by all algorithms and replicates.
inline std::uint64_t loss_seed(std::uint64_t base_seed, Index T) {
  return hash_combine(hash_combine(base_seed, hash_string("losses")), static_cast<std::uint64_t>(T));
}

/// Algorithm parameters for one cell, filled into a row template.
inline RunRow plan_row(const ExperimentConfig& config, Algorithm algorithm, const FeasibleSet& set,
                       const LossSequence& seq) {
  RunRow row;
  row.experiment_id = config.experiment_id;
  row.algorithm = algorithm;
  row.set_kind = set.kind();
  row.dim = set.dim();
  row.family = seq.family();
  row.T = seq.horizon();
  switch (algorithm) {
    case Algorithm::BBCG: {
      if (!set.full_dimensional()) throw CapabilityError("bbcg requires a full-dimensional set");
      const BbcgConfig cfg = derive_config(seq.horizon(), set, seq, config.scale_constant);
      row.K = cfg.block_size;
      row.eta = cfg.eta;
      row.delta = cfg.delta;
      row.epsilon = cfg.epsilon;
      row.c = cfg.scale_constant;
      break;
    }
    case Algorithm::FKM: {
      if (!set.has_projection() || !set.full_dimensional())
        throw CapabilityError("fkm requires a full-dimensional set with projection");
      const BaselineConfig cfg = derive_fkm_config(seq.horizon(), set, seq.value_bound());
      row.eta = cfg.eta;
      row.delta = cfg.delta;
      break;
    }
    case Algorithm::OFW: {
      const BaselineConfig cfg = derive_ofw_config(seq.horizon(), set, seq.lipschitz_bound());
      row.eta = cfg.eta;
      break;
    }
  }
  return row;
}

/// Executes one run described by row (whose parameters came from plan_row).
inline RunRecord execute_row(const ExperimentConfig& config, const RunRow& row, const FeasibleSet& set,
                             const LossSequence& seq, const RunOptions& options) {
  switch (row.algorithm) {
    case Algorithm::BBCG: {
      BbcgConfig cfg = derive_config(seq.horizon(), set, seq, config.scale_constant);
      RunOptions o = options;
      o.mode = config.bbcg_mode;
      return run(cfg, set, seq, row.seed, o);
    }
    case Algorithm::FKM: return run_fkm(derive_fkm_config(seq.horizon(), set, seq.value_bound()), set, seq, row.seed, options);
    case Algorithm::OFW: return run_ofw(derive_ofw_config(seq.horizon(), set, seq.lipschitz_bound()), set, seq, row.seed, options);
  }
  throw ConfigurationError("unknown algorithm");
}

/// Runs algorithms × horizons × seeds. Cells run on up to config.workers
/// threads; results land in fixed slots, so output order and values do not
/// depend on scheduling.
inline SweepSummary run_sweep(const ExperimentConfig& config) {
  config.validate();
  const FeasibleSet set = config.set.build();

  struct Horizon {
    std::optional<LossSequence> seq;
    OfflineOptimum optimum;
  };
  std::vector<Horizon> horizons(config.horizons.size());
  for (std::size_t h = 0; h < config.horizons.size(); ++h) {
    const Index T = config.horizons[h];
    horizons[h].seq = LossSequence::generate(config.family, loss_seed(config.base_seed, T), T, set);
    horizons[h].optimum = offline_optimum(*horizons[h].seq, set);
  }

  struct Cell {
    Algorithm algorithm;
    std::size_t horizon_index;
    CellStatus status = CellStatus::Ok;
    std::string message;
    RunRow plan;
  };
  std::vector<Cell> cells;
  for (Algorithm a : config.algorithms) {
    for (std::size_t h = 0; h < config.horizons.size(); ++h) {
      Cell cell;
      cell.algorithm = a;
      cell.horizon_index = h;
      try {
        cell.plan = plan_row(config, a, set, *horizons[h].seq);
      } catch (const CapabilityError& e) {
        cell.status = CellStatus::Skipped;
        cell.message = e.what();
      } catch (const std::exception& e) {
        cell.status = CellStatus::Error;
        cell.message = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }

  struct Task {
    std::size_t cell;
    Index replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (cells[c].status == CellStatus::Ok)
      for (Index r = 0; r < config.seeds; ++r) tasks.push_back({c, r});

  struct Outcome {
    std::optional<RunRow> row;
    std::string error;
  };
  std::vector<Outcome> outcomes(tasks.size());
  RunOptions options;
  options.keep_details = false;
  options.check_feasibility = config.check_feasibility;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Cell& cell = cells[tasks[i].cell];
      const Horizon& hz = horizons[cell.horizon_index];
      RunRow row = cell.plan;
      row.seed = run_seed(config.base_seed, cell.algorithm, row.T, tasks[i].replicate);
      try {
        const auto start = std::chrono::steady_clock::now();
        const RunRecord record = execute_row(config, row, set, *hz.seq, options);
        const auto stop = std::chrono::steady_clock::now();
        row.regret = regret(record, hz.optimum);
        row.lmo_calls = record.lmo_calls;
        row.projections = record.projections;
        row.wall_ms =
            config.record_wall_time ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        if (record.feasibility_violations > 0)
          outcomes[i].error = std::to_string(record.feasibility_violations) + " feasibility violations";
        outcomes[i].row = std::move(row);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<Index>(config.workers, std::max<Index>(1, tasks.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SweepSummary summary;
  summary.experiment_id = config.experiment_id;
  std::size_t task_index = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellSummary cs;
    cs.algorithm = cells[c].algorithm;
    cs.T = config.horizons[cells[c].horizon_index];
    cs.status = cells[c].status;
    cs.message = cells[c].message;
    if (cs.status == CellStatus::Ok) {
      std::vector<double> regrets;
      for (Index r = 0; r < config.seeds; ++r, ++task_index) {
        const Outcome& out = outcomes[task_index];
        if (!out.error.empty()) {
          cs.status = CellStatus::Error;
          if (cs.message.empty()) cs.message = out.error;
        }
        if (!out.row) continue;
        regrets.push_back(out.row->regret);
        cs.total_lmo_calls += static_cast<double>(out.row->lmo_calls);
        cs.total_projections += static_cast<double>(out.row->projections);
        cs.mean_wall_ms += out.row->wall_ms;
        summary.rows.push_back(*out.row);
      }
      cs.runs = static_cast<Index>(regrets.size());
      if (cs.runs > 0) {
        const auto k = static_cast<double>(cs.runs);
        double mean = 0.0;
        for (double v : regrets) mean += v;
        mean /= k;
        double var = 0.0;
        for (double v : regrets) var += (v - mean) * (v - mean);
        cs.mean_regret = mean;
        cs.regret_std_error = cs.runs > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
        cs.mean_lmo_calls = cs.total_lmo_calls / k;
        cs.mean_projections = cs.total_projections / k;
        cs.mean_wall_ms /= k;
      }
    }
    summary.cells.push_back(std::move(cs));
  }

  for (Algorithm a : config.algorithms) {
    std::vector<std::pair<double, double>> points;
    for (const auto& c : summary.cells)
      if (c.algorithm == a && c.status == CellStatus::Ok)
        points.emplace_back(static_cast<double>(c.T), c.mean_regret);
    summary.fits[a] = fit_exponent(points);
  }
  return summary;
}

/// Writes runs.csv and summary.csv into dir (created if missing).
inline void write_outputs(const SweepSummary& summary, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "runs.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "runs.csv").string());
    out << RunRow::csv_header() << '\n';
    for (const auto& row : summary.rows) out << row.to_csv() << '\n';
  }
  {
    std::ofstream out(dir / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
    out << SweepSummary::csv_header() << '\n';
    for (const auto& line : summary.summary_csv_lines()) out << line << '\n';
  }
}

}  // namespace bbcg
