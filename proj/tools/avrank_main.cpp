// avrank: anytime-valid rank tests for treatment monitoring.
//
// Subcommands:
//   simulate  run a configured replication study, write results/curves CSVs
//   monitor   stream estimates through an e-process, with checkpointing
//   table     summarize a results directory as csv or markdown
//   utility   discounted-utility curves and fixed-T preference regions

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "avrank/errors.hpp"
#include "avrank/experiment.hpp"
#include "avrank/monitor.hpp"
#include "avrank/panel.hpp"

namespace {

using avrank::ConfigError;
using avrank::DataError;
using json = nlohmann::json;

struct DeltaGrid {
  double from = 0.5;
  double to = 1.0;
  double step = 0.01;
};

DeltaGrid parse_delta_grid(const std::string& text) {
  DeltaGrid grid;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
      !std::getline(in, c)) {
    throw ConfigError("delta grid must be from:to:step");
  }
  try {
    grid.from = std::stod(a);
    grid.to = std::stod(b);
    grid.step = std::stod(c);
  } catch (const std::exception&) {
    throw ConfigError("delta grid must be numeric from:to:step");
  }
  if (!(grid.from > 0.0 && grid.to <= 1.0 && grid.from <= grid.to && grid.step > 0.0)) {
    throw ConfigError("delta grid must satisfy 0 < from <= to <= 1, step > 0");
  }
  return grid;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << contents;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int reps_override, long seed_override, int threads) {
  avrank::ExperimentConfig cfg = avrank::parse_config_file(config_path);
  if (reps_override > 0) cfg.replications = reps_override;
  if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
  cfg.threads = threads;
  cfg.validate();

  std::filesystem::create_directories(out_dir);
  avrank::ExperimentResult result = avrank::run_experiment(cfg);

  {
    std::ofstream out(std::filesystem::path(out_dir) / "results.csv",
                      std::ios::binary | std::ios::trunc);
    avrank::write_results_csv(result, out);
  }
  {
    std::ofstream out(std::filesystem::path(out_dir) / "curves.csv",
                      std::ios::binary | std::ios::trunc);
    avrank::write_curves_csv(result, out);
  }

  json meta;
  meta["scenario"] = cfg.scenario;
  meta["estimator"] = cfg.estimator;
  meta["t0"] = cfg.t0;
  meta["horizon"] = cfg.horizon();
  meta["block_size"] = cfg.block_size;
  meta["alpha"] = cfg.alpha;
  meta["replications"] = cfg.replications;
  meta["master_seed"] = cfg.master_seed;
  json tags = json::array();
  for (const auto& test : cfg.tests) tags.push_back(test.tag);
  meta["tests"] = tags;
  write_file(std::filesystem::path(out_dir) / "run_meta.json", meta.dump(2) + "\n");

  std::cout << "wrote " << out_dir << "/results.csv, curves.csv, run_meta.json ("
            << cfg.replications << " replications)\n";
  return 0;
}

std::vector<double> read_pre_estimates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pre-estimates file: " + path);
  std::string first;
  if (!std::getline(in, first)) throw DataError("empty pre-estimates file");
  if (first.find("tau_hat") != std::string::npos) {
    in.seekg(0);
    avrank::TreatmentEstimates est = avrank::read_estimates_csv(in);
    if (est.blank.empty()) throw DataError("no blank-phase rows in " + path);
    return est.blank;
  }
  // Plain one-number-per-line format.
  std::vector<double> pre;
  std::string line = first;
  do {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    try {
      pre.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw DataError("malformed pre-estimate line: " + line);
    }
  } while (std::getline(in, line));
  if (pre.empty()) throw DataError("no pre-estimates in " + path);
  return pre;
}

void write_checkpoint_sidecar(const std::string& checkpoint_path,
                              const avrank::MonitorConfig& cfg, int steps) {
  json sidecar;
  sidecar["version"] = 1;
  std::ostringstream hash_hex;
  hash_hex << std::hex << cfg.hash();
  sidecar["config_hash"] = hash_hex.str();
  sidecar["statistic"] = cfg.statistic.canonical();
  sidecar["alpha"] = cfg.alpha;
  sidecar["steps"] = steps;
  write_file(checkpoint_path + ".json", sidecar.dump(2) + "\n");
}

int cmd_monitor(const std::string& pre_path, const std::string& statistic_spec,
                double alpha, const std::string& checkpoint_path,
                long seed) {
  avrank::MonitorConfig cfg;
  cfg.pre = read_pre_estimates(pre_path);
  cfg.statistic = avrank::parse_statistic_spec(statistic_spec);
  cfg.alpha = alpha;
  cfg.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : 0;

  std::unique_ptr<avrank::Monitor> monitor;
  if (!checkpoint_path.empty() && std::filesystem::exists(checkpoint_path)) {
    monitor = std::make_unique<avrank::Monitor>(
        avrank::Monitor::load_checkpoint_file(checkpoint_path, cfg));
    std::cerr << "avrank: resumed from " << checkpoint_path << " at step "
              << monitor->steps() << "\n";
  } else {
    monitor = std::make_unique<avrank::Monitor>(cfg);
  }

  std::cout << avrank::Monitor::csv_header() << "\n";
  std::string line;
  while (std::getline(std::cin, line)) {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    double estimate;
    try {
      std::size_t used = 0;
      estimate = std::stod(line.substr(begin), &used);
    } catch (const std::exception&) {
      std::cerr << "avrank: skipping malformed line: " << line << "\n";
      continue;
    }
    if (!std::isfinite(estimate)) {
      std::cerr << "avrank: skipping non-finite estimate: " << line << "\n";
      continue;
    }
    avrank::StepRecord rec = monitor->process(estimate);
    std::cout << avrank::Monitor::csv_line(rec) << "\n";
    std::cout.flush();
    if (!checkpoint_path.empty()) {
      monitor->save_checkpoint_file(checkpoint_path);
      write_checkpoint_sidecar(checkpoint_path, cfg, monitor->steps());
    }
  }
  return 0;
}

std::map<std::string, avrank::RejectionCurve> read_curves(
    const std::filesystem::path& dir, int t0) {
  std::ifstream in(dir / "curves.csv");
  if (!in) throw DataError("cannot open " + (dir / "curves.csv").string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty curves.csv");
  std::map<std::string, avrank::RejectionCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tag, t_s, rate_s;
    if (!std::getline(row, tag, ',') || !std::getline(row, t_s, ',') ||
        !std::getline(row, rate_s)) {
      throw DataError("malformed curves row: " + line);
    }
    auto& curve = curves[tag];
    curve.tag = tag;
    curve.t0 = t0;
    curve.rate.push_back(std::stod(rate_s));
  }
  if (curves.empty()) throw DataError("no curves in curves.csv");
  return curves;
}

json read_meta(const std::filesystem::path& dir) {
  std::ifstream in(dir / "run_meta.json");
  if (!in) throw DataError("cannot open " + (dir / "run_meta.json").string());
  json meta;
  in >> meta;
  return meta;
}

int cmd_table(const std::string& results_dir, const std::string& format) {
  std::filesystem::path dir(results_dir);
  json meta = read_meta(dir);
  auto curves = read_curves(dir, meta["t0"].get<int>());

  if (format == "md") {
    std::cout << "| test | rejection rate by t=" << meta["horizon"] << " |\n";
    std::cout << "|---|---|\n";
    for (const auto& [tag, curve] : curves) {
      std::cout << "| " << tag << " | " << curve.rate.back() << " |\n";
    }
  } else if (format == "csv") {
    std::cout << "test,horizon,rejection_rate\n";
    for (const auto& [tag, curve] : curves) {
      std::cout << tag << ',' << meta["horizon"] << ',' << curve.rate.back()
                << "\n";
    }
  } else {
    throw ConfigError("format must be csv or md");
  }
  return 0;
}

int cmd_utility(const std::string& results_dir, const std::string& grid_text) {
  DeltaGrid grid = parse_delta_grid(grid_text);
  std::filesystem::path dir(results_dir);
  json meta = read_meta(dir);
  auto curves = read_curves(dir, meta["t0"].get<int>());

  std::ostringstream utility;
  utility << "test,delta,utility\n";
  for (const auto& [tag, curve] : curves) {
    for (double d = grid.from; d <= grid.to + grid.step / 2; d += grid.step) {
      double delta = std::min(d, grid.to);
      utility << tag << ',' << delta << ','
              << avrank::discounted_utility(curve, delta) << "\n";
    }
  }
  write_file(dir / "utility.csv", utility.str());

  // Fixed-T vs anytime-valid preference regions.
  std::ostringstream pref;
  pref << "av_test,fixed_test,delta,av_utility,fixed_utility,fixed_preferred\n";
  for (const auto& [av_tag, av_curve] : curves) {
    if (av_tag.rfind("av-", 0) != 0 && av_tag.rfind("mixture-", 0) != 0) continue;
    for (const auto& [fixed_tag, fixed_curve] : curves) {
      if (fixed_tag.rfind("fixed-t@", 0) != 0) continue;
      for (double d = grid.from; d <= grid.to + grid.step / 2; d += grid.step) {
        double delta = std::min(d, grid.to);
        double ua = avrank::discounted_utility(av_curve, delta);
        double uf = avrank::discounted_utility(fixed_curve, delta);
        pref << av_tag << ',' << fixed_tag << ',' << delta << ',' << ua << ','
             << uf << ',' << (uf > ua ? 1 : 0) << "\n";
      }
    }
  }
  write_file(dir / "preference.csv", pref.str());

  std::cout << "wrote " << (dir / "utility.csv").string() << " and "
            << (dir / "preference.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime-valid rank tests for treatment monitoring"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "run a replication study");
  std::string config_path, out_dir = "out";
  int reps_override = 0;
  long seed_override = -1;
  int threads = 0;
  simulate->add_option("--config", config_path, "experiment config file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--reps", reps_override, "override replication count");
  simulate->add_option("--seed", seed_override, "override master seed");
  simulate->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* monitor = app.add_subcommand("monitor", "stream estimates from stdin");
  std::string pre_path, statistic_spec = "plugin", checkpoint_path;
  double alpha = 0.05;
  long monitor_seed = 0;
  monitor->add_option("--pre", pre_path, "blank-period estimates (csv or one per line)")
      ->required();
  monitor->add_option("--statistic", statistic_spec,
                      "gaussian:effect=..., plugin[:init=gaussian,...], "
                      "mixture:effect=...");
  monitor->add_option("--alpha", alpha, "significance level");
  monitor->add_option("--checkpoint", checkpoint_path, "checkpoint file path");
  monitor->add_option("--seed", monitor_seed, "stream seed");

  auto* table = app.add_subcommand("table", "summarize a results directory");
  std::string results_dir, format = "csv";
  table->add_option("--results", results_dir, "results directory")->required();
  table->add_option("--format", format, "csv or md");

  auto* utility = app.add_subcommand("utility", "discounted utility curves");
  std::string utility_dir, delta_grid = "0.5:1.0:0.01";
  utility->add_option("--results", utility_dir, "results directory")->required();
  utility->add_option("--delta-grid", delta_grid, "from:to:step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, out_dir, reps_override, seed_override,
                          threads);
    }
    if (monitor->parsed()) {
      return cmd_monitor(pre_path, statistic_spec, alpha, checkpoint_path,
                         monitor_seed);
    }
    if (table->parsed()) return cmd_table(results_dir, format);
    if (utility->parsed()) return cmd_utility(utility_dir, delta_grid);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
