#include "avrank/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "avrank/errors.hpp"
#include "avrank/fixed_t.hpp"
#include "avrank/gaussian.hpp"
#include "avrank/panel.hpp"
#include "avrank/pipeline.hpp"
#include "avrank/plugin.hpp"
#include "avrank/rng.hpp"

namespace avrank {

namespace {

// Substream roles per replication.
enum StreamRole : std::uint64_t {
  kPanelStream = 101,
  kTieStream = 102,
  kFixedTStream = 103,
  kStatisticStreamBase = 1000,  // + test index
};

const std::vector<double> kMixtureMultipliers = {0.25, 0.5, 1.0, 2.0, 4.0};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (block_size < 1) throw ConfigError("block_size must be >= 1");
  if (t_blank % block_size != 0) {
    throw ConfigError("t_blank must be divisible by block_size");
  }
  if (post < block_size) throw ConfigError("post horizon shorter than one block");
  if (estimator != "did" && estimator != "scm") {
    throw ConfigError("estimator must be did or scm");
  }
  if (mc_draws < 1) throw ConfigError("mc_draws must be >= 1");
  if (tests.empty()) throw ConfigError("no tests configured");
  IfeConfig ife;
  ife.n_controls = n_controls;
  ife.t_total = horizon();
  ife.t0 = t0;
  ife.t_blank = t_blank;
  ife.r_factors = r_factors;
  ife.rho_lambda = rho_lambda;
  ife.rho_eps = rho_eps;
  ife.sigma = sigma;
  ife.validate();
  for (const TestSpec& test : tests) {
    if (test.tag.empty()) throw ConfigError("test tag must be nonempty");
    if (test.kind == TestSpec::Kind::fixed_t_single &&
        (test.at_block < 1 || test.at_block > post_blocks())) {
      throw ConfigError("fixed-t block index out of range: " + test.tag);
    }
  }
}

double ExperimentConfig::estimate_effect(double outcome_tau) const {
  // The Gaussian statistic takes the outcome-scale standardized effect
  // (mu_post - mu_pre) / sigma; the ranks only see the estimates up to a
  // common location and scale, so no estimator- or block-level rescaling
  // is applied.
  return outcome_tau / sigma;
}

TestSpec parse_test_spec(const std::string& token,
                         const ExperimentConfig& cfg) {
  TestSpec spec;
  double base_effect = cfg.estimate_effect(cfg.alt_tau);
  auto split_arg = [&](const std::string& name) -> std::optional<std::string> {
    if (token.size() <= name.size() || token.compare(0, name.size(), name) != 0)
      return std::nullopt;
    char sep = token[name.size()];
    if (sep != ':' && sep != '@') return std::nullopt;
    return token.substr(name.size() + 1);
  };

  spec.tag = token;
  if (token == "repeated-fixed-t") {
    spec.kind = TestSpec::Kind::repeated_fixed_t;
  } else if (auto arg = split_arg("fixed-t")) {
    spec.kind = TestSpec::Kind::fixed_t_single;
    spec.at_block = std::stoi(*arg);
  } else if (token == "av-gaussian") {
    spec.kind = TestSpec::Kind::av_gaussian;
    spec.effect_size = base_effect;
  } else if (auto arg = split_arg("av-gaussian")) {
    spec.kind = TestSpec::Kind::av_gaussian;
    spec.effect_size = base_effect * std::stod(*arg);
  } else if (token == "av-plugin") {
    spec.kind = TestSpec::Kind::av_plugin;
    spec.effect_size = base_effect;
  } else if (token == "av-plugin-generic") {
    spec.kind = TestSpec::Kind::av_plugin_generic;
    spec.effect_size = base_effect;
  } else if (token == "mixture-adaptive" || token == "mixture-average") {
    spec.kind = token == "mixture-adaptive" ? TestSpec::Kind::mixture_adaptive
                                            : TestSpec::Kind::mixture_average;
    spec.effect_size = base_effect;
    spec.multipliers = kMixtureMultipliers;
  } else {
    throw ConfigError("unknown test tag: " + token);
  }
  return spec;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::vector<std::string> test_tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      // Blank or comment-only lines are fine; anything else is not.
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "scenario") cfg.scenario = value;
      else if (key == "estimator") cfg.estimator = value;
      else if (key == "n_controls") cfg.n_controls = std::stoi(value);
      else if (key == "t0") cfg.t0 = std::stoi(value);
      else if (key == "t_blank") cfg.t_blank = std::stoi(value);
      else if (key == "post") cfg.post = std::stoi(value);
      else if (key == "block_size") cfg.block_size = std::stoi(value);
      else if (key == "r_factors") cfg.r_factors = std::stoi(value);
      else if (key == "rho_lambda") cfg.rho_lambda = std::stod(value);
      else if (key == "rho_eps") cfg.rho_eps = std::stod(value);
      else if (key == "sigma") cfg.sigma = std::stod(value);
      else if (key == "tau") cfg.tau = std::stod(value);
      else if (key == "dynamic_tau") cfg.dynamic_tau = value == "true" || value == "1";
      else if (key == "alt_tau") cfg.alt_tau = std::stod(value);
      else if (key == "mc_draws") cfg.mc_draws = std::stoi(value);
      else if (key == "alpha") cfg.alpha = std::stod(value);
      else if (key == "replications") cfg.replications = std::stoi(value);
      else if (key == "master_seed") cfg.master_seed = std::stoull(value);
      else if (key == "fixed_t_sample_draws") cfg.fixed_t_sample_draws = std::stol(value);
      else if (key == "fixed_t_exact_limit") cfg.fixed_t_exact_limit = std::stod(value);
      else if (key == "tests") {
        std::istringstream list(value);
        std::string token;
        while (std::getline(list, token, ',')) {
          token = trim(token);
          if (!token.empty()) test_tokens.push_back(token);
        }
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": bad value for " + key);
    } catch (const std::out_of_range&) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": bad value for " + key);
    }
  }
  for (const std::string& token : test_tokens) {
    cfg.tests.push_back(parse_test_spec(token, cfg));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

namespace {

std::vector<double> treatment_path(const ExperimentConfig& cfg) {
  std::vector<double> path(cfg.post, 0.0);
  for (int i = 0; i < cfg.post; ++i) {
    path[i] = cfg.dynamic_tau ? 1.0 + static_cast<double>(i + 1) / 15.0 : cfg.tau;
  }
  return path;
}

struct ReplicationSink {
  // rejection_time[test][rep]
  std::vector<std::vector<int>>* slots;
  // Per test: plug-in initial statistic (data-independent, shared by all
  // replications).
  const std::vector<std::optional<std::vector<double>>>* init_statistics;
};

void run_replication(const ExperimentConfig& cfg, int rep,
                     const std::vector<double>& tau_path,
                     ReplicationSink sink) {
  // Simulate and estimate.
  IfeConfig ife;
  ife.n_controls = cfg.n_controls;
  ife.t_total = cfg.horizon();
  ife.t0 = cfg.t0;
  ife.t_blank = cfg.t_blank;
  ife.r_factors = cfg.r_factors;
  ife.rho_lambda = cfg.rho_lambda;
  ife.rho_eps = cfg.rho_eps;
  ife.sigma = cfg.sigma;
  ife.treatment = tau_path;
  ife.seed = mix_seed(cfg.master_seed, kPanelStream, static_cast<std::uint64_t>(rep));
  Panel panel = simulate_ife(ife);

  TreatmentEstimates raw = cfg.estimator == "did"
                               ? did_estimates(panel)
                               : scm_estimates(panel, scm_weights(panel));
  TreatmentEstimates blocked = block_aggregate(raw, cfg.block_size);

  const int n_blocks = static_cast<int>(blocked.post.size());
  const int rank_t0 = static_cast<int>(blocked.blank.size());
  auto raw_time = [&](int block_index) {  // 1-based completed block -> raw t
    return cfg.t0 + block_index * cfg.block_size;
  };

  // Shared rank stream.
  RankHistory history(
      blocked.blank,
      mix_seed(cfg.master_seed, kTieStream, static_cast<std::uint64_t>(rep)));
  std::vector<NullCategorical> nulls;
  std::vector<RankPair> ranks;
  nulls.reserve(n_blocks);
  ranks.reserve(n_blocks);
  for (int k = 0; k < n_blocks; ++k) {
    nulls.push_back(history.null_category_probs(history.time() + 1));
    ranks.push_back(history.push_observation(blocked.post[k]));
  }

  // Fixed-T p-value path, shared by the single and repeated variants. Only
  // computed as deep as some configured test actually looks.
  std::vector<double> fixed_p;
  int fixed_steps = 0;
  for (const TestSpec& test : cfg.tests) {
    if (test.kind == TestSpec::Kind::repeated_fixed_t) fixed_steps = n_blocks;
    if (test.kind == TestSpec::Kind::fixed_t_single) {
      fixed_steps = std::max(fixed_steps, test.at_block);
    }
  }
  if (fixed_steps > 0) {
    FixedTOptions opts;
    opts.sided = Sided::one;
    opts.mode = FixedTOptions::Mode::sampled;
    opts.sample_draws = cfg.fixed_t_sample_draws;
    opts.seed = mix_seed(cfg.master_seed, kFixedTStream, static_cast<std::uint64_t>(rep));
    RepeatedFixedT repeated(blocked.blank, cfg.alpha, opts, cfg.fixed_t_exact_limit);
    for (int k = 0; k < fixed_steps; ++k) repeated.push(blocked.post[k]);
    fixed_p = repeated.p_values();
  }

  for (std::size_t ti = 0; ti < cfg.tests.size(); ++ti) {
    const TestSpec& test = cfg.tests[ti];
    std::uint64_t stat_seed = mix_seed(
        cfg.master_seed, kStatisticStreamBase + ti, static_cast<std::uint64_t>(rep));
    int rejection = 0;

    switch (test.kind) {
      case TestSpec::Kind::fixed_t_single: {
        if (test.at_block <= static_cast<int>(fixed_p.size()) &&
            fixed_p[test.at_block - 1] <= cfg.alpha) {
          rejection = raw_time(test.at_block);
        }
        break;
      }
      case TestSpec::Kind::repeated_fixed_t: {
        for (int k = 0; k < static_cast<int>(fixed_p.size()); ++k) {
          if (fixed_p[k] <= cfg.alpha) {
            rejection = raw_time(k + 1);
            break;
          }
        }
        break;
      }
      case TestSpec::Kind::av_gaussian:
      case TestSpec::Kind::av_plugin: {
        std::unique_ptr<ReducedStatistic> statistic;
        if (test.kind == TestSpec::Kind::av_gaussian) {
          GaussianAltConfig alt;
          alt.effect_size = test.effect_size;
          alt.mc_draws = cfg.mc_draws;
          alt.seed = stat_seed;
          statistic = std::make_unique<GaussianReducedStatistic>(alt, rank_t0);
        } else {
          PluginOptions opts;
          opts.init_statistic = (*sink.init_statistics)[ti];
          statistic = std::make_unique<PluginReducedStatistic>(stat_seed, opts);
        }
        ReducedRankTest test_run(std::move(statistic), cfg.alpha, rank_t0);
        for (int k = 0; k < n_blocks; ++k) {
          StepRecord rec = test_run.step_with_ranks(ranks[k], nulls[k]);
          if (rec.rejected) {
            rejection = raw_time(k + 1);
            break;
          }
        }
        break;
      }
      case TestSpec::Kind::av_plugin_generic: {
        PluginOptions opts;
        opts.init_statistic = (*sink.init_statistics)[ti];
        GenericRankTest test_run(
            std::make_unique<PluginGenericStatistic>(stat_seed, rank_t0, opts),
            cfg.alpha, rank_t0);
        for (int k = 0; k < n_blocks; ++k) {
          StepRecord rec = test_run.step_with_ranks(ranks[k]);
          if (rec.rejected) {
            rejection = raw_time(k + 1);
            break;
          }
        }
        break;
      }
      case TestSpec::Kind::mixture_adaptive:
      case TestSpec::Kind::mixture_average: {
        std::vector<std::unique_ptr<ReducedStatistic>> candidates;
        for (std::size_t j = 0; j < test.multipliers.size(); ++j) {
          GaussianAltConfig alt;
          alt.effect_size = test.effect_size * test.multipliers[j];
          alt.mc_draws = cfg.mc_draws;
          alt.seed = mix_seed(stat_seed, 10 + j);
          candidates.push_back(
              std::make_unique<GaussianReducedStatistic>(alt, rank_t0));
        }
        MixtureRankTest test_run(std::move(candidates),
                                 test.kind == TestSpec::Kind::mixture_adaptive
                                     ? MixtureMode::adaptive
                                     : MixtureMode::average,
                                 cfg.alpha, rank_t0);
        for (int k = 0; k < n_blocks; ++k) {
          StepRecord rec = test_run.step_with_ranks(ranks[k], nulls[k]);
          if (rec.rejected) {
            rejection = raw_time(k + 1);
            break;
          }
        }
        break;
      }
    }
    (*sink.slots)[ti][rep] = rejection;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> tau_path = treatment_path(cfg);

  // Plug-in tests start from the Gaussian-optimal statistic; it depends on
  // no data, so one high-precision evaluation serves every replication.
  std::vector<std::optional<std::vector<double>>> init_statistics(cfg.tests.size());
  for (std::size_t ti = 0; ti < cfg.tests.size(); ++ti) {
    const TestSpec& test = cfg.tests[ti];
    bool plugin = test.kind == TestSpec::Kind::av_plugin ||
                  test.kind == TestSpec::Kind::av_plugin_generic;
    if (plugin && test.effect_size != 0.0) {
      GaussianAltConfig alt;
      alt.effect_size = test.effect_size;
      alt.mc_draws = std::max(cfg.mc_draws, 100000);
      alt.seed = mix_seed(cfg.master_seed, 500 + ti);
      init_statistics[ti] = gaussian_reduced_statistic(
          alt, cfg.blank_blocks(), std::vector<int>(cfg.blank_blocks() + 1, 0));
    }
  }

  std::vector<std::vector<int>> slots(cfg.tests.size());
  for (auto& s : slots) s.assign(cfg.replications, 0);
  ReplicationSink sink{&slots, &init_statistics};

  int n_threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, cfg.replications));

  if (n_threads == 1) {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      run_replication(cfg, rep, tau_path, sink);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (;;) {
            int rep = next.fetch_add(1);
            if (rep >= cfg.replications) break;
            run_replication(cfg, rep, tau_path, sink);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& worker : workers) worker.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  ExperimentResult result;
  result.config = cfg;
  result.tests.resize(cfg.tests.size());
  for (std::size_t ti = 0; ti < cfg.tests.size(); ++ti) {
    result.tests[ti].spec = cfg.tests[ti];
    result.tests[ti].rejection_time = std::move(slots[ti]);
  }
  return result;
}

const TestResult& ExperimentResult::find(const std::string& tag) const {
  for (const TestResult& test : tests) {
    if (test.spec.tag == tag) return test;
  }
  throw ConfigError("unknown test tag: " + tag);
}

RejectionCurve ExperimentResult::curve(const std::string& tag) const {
  const TestResult& test = find(tag);
  RejectionCurve curve;
  curve.tag = tag;
  curve.t0 = config.t0;
  curve.rate.assign(config.post, 0.0);
  double inv = 1.0 / static_cast<double>(test.rejection_time.size());
  for (int time : test.rejection_time) {
    if (time > 0) {
      // First-crossing semantics: rejected from `time` onward.
      for (int t = time; t <= config.horizon(); ++t) {
        curve.rate[t - config.t0 - 1] += inv;
      }
    }
  }
  return curve;
}

double ExperimentResult::rejection_rate(const std::string& tag, int t) const {
  const TestResult& test = find(tag);
  int count = 0;
  for (int time : test.rejection_time) {
    if (time > 0 && time <= t) ++count;
  }
  return static_cast<double>(count) /
         static_cast<double>(test.rejection_time.size());
}

double discounted_utility(const RejectionCurve& curve, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0,1]");
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.rate.size(); ++i) {
    acc += std::pow(delta, curve.t0 + 1 + static_cast<int>(i)) * curve.rate[i];
  }
  return acc;
}

double discounted_utility(const ExperimentResult& result,
                          const std::string& tag, double delta) {
  return discounted_utility(result.curve(tag), delta);
}

std::vector<PreferenceRow> preference_region(
    const ExperimentResult& result, const std::string& av_tag,
    const std::vector<std::string>& fixed_tags, double delta_from,
    double delta_to, double delta_step) {
  if (!(delta_step > 0.0)) throw ConfigError("delta step must be positive");
  RejectionCurve av = result.curve(av_tag);
  std::vector<PreferenceRow> rows;
  for (const std::string& fixed_tag : fixed_tags) {
    RejectionCurve fixed = result.curve(fixed_tag);
    // Half-step slack keeps the endpoint on the grid despite rounding.
    for (double delta = delta_from; delta <= delta_to + delta_step / 2;
         delta += delta_step) {
      double d = std::min(delta, delta_to);
      PreferenceRow row;
      row.fixed_tag = fixed_tag;
      row.delta = d;
      row.fixed_utility = discounted_utility(fixed, d);
      row.av_utility = discounted_utility(av, d);
      row.fixed_preferred = row.fixed_utility > row.av_utility;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_results_csv(const ExperimentResult& result, std::ostream& out) {
  out << "test,replication,rejection_time\n";
  for (const TestResult& test : result.tests) {
    for (std::size_t rep = 0; rep < test.rejection_time.size(); ++rep) {
      out << test.spec.tag << ',' << rep << ',';
      if (test.rejection_time[rep] > 0) out << test.rejection_time[rep];
      out << '\n';
    }
  }
}

void write_curves_csv(const ExperimentResult& result, std::ostream& out) {
  out << "test,t,rejection_rate\n";
  for (const TestResult& test : result.tests) {
    RejectionCurve curve = result.curve(test.spec.tag);
    for (std::size_t i = 0; i < curve.rate.size(); ++i) {
      out << test.spec.tag << ',' << (curve.t0 + 1 + i) << ','
          << format_double(curve.rate[i]) << '\n';
    }
  }
}

void write_utility_csv(const ExperimentResult& result, double delta_from,
                       double delta_to, double delta_step, std::ostream& out) {
  out << "test,delta,utility\n";
  for (const TestResult& test : result.tests) {
    RejectionCurve curve = result.curve(test.spec.tag);
    for (double delta = delta_from; delta <= delta_to + delta_step / 2;
         delta += delta_step) {
      double d = std::min(delta, delta_to);
      out << test.spec.tag << ',' << format_double(d) << ','
          << format_double(discounted_utility(curve, d)) << '\n';
    }
  }
}

}  // namespace avrank
