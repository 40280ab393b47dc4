#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace avrank {

// One sequential test wired into an experiment run.
struct TestSpec {
  enum class Kind {
    fixed_t_single,    // permutation test once, after at_block post blocks
    repeated_fixed_t,  // permutation test after every block (size-invalid)
    av_gaussian,       // reduced-rank e-process, Gaussian alternative
    av_plugin,         // reduced-rank e-process, plug-in alternative
    av_plugin_generic, // sequential-rank e-process, plug-in alternative
    mixture_adaptive,  // wealth-weighted mixture of Gaussian candidates
    mixture_average,   // plain average of Gaussian candidate e-values
  };
  Kind kind = Kind::av_gaussian;
  std::string tag;
  // Standardized effect size for the Gaussian statistic / plug-in
  // initialization.
  double effect_size = 0.0;
  int at_block = 0;  // fixed_t_single only
  std::vector<double> multipliers;  // mixture candidate scales
};

struct ExperimentConfig {
  std::string scenario = "did-iid";  // did-iid | scm-var1 | dynamic-effect
  std::string estimator = "did";     // did | scm
  int n_controls = 20;
  int t0 = 50;       // raw pre-treatment length
  int t_blank = 25;  // raw blank count (1..t_blank)
  int post = 30;     // raw post-treatment length
  int block_size = 1;
  int r_factors = 0;
  double rho_lambda = 0.0;
  double rho_eps = 0.0;
  double sigma = 1.0;
  double tau = 0.0;          // true constant treatment effect
  bool dynamic_tau = false;  // tau_t = 1 + (t - t0)/15 instead
  double alt_tau = 0.0;      // effect the AV statistics test against
  int mc_draws = 10000;
  double alpha = 0.05;
  int replications = 500;
  std::uint64_t master_seed = 1;
  long fixed_t_sample_draws = 2000;
  double fixed_t_exact_limit = 1e5;
  int threads = 0;  // 0: hardware concurrency
  std::vector<TestSpec> tests;

  void validate() const;

  // Standardized effect size handed to the Gaussian statistics:
  // tau / sigma on the outcome scale (ranks are invariant to common
  // location/scale, so no further rescaling).
  double estimate_effect(double outcome_tau) const;

  int horizon() const { return t0 + post; }
  int post_blocks() const { return post / block_size; }
  int blank_blocks() const { return t_blank / block_size; }
};

// Flat key = value config file ('#' starts a comment). The `tests` key is a
// comma-separated list of test tags; see parse_test_spec for the grammar.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
TestSpec parse_test_spec(const std::string& token, const ExperimentConfig& cfg);

struct RejectionCurve {
  std::string tag;
  int t0 = 0;
  std::vector<double> rate;  // rate[i] = P(rejected by t = t0 + 1 + i)
};

struct TestResult {
  TestSpec spec;
  std::vector<int> rejection_time;  // raw t per replication; 0 = never
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TestResult> tests;

  const TestResult& find(const std::string& tag) const;
  RejectionCurve curve(const std::string& tag) const;
  // P(rejected by raw time t).
  double rejection_rate(const std::string& tag, int t) const;
};

// Runs the configured replications (in parallel when threads != 1) and
// records first rejection times. Deterministic given the master seed:
// every replication owns substreams derived from (master_seed, index).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Discounted power sum_{t=t0+1..T} delta^t P(rejected by t).
double discounted_utility(const RejectionCurve& curve, double delta);
double discounted_utility(const ExperimentResult& result,
                          const std::string& tag, double delta);

struct PreferenceRow {
  std::string fixed_tag;
  double delta;
  double fixed_utility;
  double av_utility;
  bool fixed_preferred;  // strict; ties go to the anytime-valid test
};

std::vector<PreferenceRow> preference_region(
    const ExperimentResult& result, const std::string& av_tag,
    const std::vector<std::string>& fixed_tags, double delta_from,
    double delta_to, double delta_step);

// CSV output. Field order and float formatting are fixed so equal-seed runs
// are byte-identical.
void write_results_csv(const ExperimentResult& result, std::ostream& out);
void write_curves_csv(const ExperimentResult& result, std::ostream& out);
void write_utility_csv(const ExperimentResult& result, double delta_from,
                       double delta_to, double delta_step, std::ostream& out);

}  // namespace avrank
