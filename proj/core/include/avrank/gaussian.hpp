#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "avrank/statistic.hpp"

namespace avrank {

// Gaussian alternative on the outcome scale. Only the standardized effect
// size matters: the induced rank distribution is invariant to common shifts
// and rescalings of the outcomes.
struct GaussianAltConfig {
  // (mu_post - mu_pre) / sigma for the post-exchangeable alternative.
  double effect_size = 0.0;
  int mc_draws = 10000;
  std::uint64_t seed = 0;
  // Per-period standardized effect sizes (mu_t - mu_pre)/sigma for t > T0,
  // for the generic (non-post-exchangeable) alternative. When empty, the
  // constant effect_size is used.
  std::vector<double> mu_path;
};

double effect_size_from(double mu_pre, double mu_post, double sigma);

// Conditional probabilities of the next reduced rank under the Gaussian
// post-exchangeable alternative, estimated by Monte Carlo over standard
// normal pre-treatment draws: conditional on a draw, the slot probabilities
// are normal CDF differences at the order statistics, and the history of
// observed reduced ranks reweights the draws.
//
// The draws are made once at construction; each step then costs one
// matrix-vector product over the M x (T0+1) slot-probability matrix.
class GaussianReducedStatistic final : public ReducedStatistic {
 public:
  GaussianReducedStatistic(const GaussianAltConfig& cfg, int t0);

  std::vector<double> next(const NullCategorical& q) override;
  void update(const RankPair& ranks, int t) override;

  const std::vector<int>& slot_counts() const { return counts_; }

  void save(std::ostream& out) const override;
  static std::unique_ptr<GaussianReducedStatistic> load(std::istream& in);

 private:
  GaussianAltConfig cfg_;
  int t0_;
  Eigen::MatrixXd slot_probs_;      // (T0+1) x M: column per draw
  Eigen::MatrixXd log_slot_probs_;  // M x (T0+1): column per slot
  Eigen::VectorXd log_weight_;      // per-draw log likelihood of the history
  std::vector<int> counts_;         // observed reduced ranks per slot
};

// One-shot evaluation of the reduced-rank statistic given explicit history
// counts; used by the streaming class above and directly in tests.
std::vector<double> gaussian_reduced_statistic(const GaussianAltConfig& cfg,
                                               int t0,
                                               const std::vector<int>& counts);

// Conditional probabilities of the next sequential rank under a Gaussian
// alternative with a per-period effect path, estimated by simulating whole
// outcome paths and matching the observed rank prefix. Paths that stop
// matching are discarded; counts are add-one smoothed. If no path matches
// the observed prefix the statistic falls back to uniform (flagged on the
// evaluation and logged once to stderr).
class GaussianGenericStatistic final : public GenericStatistic {
 public:
  GaussianGenericStatistic(const GaussianAltConfig& cfg, int t0);

  Evaluation next(int t) override;
  void update(const RankPair& ranks, int t) override;

  int alive_paths() const { return alive_count_; }
  bool fell_back() const { return fell_back_; }

 private:
  double effect_at(int t) const;
  void extend_paths(int t);

  GaussianAltConfig cfg_;
  int t0_;
  Rng rng_;
  // Per path: sorted values so far plus the rank it produced at each time.
  std::vector<std::vector<double>> path_sorted_;
  std::vector<int> current_rank_;  // rank of path at the current time
  std::vector<char> alive_;
  int alive_count_ = 0;
  int simulated_time_ = 0;  // paths are extended lazily up to this time
  std::vector<double> scratch_counts_;
  bool fell_back_ = false;
  bool warned_ = false;
};

}  // namespace avrank
