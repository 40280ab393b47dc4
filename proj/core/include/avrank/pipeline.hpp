#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "avrank/eprocess.hpp"
#include "avrank/mixture.hpp"
#include "avrank/ranks.hpp"
#include "avrank/statistic.hpp"

namespace avrank {

// One processed observation: ranks, the e-value it produced, and the state
// of the test martingale afterwards.
struct StepRecord {
  int t = 0;
  int seq_rank = 0;
  int red_rank = 0;
  double e_value = 1.0;
  double log_wealth = 0.0;
  double anytime_p = 1.0;
  bool rejected = false;
};

// Anytime-valid test on the reduced sequential ranks: produces the
// statistic, reveals the rank, scores it, and feeds the test martingale.
// The statistic is always produced before the observation is pushed.
class ReducedRankTest {
 public:
  ReducedRankTest(std::vector<double> pre, std::uint64_t tie_seed,
                  std::unique_ptr<ReducedStatistic> statistic, double alpha);

  // Variant sharing an externally owned history (several tests can consume
  // the same rank stream). step_with_ranks() must then be used.
  ReducedRankTest(std::unique_ptr<ReducedStatistic> statistic, double alpha,
                  int t0);

  StepRecord step(double y);

  // Scores pre-computed ranks for time t (q must be the null categorical
  // produced before the observation was pushed).
  StepRecord step_with_ranks(const RankPair& ranks, const NullCategorical& q);

  const EProcess& process() const { return eprocess_; }
  const RankHistory& history() const { return *history_; }
  RankHistory& history() { return *history_; }
  ReducedStatistic& statistic() { return *statistic_; }

 private:
  std::unique_ptr<RankHistory> history_;  // null when ranks come from outside
  std::unique_ptr<ReducedStatistic> statistic_;
  EProcess eprocess_;
  int t_ = 0;
};

// Same pipeline against the full sequential-rank support.
class GenericRankTest {
 public:
  GenericRankTest(std::vector<double> pre, std::uint64_t tie_seed,
                  std::unique_ptr<GenericStatistic> statistic, double alpha);
  GenericRankTest(std::unique_ptr<GenericStatistic> statistic, double alpha,
                  int t0);

  StepRecord step(double y);
  StepRecord step_with_ranks(const RankPair& ranks);

  const EProcess& process() const { return eprocess_; }
  RankHistory& history() { return *history_; }

 private:
  std::unique_ptr<RankHistory> history_;
  std::unique_ptr<GenericStatistic> statistic_;
  EProcess eprocess_;
  int t_ = 0;
};

// Mixture over k reduced-rank statistics: each candidate is scored, the
// candidate e-values are combined, and the combined e-value drives a single
// test martingale.
class MixtureRankTest {
 public:
  MixtureRankTest(std::vector<std::unique_ptr<ReducedStatistic>> candidates,
                  MixtureMode mode, double alpha, int t0);

  StepRecord step_with_ranks(const RankPair& ranks, const NullCategorical& q);

  const EProcess& process() const { return eprocess_; }
  const MixtureState& mixture() const { return mixture_; }

 private:
  std::vector<std::unique_ptr<ReducedStatistic>> candidates_;
  MixtureState mixture_;
  EProcess eprocess_;
  int t_ = 0;
};

}  // namespace avrank
