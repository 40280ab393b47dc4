#include "avrank/pipeline.hpp"

#include <cmath>

#include "avrank/errors.hpp"

namespace avrank {

namespace {

StepRecord make_record(int t, const RankPair& ranks, double e,
                       const EProcess& ep) {
  StepRecord rec;
  rec.t = t;
  rec.seq_rank = ranks.seq_rank;
  rec.red_rank = ranks.red_rank;
  rec.e_value = e;
  rec.log_wealth = ep.log_wealth;
  rec.anytime_p = ep.anytime_p();
  rec.rejected = ep.rejected;
  return rec;
}

}  // namespace

ReducedRankTest::ReducedRankTest(std::vector<double> pre,
                                 std::uint64_t tie_seed,
                                 std::unique_ptr<ReducedStatistic> statistic,
                                 double alpha)
    : history_(std::make_unique<RankHistory>(std::move(pre), tie_seed)),
      statistic_(std::move(statistic)),
      eprocess_(alpha),
      t_(history_->t0()) {}

ReducedRankTest::ReducedRankTest(std::unique_ptr<ReducedStatistic> statistic,
                                 double alpha, int t0)
    : statistic_(std::move(statistic)), eprocess_(alpha), t_(t0) {}

StepRecord ReducedRankTest::step(double y) {
  if (!history_) throw StateError("this test consumes external ranks");
  NullCategorical q = history_->null_category_probs(history_->time() + 1);
  std::vector<double> stat = statistic_->next(q);
  RankPair ranks = history_->push_observation(y);
  double e = e_value_reduced(stat, ranks.red_rank, q);
  statistic_->update(ranks, q.t);
  eprocess_.absorb(e);
  t_ = q.t;
  return make_record(t_, ranks, e, eprocess_);
}

StepRecord ReducedRankTest::step_with_ranks(const RankPair& ranks,
                                            const NullCategorical& q) {
  if (q.t != t_ + 1) throw StateError("rank stream out of order");
  std::vector<double> stat = statistic_->next(q);
  double e = e_value_reduced(stat, ranks.red_rank, q);
  statistic_->update(ranks, q.t);
  eprocess_.absorb(e);
  t_ = q.t;
  return make_record(t_, ranks, e, eprocess_);
}

GenericRankTest::GenericRankTest(std::vector<double> pre,
                                 std::uint64_t tie_seed,
                                 std::unique_ptr<GenericStatistic> statistic,
                                 double alpha)
    : history_(std::make_unique<RankHistory>(std::move(pre), tie_seed)),
      statistic_(std::move(statistic)),
      eprocess_(alpha),
      t_(history_->t0()) {}

GenericRankTest::GenericRankTest(std::unique_ptr<GenericStatistic> statistic,
                                 double alpha, int t0)
    : statistic_(std::move(statistic)), eprocess_(alpha), t_(t0) {}

StepRecord GenericRankTest::step(double y) {
  if (!history_) throw StateError("this test consumes external ranks");
  int t = history_->time() + 1;
  GenericStatistic::Evaluation eval = statistic_->next(t);
  RankPair ranks = history_->push_observation(y);
  double e;
  if (eval.unit_denominator) {
    e = eval.value(ranks.seq_rank);
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw StatisticError("statistic produced an invalid value");
    }
  } else {
    std::vector<double> stat(t);
    for (int r = 1; r <= t; ++r) stat[r - 1] = eval.value(r);
    e = e_value_generic(stat, ranks.seq_rank);
  }
  statistic_->update(ranks, t);
  eprocess_.absorb(e);
  t_ = t;
  return make_record(t_, ranks, e, eprocess_);
}

StepRecord GenericRankTest::step_with_ranks(const RankPair& ranks) {
  int t = t_ + 1;
  GenericStatistic::Evaluation eval = statistic_->next(t);
  double e;
  if (eval.unit_denominator) {
    e = eval.value(ranks.seq_rank);
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw StatisticError("statistic produced an invalid value");
    }
  } else {
    std::vector<double> stat(t);
    for (int r = 1; r <= t; ++r) stat[r - 1] = eval.value(r);
    e = e_value_generic(stat, ranks.seq_rank);
  }
  statistic_->update(ranks, t);
  eprocess_.absorb(e);
  t_ = t;
  return make_record(t_, ranks, e, eprocess_);
}

MixtureRankTest::MixtureRankTest(
    std::vector<std::unique_ptr<ReducedStatistic>> candidates,
    MixtureMode mode, double alpha, int t0)
    : candidates_(std::move(candidates)),
      mixture_(static_cast<int>(candidates_.size()), mode),
      eprocess_(alpha),
      t_(t0) {
  if (candidates_.empty()) throw ConfigError("mixture needs candidates");
}

StepRecord MixtureRankTest::step_with_ranks(const RankPair& ranks,
                                            const NullCategorical& q) {
  if (q.t != t_ + 1) throw StateError("rank stream out of order");
  std::vector<double> e_values(candidates_.size());
  for (std::size_t j = 0; j < candidates_.size(); ++j) {
    std::vector<double> stat = candidates_[j]->next(q);
    e_values[j] = e_value_reduced(stat, ranks.red_rank, q);
    candidates_[j]->update(ranks, q.t);
  }
  double e = mixture_.step(e_values);
  eprocess_.absorb(e);
  t_ = q.t;
  return make_record(t_, ranks, e, eprocess_);
}

}  // namespace avrank
