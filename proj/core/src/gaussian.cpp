#include "avrank/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"
#include "avrank/normal.hpp"
#include "avrank/rng.hpp"

namespace avrank {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_config(const GaussianAltConfig& cfg) {
  if (cfg.mc_draws < 1) throw ConfigError("mc_draws must be >= 1");
  if (!std::isfinite(cfg.effect_size)) throw ConfigError("effect size must be finite");
  for (double e : cfg.mu_path) {
    if (!std::isfinite(e)) throw ConfigError("effect path must be finite");
  }
}

}  // namespace

double effect_size_from(double mu_pre, double mu_post, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  return (mu_post - mu_pre) / sigma;
}

GaussianReducedStatistic::GaussianReducedStatistic(const GaussianAltConfig& cfg,
                                                   int t0)
    : cfg_(cfg), t0_(t0) {
  check_config(cfg);
  if (t0 < 1) throw ConfigError("t0 must be >= 1");
  const int m = cfg.mc_draws;
  const int slots = t0 + 1;
  counts_.assign(slots, 0);
  slot_probs_.resize(slots, m);
  log_slot_probs_.resize(m, slots);
  log_weight_ = Eigen::VectorXd::Zero(m);

  Rng rng(cfg.seed);
  std::vector<double> draw(t0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < t0; ++j) draw[j] = rng.normal();
    std::sort(draw.begin(), draw.end());
    double prev_cdf = 0.0;
    for (int j = 0; j < slots; ++j) {
      double cur_cdf = (j == t0)
                           ? 1.0
                           : fast_normal_cdf(draw[j] - cfg.effect_size);
      double p = std::max(0.0, cur_cdf - prev_cdf);
      slot_probs_(j, i) = p;
      log_slot_probs_(i, j) = p > 0.0 ? std::log(p) : kNegInf;
      prev_cdf = cur_cdf;
    }
  }
}

std::vector<double> GaussianReducedStatistic::next(const NullCategorical& q) {
  const int slots = t0_ + 1;
  if (q.slots() != slots) throw StateError("null support does not match t0");

  double max_log = log_weight_.maxCoeff();
  std::vector<double> stat(slots, 0.0);
  if (!std::isfinite(max_log)) {
    // Every draw assigns probability zero to the observed history; no
    // information left, fall back to uniform.
    std::fill(stat.begin(), stat.end(), 1.0 / slots);
    return stat;
  }

  // Draws whose relative weight underflows contribute nothing; dropping
  // them also keeps subnormals out of the accumulation below.
  constexpr double kLogWeightCutoff = -500.0;
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(slots);
  const int m = static_cast<int>(log_weight_.size());
  for (int i = 0; i < m; ++i) {
    double shifted = log_weight_[i] - max_log;
    if (shifted < kLogWeightCutoff) continue;
    scores += std::exp(shifted) * slot_probs_.col(i);
  }
  double total = scores.sum();
  if (!(total > 0.0)) {
    std::fill(stat.begin(), stat.end(), 1.0 / slots);
    return stat;
  }
  for (int j = 0; j < slots; ++j) stat[j] = scores[j] / total;
  return stat;
}

void GaussianReducedStatistic::update(const RankPair& ranks, int /*t*/) {
  int slot = ranks.red_rank;
  if (slot < 1 || slot > t0_ + 1) throw DataError("reduced rank outside support");
  counts_[slot - 1] += 1;
  log_weight_ += log_slot_probs_.col(slot - 1);
}

void GaussianReducedStatistic::save(std::ostream& out) const {
  detail::write_f64(out, cfg_.effect_size);
  detail::write_i64(out, cfg_.mc_draws);
  detail::write_u64(out, cfg_.seed);
  detail::write_i64(out, t0_);
  detail::write_i32_vector(out, counts_);
  // The accumulated per-draw log likelihoods are stored verbatim (not
  // replayed from the counts) so a resumed run reproduces the exact
  // floating-point state.
  std::vector<double> lw(log_weight_.data(), log_weight_.data() + log_weight_.size());
  detail::write_f64_vector(out, lw);
}

std::unique_ptr<GaussianReducedStatistic> GaussianReducedStatistic::load(
    std::istream& in) {
  GaussianAltConfig cfg;
  cfg.effect_size = detail::read_f64(in);
  cfg.mc_draws = static_cast<int>(detail::read_i64(in));
  cfg.seed = detail::read_u64(in);
  int t0 = static_cast<int>(detail::read_i64(in));
  std::vector<int> counts = detail::read_i32_vector(in);
  std::vector<double> lw = detail::read_f64_vector(in);
  auto stat = std::make_unique<GaussianReducedStatistic>(cfg, t0);
  if (counts.size() != stat->counts_.size() ||
      static_cast<Eigen::Index>(lw.size()) != stat->log_weight_.size()) {
    throw DataError("gaussian statistic checkpoint shape mismatch");
  }
  stat->counts_ = std::move(counts);
  stat->log_weight_ = Eigen::Map<const Eigen::VectorXd>(
      lw.data(), static_cast<Eigen::Index>(lw.size()));
  return stat;
}

std::vector<double> gaussian_reduced_statistic(const GaussianAltConfig& cfg,
                                               int t0,
                                               const std::vector<int>& counts) {
  GaussianReducedStatistic stat(cfg, t0);
  if (static_cast<int>(counts.size()) != t0 + 1) {
    throw ConfigError("counts must have t0+1 entries");
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    for (int c = 0; c < counts[j]; ++c) {
      stat.update({0, static_cast<int>(j) + 1}, 0);
    }
  }
  NullCategorical q;
  q.t = t0 + 1;
  q.q.assign(t0 + 1, 1.0 / (t0 + 1));
  return stat.next(q);
}

GaussianGenericStatistic::GaussianGenericStatistic(const GaussianAltConfig& cfg,
                                                   int t0)
    : cfg_(cfg), t0_(t0), rng_(cfg.seed) {
  check_config(cfg);
  if (t0 < 1) throw ConfigError("t0 must be >= 1");
  const int m = cfg.mc_draws;
  path_sorted_.resize(m);
  current_rank_.assign(m, 0);
  alive_.assign(m, 1);
  alive_count_ = m;
  // Pre-treatment segment of every simulated path.
  for (int i = 0; i < m; ++i) {
    auto& sorted = path_sorted_[i];
    sorted.reserve(t0 + 8);
    for (int j = 0; j < t0; ++j) sorted.push_back(rng_.normal());
    std::sort(sorted.begin(), sorted.end());
  }
  simulated_time_ = t0;
}

double GaussianGenericStatistic::effect_at(int t) const {
  int idx = t - t0_ - 1;
  if (idx < 0) return 0.0;
  if (idx < static_cast<int>(cfg_.mu_path.size())) return cfg_.mu_path[idx];
  return cfg_.effect_size;
}

void GaussianGenericStatistic::extend_paths(int t) {
  while (simulated_time_ < t) {
    int next_t = simulated_time_ + 1;
    double effect = effect_at(next_t);
    for (std::size_t i = 0; i < path_sorted_.size(); ++i) {
      double y = rng_.normal() + effect;  // drawn even for dead paths so the
                                          // stream does not depend on the data
      if (!alive_[i]) continue;
      auto& sorted = path_sorted_[i];
      auto pos = std::lower_bound(sorted.begin(), sorted.end(), y);
      current_rank_[i] = static_cast<int>(pos - sorted.begin()) + 1;
      sorted.insert(pos, y);
    }
    simulated_time_ = next_t;
  }
}

GenericStatistic::Evaluation GaussianGenericStatistic::next(int t) {
  if (t != simulated_time_ + 1) {
    throw StateError("gaussian generic statistic out of sync with the stream");
  }
  extend_paths(t);

  scratch_counts_.assign(t, 1.0);  // add-one smoothing
  fell_back_ = alive_count_ == 0;
  if (!fell_back_) {
    for (std::size_t i = 0; i < path_sorted_.size(); ++i) {
      if (alive_[i]) scratch_counts_[current_rank_[i] - 1] += 1.0;
    }
  } else if (!warned_) {
    warned_ = true;
    std::cerr << "avrank: gaussian generic statistic: no simulated path "
                 "matches the observed rank prefix; falling back to uniform\n";
  }

  Evaluation eval;
  const std::vector<double>* counts = &scratch_counts_;
  eval.value = [counts](int r) { return (*counts)[r - 1]; };
  eval.unit_denominator = false;
  return eval;
}

void GaussianGenericStatistic::update(const RankPair& ranks, int t) {
  if (t != simulated_time_) {
    throw StateError("gaussian generic statistic out of sync with the stream");
  }
  for (std::size_t i = 0; i < path_sorted_.size(); ++i) {
    if (alive_[i] && current_rank_[i] != ranks.seq_rank) {
      alive_[i] = 0;
      --alive_count_;
    }
  }
}

}  // namespace avrank
