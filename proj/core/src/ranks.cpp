#include "avrank/ranks.hpp"

#include <algorithm>
#include <cmath>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"

namespace avrank {

double NullCategorical::cum(int i) const {
  if (i <= 0) return 0.0;
  if (i >= slots()) return 1.0;
  double s = 0.0;
  for (int j = 0; j < i; ++j) s += q[j];
  return s;
}

RankHistory::RankHistory(std::vector<double> pre, std::uint64_t tie_seed)
    : pre_(std::move(pre)), tie_rng_(tie_seed) {
  if (pre_.empty()) throw ConfigError("pre-treatment batch must be nonempty");
  for (double y : pre_) {
    if (!std::isfinite(y)) throw DataError("non-finite pre-treatment value");
  }
  pre_sorted_.reserve(pre_.size());
  for (double y : pre_) pre_sorted_.push_back({y, tie_rng_.uniform_open()});
  std::sort(pre_sorted_.begin(), pre_sorted_.end());
  all_sorted_ = pre_sorted_;
  slot_counts_.assign(pre_.size() + 1, 0);
}

RankPair RankHistory::push_observation(double y) {
  if (!std::isfinite(y)) throw DataError("non-finite observation");
  Keyed keyed{y, tie_rng_.uniform_open()};

  auto all_pos = std::lower_bound(all_sorted_.begin(), all_sorted_.end(), keyed);
  int seq_rank = static_cast<int>(all_pos - all_sorted_.begin()) + 1;
  auto pre_pos = std::lower_bound(pre_sorted_.begin(), pre_sorted_.end(), keyed);
  int red_rank = static_cast<int>(pre_pos - pre_sorted_.begin()) + 1;

  all_sorted_.insert(all_pos, keyed);
  post_.push_back(y);
  seq_ranks_.push_back(seq_rank);
  red_ranks_.push_back(red_rank);
  slot_counts_[red_rank - 1] += 1;
  return {seq_rank, red_rank};
}

NullCategorical RankHistory::null_category_probs(int t) const {
  if (t != time() + 1) {
    throw StateError("null_category_probs: t does not match history length");
  }
  NullCategorical cat;
  cat.t = t;
  cat.q.resize(slot_counts_.size());
  double inv_t = 1.0 / static_cast<double>(t);
  for (std::size_t i = 0; i < slot_counts_.size(); ++i) {
    cat.q[i] = (1.0 + slot_counts_[i]) * inv_t;
  }
  return cat;
}

void RankHistory::save(std::ostream& out) const {
  detail::write_f64_vector(out, pre_);
  detail::write_f64_vector(out, post_);
  detail::write_i32_vector(out, seq_ranks_);
  detail::write_i32_vector(out, red_ranks_);
  detail::write_i32_vector(out, slot_counts_);
  detail::write_u64(out, pre_sorted_.size());
  for (const Keyed& k : pre_sorted_) {
    detail::write_f64(out, k.value);
    detail::write_f64(out, k.jitter);
  }
  detail::write_u64(out, all_sorted_.size());
  for (const Keyed& k : all_sorted_) {
    detail::write_f64(out, k.value);
    detail::write_f64(out, k.jitter);
  }
  detail::write_string(out, tie_rng_.serialize());
}

RankHistory RankHistory::load(std::istream& in) {
  RankHistory h;
  h.pre_ = detail::read_f64_vector(in);
  h.post_ = detail::read_f64_vector(in);
  h.seq_ranks_ = detail::read_i32_vector(in);
  h.red_ranks_ = detail::read_i32_vector(in);
  h.slot_counts_ = detail::read_i32_vector(in);
  std::uint64_t n = detail::read_u64(in);
  h.pre_sorted_.resize(n);
  for (auto& k : h.pre_sorted_) {
    k.value = detail::read_f64(in);
    k.jitter = detail::read_f64(in);
  }
  n = detail::read_u64(in);
  h.all_sorted_.resize(n);
  for (auto& k : h.all_sorted_) {
    k.value = detail::read_f64(in);
    k.jitter = detail::read_f64(in);
  }
  h.tie_rng_ = Rng::deserialize(detail::read_string(in));
  return h;
}

double smoothed_rank(int seq_rank, int t, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DataError("smoothing noise must lie in (0,1)");
  if (seq_rank < 1 || seq_rank > t) throw DataError("rank out of range");
  return (static_cast<double>(seq_rank) - u) / static_cast<double>(t);
}

}  // namespace avrank
