#include "avrank/fixed_t.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avrank/errors.hpp"
#include "avrank/rng.hpp"

namespace avrank {

double binomial_count(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  m = std::min(m, n - m);
  double acc = 1.0;
  for (int i = 1; i <= m; ++i) {
    acc *= static_cast<double>(n - m + i) / static_cast<double>(i);
    if (acc > 1e300) return 1e300;
  }
  return acc;
}

namespace {

double window_statistic(std::span<const double> values, Sided sided) {
  double acc = 0.0;
  if (sided == Sided::two) {
    for (double v : values) acc += std::fabs(v);
  } else {
    for (double v : values) acc += v;
  }
  return acc;
}

FixedTResult exact_pvalue(const std::vector<double>& pool, int m,
                          double observed) {
  const int n = static_cast<int>(pool.size());
  // Lexicographic enumeration of index combinations with an incrementally
  // maintained sum.
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += pool[i];

  long long exceed = 0;
  long long total = 0;
  constexpr double kSlack = 1e-9;
  for (;;) {
    ++total;
    if (sum >= observed - kSlack) ++exceed;

    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    sum -= pool[idx[i]];
    idx[i] += 1;
    sum += pool[idx[i]];
    for (int j = i + 1; j < m; ++j) {
      sum -= pool[idx[j]];
      idx[j] = idx[j - 1] + 1;
      sum += pool[idx[j]];
    }
  }

  FixedTResult result;
  result.statistic = observed;
  result.n_combinations = static_cast<double>(total);
  result.p_value = static_cast<double>(exceed) / static_cast<double>(total);
  result.sampled = false;
  return result;
}

FixedTResult sampled_pvalue(const std::vector<double>& pool, int m,
                            double observed, const FixedTOptions& opts) {
  const int n = static_cast<int>(pool.size());
  Rng rng(opts.seed);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  long long exceed = 0;
  constexpr double kSlack = 1e-9;
  for (long draw = 0; draw < opts.sample_draws; ++draw) {
    // Partial Fisher-Yates: the first m entries form a uniform combination.
    for (int i = 0; i < m; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += pool[idx[i]];
    if (sum >= observed - kSlack) ++exceed;
  }

  FixedTResult result;
  result.statistic = observed;
  result.n_combinations = static_cast<double>(opts.sample_draws);
  // The observed window is itself a valid combination; counting it keeps
  // the subsampled p-value valid.
  result.p_value = static_cast<double>(1 + exceed) /
                   static_cast<double>(opts.sample_draws + 1);
  result.sampled = true;
  return result;
}

}  // namespace

FixedTResult fixed_t_pvalue(std::span<const double> blanks,
                            std::span<const double> post,
                            const FixedTOptions& opts) {
  if (blanks.empty() || post.empty()) {
    throw ConfigError("fixed-T test needs nonempty blank and post windows");
  }
  for (double v : blanks) {
    if (!std::isfinite(v)) throw DataError("non-finite blank estimate");
  }
  for (double v : post) {
    if (!std::isfinite(v)) throw DataError("non-finite post estimate");
  }

  std::vector<double> pool(blanks.begin(), blanks.end());
  pool.insert(pool.end(), post.begin(), post.end());
  const int m = static_cast<int>(post.size());
  if (opts.sided == Sided::two) {
    for (double& v : pool) v = std::fabs(v);
  }
  double observed = 0.0;
  for (int i = 0; i < m; ++i) observed += pool[pool.size() - m + i];

  double n_comb = binomial_count(static_cast<int>(pool.size()), m);
  if (opts.mode == FixedTOptions::Mode::exact) {
    if (n_comb > kExactModeLimit) {
      throw ConfigError("too many combinations for exact mode; use sampled mode");
    }
    return exact_pvalue(pool, m, observed);
  }
  if (opts.sample_draws < 1) throw ConfigError("sampled mode needs draws >= 1");
  return sampled_pvalue(pool, m, observed, opts);
}

RepeatedFixedT::RepeatedFixedT(std::vector<double> blanks, double alpha,
                               FixedTOptions opts, double exact_limit)
    : blanks_(std::move(blanks)), alpha_(alpha), opts_(opts),
      exact_limit_(std::min(exact_limit, kExactModeLimit)) {
  if (blanks_.empty()) throw ConfigError("repeated fixed-T needs blank estimates");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

std::optional<int> RepeatedFixedT::push(double estimate) {
  post_.push_back(estimate);
  FixedTOptions opts = opts_;
  double n_comb = binomial_count(
      static_cast<int>(blanks_.size() + post_.size()),
      static_cast<int>(post_.size()));
  opts.mode = n_comb <= exact_limit_ ? FixedTOptions::Mode::exact
                                     : FixedTOptions::Mode::sampled;
  // Fresh substream per step so the p-value path is replayable.
  opts.seed = mix_seed(opts_.seed, ++step_);
  FixedTResult result = fixed_t_pvalue(blanks_, post_, opts);
  p_values_.push_back(result.p_value);
  if (!crossing_ && result.p_value <= alpha_) {
    crossing_ = static_cast<int>(post_.size());
  }
  return crossing_;
}

}  // namespace avrank
