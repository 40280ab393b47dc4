#include "avrank/plugin.hpp"

#include <ostream>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"

namespace avrank {

PluginReducedStatistic::PluginReducedStatistic(std::uint64_t seed,
                                               PluginOptions opts)
    : kde_(opts.kde), opts_(std::move(opts)), rng_(seed) {}

std::vector<double> PluginReducedStatistic::next(const NullCategorical& q) {
  if (has_pending_) throw StateError("plugin statistic: update() not called");
  pending_noise_ = rng_.uniform_open();
  has_pending_ = true;

  if (kde_.empty() && opts_.init_statistic) {
    if (static_cast<int>(opts_.init_statistic->size()) != q.slots()) {
      throw ConfigError("initial plugin statistic has the wrong support size");
    }
    return *opts_.init_statistic;
  }

  std::vector<double> interior(q.slots() - 1);
  double running = 0.0;
  for (int i = 0; i + 1 < q.slots(); ++i) {
    running += q.q[i];
    interior[i] = running;
  }
  std::vector<double> cdf = kde_.cdf_batch(interior);

  // Slot masses of the shrunk density (1-w) f_hat + w * uniform. The
  // uniform share keeps one surprising rank from zeroing the statistic
  // (and with it the whole wealth path) while the estimate is still
  // concentrated on a few samples.
  double shrink = plugin_uniform_share(kde_.size());
  std::vector<double> stat(q.slots());
  double cdf_lo = 0.0;
  for (int i = 0; i < q.slots(); ++i) {
    double cdf_hi = (i + 1 == q.slots()) ? 1.0 : cdf[i];
    stat[i] = (1.0 - shrink) * std::max(0.0, cdf_hi - cdf_lo) +
              shrink * q.q[i];
    cdf_lo = cdf_hi;
  }
  return stat;
}

void PluginReducedStatistic::update(const RankPair& ranks, int t) {
  if (!has_pending_) throw StateError("plugin statistic: next() not called");
  has_pending_ = false;
  kde_.add_sample(smoothed_rank(ranks.seq_rank, t, pending_noise_));
}

void PluginReducedStatistic::save(std::ostream& out) const {
  kde_.save(out);
  detail::write_u64(out, opts_.init_statistic ? 1 : 0);
  if (opts_.init_statistic) detail::write_f64_vector(out, *opts_.init_statistic);
  detail::write_string(out, rng_.serialize());
  detail::write_u64(out, has_pending_ ? 1 : 0);
  detail::write_f64(out, pending_noise_);
}

std::unique_ptr<PluginReducedStatistic> PluginReducedStatistic::load(
    std::istream& in) {
  ReflectedKde kde = ReflectedKde::load(in);
  PluginOptions opts;
  if (detail::read_u64(in) != 0) opts.init_statistic = detail::read_f64_vector(in);
  auto stat = std::make_unique<PluginReducedStatistic>(0, opts);
  stat->kde_ = std::move(kde);
  stat->rng_ = Rng::deserialize(detail::read_string(in));
  stat->has_pending_ = detail::read_u64(in) != 0;
  stat->pending_noise_ = detail::read_f64(in);
  return stat;
}

PluginGenericStatistic::PluginGenericStatistic(std::uint64_t seed, int t0,
                                               PluginOptions opts)
    : kde_(opts.kde), opts_(std::move(opts)), t0_(t0), rng_(seed) {}

GenericStatistic::Evaluation PluginGenericStatistic::next(int t) {
  if (has_pending_) throw StateError("plugin statistic: update() not called");
  pending_noise_ = rng_.uniform_open();
  has_pending_ = true;

  Evaluation eval;
  if (first_step_ && opts_.init_statistic) {
    // Initial statistic lives on the reduced support {1..T0+1}, which at
    // t = T0+1 coincides with the full support.
    if (t != t0_ + 1 || static_cast<int>(opts_.init_statistic->size()) != t) {
      throw ConfigError("initial plugin statistic has the wrong support size");
    }
    const std::vector<double>& init = *opts_.init_statistic;
    eval.value = [init](int r) { return init[r - 1]; };
    eval.unit_denominator = false;
    return eval;
  }

  double noise = pending_noise_;
  double shrink = plugin_uniform_share(kde_.size());
  const ReflectedKde* kde = &kde_;
  eval.value = [kde, noise, shrink, t](int r) {
    double v = (static_cast<double>(r) - noise) / static_cast<double>(t);
    return (1.0 - shrink) * kde->pdf(v) + shrink;
  };
  eval.unit_denominator = true;  // both mixture components integrate to one
  return eval;
}

void PluginGenericStatistic::update(const RankPair& ranks, int t) {
  if (!has_pending_) throw StateError("plugin statistic: next() not called");
  has_pending_ = false;
  first_step_ = false;
  kde_.add_sample(smoothed_rank(ranks.seq_rank, t, pending_noise_));
}

}  // namespace avrank
