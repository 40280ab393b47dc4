#pragma once

#include <cstdint>
#include <optional>

#include "avrank/kde.hpp"
#include "avrank/statistic.hpp"

namespace avrank {

// Plug-in statistics: a kernel density estimate over the smoothed rescaled
// ranks observed so far stands in for the unknown alternative. Both
// variants share the same estimator; they differ in how it is read out.
//
// At the first step the density has no samples yet. By default it is
// uniform (so the first e-value is 1); an explicit initial statistic over
// the reduced slots can be supplied instead.

struct PluginOptions {
  ReflectedKde::Options kde;
  std::optional<std::vector<double>> init_statistic;  // size T0+1
};

// Weight of the uniform component mixed into the estimated density after k
// samples: one pseudo-sample of the null density, fading as 1/(k+1). Keeps
// the statistic strictly positive so a single surprising rank cannot absorb
// the wealth at zero.
inline double plugin_uniform_share(int kde_samples) {
  return 1.0 / (1.0 + kde_samples);
}

// Reduced readout: probabilities of the reduced slots under the estimated
// density, obtained as CDF differences at the cumulative null masses.
class PluginReducedStatistic final : public ReducedStatistic {
 public:
  PluginReducedStatistic(std::uint64_t seed, PluginOptions opts = {});

  std::vector<double> next(const NullCategorical& q) override;
  void update(const RankPair& ranks, int t) override;

  const ReflectedKde& density() const { return kde_; }

  void save(std::ostream& out) const override;
  static std::unique_ptr<PluginReducedStatistic> load(std::istream& in);

 private:
  ReflectedKde kde_;
  PluginOptions opts_;
  Rng rng_;
  double pending_noise_ = 0.0;
  bool has_pending_ = false;
};

// Generic readout: the estimated density evaluated at the smoothed rescaled
// rank. The null expectation of this statistic is exactly one (the density
// integrates to one), so the paired e-value skips the normalizing sum.
class PluginGenericStatistic final : public GenericStatistic {
 public:
  PluginGenericStatistic(std::uint64_t seed, int t0, PluginOptions opts = {});

  Evaluation next(int t) override;
  void update(const RankPair& ranks, int t) override;

  const ReflectedKde& density() const { return kde_; }

 private:
  ReflectedKde kde_;
  PluginOptions opts_;
  int t0_;
  Rng rng_;
  double pending_noise_ = 0.0;
  bool has_pending_ = false;
  bool first_step_ = true;
};

}  // namespace avrank
