#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "avrank/ranks.hpp"

namespace avrank {

// Producers of the next test statistic. The contract that makes the
// resulting e-values valid: next() must be called (and its output fixed)
// before the rank it will score is revealed, and any randomness it consumes
// must come from its own stream, independent of the data.

// Statistic on the reduced support {1..T0+1}.
class ReducedStatistic {
 public:
  virtual ~ReducedStatistic() = default;

  // Statistic values for the upcoming observation at time q.t.
  virtual std::vector<double> next(const NullCategorical& q) = 0;

  // Absorb the ranks revealed for time t (the time next() was produced for).
  virtual void update(const RankPair& ranks, int t) = 0;

  virtual void save(std::ostream& out) const = 0;
};

// Statistic on the full support {1..t}. Evaluation is lazy because some
// strategies only ever need the statistic at the realized rank.
class GenericStatistic {
 public:
  struct Evaluation {
    // S_t(r) for r in 1..t. Valid until the next update() call.
    std::function<double(int)> value;
    // True when the producer guarantees a unit null expectation, in which
    // case the e-value is value(rank) with no normalization.
    bool unit_denominator = false;
  };

  virtual ~GenericStatistic() = default;
  virtual Evaluation next(int t) = 0;
  virtual void update(const RankPair& ranks, int t) = 0;
};

}  // namespace avrank
