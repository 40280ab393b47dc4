#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "avrank/rng.hpp"

namespace avrank {

// Null distribution of the next reduced sequential rank: a categorical over
// the T0+1 slots between (and around) the ordered pre-treatment values,
// where the mass of slot i is proportional to one plus the number of earlier
// post-treatment observations that landed in slot i.
struct NullCategorical {
  std::vector<double> q;  // size T0+1, entry i-1 is the mass of slot i
  int t = 0;              // time index the distribution applies to

  int slots() const { return static_cast<int>(q.size()); }

  // Cumulative mass of slots 1..i (cum(0) == 0, cum(slots()) == 1).
  double cum(int i) const;
};

struct RankPair {
  int seq_rank;  // rank among all previous observations, in {1..t}
  int red_rank;  // rank among pre-treatment observations, in {1..T0+1}
};

// Observation stream split into a pre-treatment batch and a growing
// post-treatment sequence. Produces sequential ranks and reduced sequential
// ranks as observations arrive.
//
// Ties are broken by an independent uniform jitter attached to every
// observation (pre and post) from the seeded tie stream; comparisons are
// lexicographic on (value, jitter). This is equivalent to perturbing each
// value by noise of negligible scale and keeps the ranks exchangeable under
// the null. The stream is seeded, so replays are bit-identical.
//
// Single-owner mutable state; distinct histories may be used in parallel.
class RankHistory {
 public:
  RankHistory(std::vector<double> pre, std::uint64_t tie_seed);

  // Appends a post-treatment observation and returns its ranks.
  // Throws DataError when y is not finite.
  RankPair push_observation(double y);

  // Null categorical for the reduced rank at time t. t must be the time of
  // the next observation, i.e. t == time() + 1; anything else throws
  // StateError.
  NullCategorical null_category_probs(int t) const;

  int t0() const { return static_cast<int>(pre_.size()); }
  // Time index of the last absorbed observation (t0() before any push).
  int time() const { return t0() + static_cast<int>(post_.size()); }

  const std::vector<double>& pre() const { return pre_; }
  const std::vector<double>& post() const { return post_; }
  const std::vector<int>& seq_ranks() const { return seq_ranks_; }
  const std::vector<int>& red_ranks() const { return red_ranks_; }

  void save(std::ostream& out) const;
  static RankHistory load(std::istream& in);

 private:
  RankHistory() : tie_rng_(0) {}

  struct Keyed {
    double value;
    double jitter;
    bool operator<(const Keyed& other) const {
      if (value != other.value) return value < other.value;
      return jitter < other.jitter;
    }
  };

  std::vector<double> pre_;
  std::vector<double> post_;
  std::vector<int> seq_ranks_;
  std::vector<int> red_ranks_;
  std::vector<int> slot_counts_;  // per reduced slot, size T0+1
  std::vector<Keyed> pre_sorted_;
  std::vector<Keyed> all_sorted_;
  Rng tie_rng_;
};

// Smoothed rescaled rank V_t = (R_t - u) / t with u uniform on (0,1).
// Uniform on (0,1) under the null. Throws DataError when u is outside (0,1)
// or the rank is out of range.
double smoothed_rank(int seq_rank, int t, double u);

}  // namespace avrank
