#pragma once

#include <iosfwd>
#include <span>

#include "avrank/ranks.hpp"

namespace avrank {

// Log-scale test martingale. Starts at wealth 1; absorbing sequential
// e-values multiplies the wealth. Crossing 1/alpha latches the rejection
// flag, and the anytime-valid p-value is the reciprocal of the running
// wealth maximum.
//
// Value semantics: safe to copy and move between threads, not to share
// mutably.
struct EProcess {
  double log_wealth = 0.0;
  double log_wealth_max = 0.0;
  long step = 0;
  double alpha = 0.05;
  bool rejected = false;

  EProcess() = default;
  explicit EProcess(double alpha_level);

  // Multiplies the wealth by e. e == 0 absorbs the wealth at zero (the
  // p-value freezes at its current level); negative or non-finite e throws
  // StatisticError.
  void absorb(double e);

  // Anytime-valid p-value min(1, 1 / max_s W_s). Non-increasing in t; the
  // running maximum gives the same Ville guarantee as the current wealth
  // but is monotone and never larger.
  double anytime_p() const;

  // Reciprocal of the current wealth, min(1, 1 / W_t). Not monotone; kept
  // for wealth-path plots.
  double current_p() const;

  double log_threshold() const;

  void save(std::ostream& out) const;
  static EProcess load(std::istream& in);
};

// Sequential e-value for a statistic on the full rank support {1..t}:
// e = S(R) / ((1/t) * sum_i S(i)), with 0/0 read as 1.
// statistic[i-1] holds S(i). Throws StatisticError on negative or
// non-finite statistic values, DataError on a rank outside {1..t}.
double e_value_generic(std::span<const double> statistic, int seq_rank);

// Sequential e-value for a statistic on the reduced support {1..T0+1}:
// e = (S(r) / q_r) / sum_i S(i), with 0/0 read as 1.
double e_value_reduced(std::span<const double> statistic, int red_rank,
                       const NullCategorical& q);

}  // namespace avrank
