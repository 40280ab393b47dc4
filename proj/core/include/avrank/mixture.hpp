#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace avrank {

enum class MixtureMode { adaptive, average };

// Combines candidate e-values into a single e-value.
//
// Adaptive mode runs the average of the candidate wealth processes: the
// mixture e-value at step t is the wealth-weighted average of the candidate
// e-values, and the mixture's log wealth trails the best candidate by at
// most log k at every step. Average mode takes the plain mean of the
// candidate e-values each step.
class MixtureState {
 public:
  MixtureState(int k, MixtureMode mode);

  // Absorbs one round of candidate e-values and returns the mixture e-value.
  double step(std::span<const double> candidate_e_values);

  int size() const { return static_cast<int>(log_wealth_.size()); }
  MixtureMode mode() const { return mode_; }
  const std::vector<double>& candidate_log_wealth() const { return log_wealth_; }

  // log of the mixture wealth (1/k) sum_j W^j.
  double mixture_log_wealth() const;
  // max_j log W^j - log mixture wealth; bounded by log k in adaptive mode.
  double regret() const;

  void save(std::ostream& out) const;
  static MixtureState load(std::istream& in);

 private:
  std::vector<double> log_wealth_;
  MixtureMode mode_;
};

}  // namespace avrank
