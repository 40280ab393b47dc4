#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace avrank {

// Split-conformal permutation test at a fixed horizon: the observed window
// statistic is compared against its value over every size-(#post)
// combination of the pooled blank and post estimates.

enum class Sided { one, two };

struct FixedTResult {
  double p_value = 1.0;
  // |Pi| in exact mode, number of sampled combinations otherwise.
  double n_combinations = 0.0;
  double statistic = 0.0;
  bool sampled = false;
};

struct FixedTOptions {
  Sided sided = Sided::one;
  enum class Mode { exact, sampled } mode = Mode::exact;
  long sample_draws = 10000;     // M for sampled mode
  std::uint64_t seed = 0;        // sampling stream
};

// Number of combinations C(n, m), saturating instead of overflowing.
double binomial_count(int n, int m);

// Exact-mode enumeration refuses instances with more than this many
// combinations; use sampled mode there.
inline constexpr double kExactModeLimit = 1e7;

FixedTResult fixed_t_pvalue(std::span<const double> blanks,
                            std::span<const double> post,
                            const FixedTOptions& opts = {});

// Re-runs the fixed-horizon test after every arriving post estimate and
// reports the first time the p-value dips below alpha. This is the
// size-invalid sequential use of a fixed-horizon test, kept as a
// comparator: its crossing frequency under the null grows well past alpha.
class RepeatedFixedT {
 public:
  RepeatedFixedT(std::vector<double> blanks, double alpha,
                 FixedTOptions opts = {}, double exact_limit = 1e5);

  // Feeds one estimate; returns the (1-based) post index of the first
  // crossing, once, or nullopt.
  std::optional<int> push(double estimate);

  const std::vector<double>& p_values() const { return p_values_; }
  std::optional<int> crossing() const { return crossing_; }

 private:
  std::vector<double> blanks_;
  std::vector<double> post_;
  double alpha_;
  FixedTOptions opts_;
  double exact_limit_;
  std::vector<double> p_values_;
  std::optional<int> crossing_;
  std::uint64_t step_ = 0;
};

}  // namespace avrank
