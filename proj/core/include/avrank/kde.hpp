#pragma once

#include <iosfwd>
#include <vector>

namespace avrank {

// Gaussian kernel density on [0,1] with boundary reflection: every sample v
// also contributes kernels at -v and 2-v, and the result is renormalized so
// the density integrates to one on [0,1]. Bandwidth follows Silverman's
// rule on the extended sample, floored to avoid degenerate spikes while the
// sample is still small.
//
// With no samples the estimate is the uniform density on [0,1].
class ReflectedKde {
 public:
  struct Options {
    double bandwidth_floor = 0.05;
    double silverman_factor = 0.9;
  };

  ReflectedKde() = default;
  explicit ReflectedKde(Options opts) : opts_(opts) {}

  void add_sample(double v);  // v in (0,1); throws DataError otherwise

  bool empty() const { return samples_.empty(); }
  int size() const { return static_cast<int>(samples_.size()); }

  // Current bandwidth (meaningful once non-empty).
  double bandwidth() const;

  double pdf(double x) const;
  double cdf(double x) const;

  // CDF at several points in one pass over the samples (the per-sample
  // centering terms cancel between a query and the normalizing mass, so
  // the batch needs one kernel-CDF lookup per (query, reflection, sample)).
  std::vector<double> cdf_batch(const std::vector<double>& xs) const;

  void save(std::ostream& out) const;
  static ReflectedKde load(std::istream& in);

 private:
  void refresh() const;
  double raw_cdf(double x) const;  // unnormalized, zero at 0

  Options opts_;
  std::vector<double> samples_;         // insertion order (for checkpoints)
  std::vector<double> sorted_samples_;  // ascending (for IQR)
  double sum_ = 0.0;
  double sum_sq_ = 0.0;

  mutable bool dirty_ = true;
  mutable double h_ = 0.0;
  mutable double mass_ = 1.0;  // unnormalized integral over [0,1]
};

}  // namespace avrank
