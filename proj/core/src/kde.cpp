#include "avrank/kde.hpp"

#include <algorithm>
#include <cmath>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"
#include "avrank/normal.hpp"

namespace avrank {

namespace {

double sample_quantile(const std::vector<double>& sorted, double p) {
  std::size_t n = sorted.size();
  double pos = p * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  double a = sorted[lo];
  if (frac == 0.0 || lo + 1 >= n) return a;
  return a + frac * (sorted[lo + 1] - a);
}

}  // namespace

void ReflectedKde::add_sample(double v) {
  if (!(v > 0.0 && v < 1.0)) throw DataError("kde sample must lie in (0,1)");
  samples_.push_back(v);
  sorted_samples_.insert(
      std::upper_bound(sorted_samples_.begin(), sorted_samples_.end(), v), v);
  sum_ += v;
  sum_sq_ += v * v;
  dirty_ = true;
}

void ReflectedKde::refresh() const {
  if (!dirty_) return;
  dirty_ = false;
  std::size_t k = samples_.size();
  if (k == 0) {
    h_ = opts_.bandwidth_floor;
    mass_ = 1.0;
    return;
  }
  // Silverman's rule on the raw sample. The reflected copies only correct
  // the boundary bias; letting them into the spread estimate would triple
  // the nominal sample and stretch the bandwidth far past the data scale.
  double n = static_cast<double>(k);
  double mean = sum_ / n;
  double var = std::max(0.0, sum_sq_ / n - mean * mean);
  double sd = std::sqrt(var);
  double iqr = sample_quantile(sorted_samples_, 0.75) -
               sample_quantile(sorted_samples_, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  h_ = opts_.silverman_factor * spread * std::pow(n, -0.2);
  h_ = std::max(h_, opts_.bandwidth_floor);

  mass_ = raw_cdf(1.0);
}

double ReflectedKde::bandwidth() const {
  refresh();
  return h_;
}

double ReflectedKde::raw_cdf(double x) const {
  double inv_h = 1.0 / h_;
  double acc = 0.0;
  for (double v : samples_) {
    acc += fast_normal_cdf((x + v) * inv_h) - fast_normal_cdf(v * inv_h);
    acc += fast_normal_cdf((x - v) * inv_h) - fast_normal_cdf(-v * inv_h);
    acc += fast_normal_cdf((x - 2.0 + v) * inv_h) -
           fast_normal_cdf((v - 2.0) * inv_h);
  }
  return acc / (3.0 * static_cast<double>(samples_.size()));
}

double ReflectedKde::pdf(double x) const {
  refresh();
  if (samples_.empty()) return 1.0;
  double inv_h = 1.0 / h_;
  double acc = 0.0;
  for (double v : samples_) {
    acc += fast_normal_pdf((x + v) * inv_h);
    acc += fast_normal_pdf((x - v) * inv_h);
    acc += fast_normal_pdf((x - 2.0 + v) * inv_h);
  }
  double density = acc * inv_h / (3.0 * static_cast<double>(samples_.size()));
  return density / mass_;
}

double ReflectedKde::cdf(double x) const {
  refresh();
  if (samples_.empty()) return std::clamp(x, 0.0, 1.0);
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return raw_cdf(x) / mass_;
}

std::vector<double> ReflectedKde::cdf_batch(const std::vector<double>& xs) const {
  refresh();
  std::vector<double> out(xs.size());
  if (samples_.empty()) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::clamp(xs[i], 0.0, 1.0);
    return out;
  }
  // Accumulate sum_v sum_refl Phi((x - z)/h) per query; the per-sample
  // offset sum_v sum_refl Phi((0 - z)/h) is shared, so compute it once and
  // normalize by the same difference evaluated at x = 1.
  double inv_h = 1.0 / h_;
  std::vector<double> acc(xs.size() + 2, 0.0);  // queries, then x=0 and x=1
  for (double v : samples_) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double x = xs[i];
      acc[i] += fast_normal_cdf((x + v) * inv_h) +
                fast_normal_cdf((x - v) * inv_h) +
                fast_normal_cdf((x - 2.0 + v) * inv_h);
    }
    acc[xs.size()] += fast_normal_cdf(v * inv_h) +
                      fast_normal_cdf(-v * inv_h) +
                      fast_normal_cdf((v - 2.0) * inv_h);
    acc[xs.size() + 1] += fast_normal_cdf((1.0 + v) * inv_h) +
                          fast_normal_cdf((1.0 - v) * inv_h) +
                          fast_normal_cdf((v - 1.0) * inv_h);
  }
  double at_zero = acc[xs.size()];
  double total_mass = acc[xs.size() + 1] - at_zero;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0) {
      out[i] = 0.0;
    } else if (xs[i] >= 1.0) {
      out[i] = 1.0;
    } else {
      out[i] = (acc[i] - at_zero) / total_mass;
    }
  }
  return out;
}

void ReflectedKde::save(std::ostream& out) const {
  detail::write_f64(out, opts_.bandwidth_floor);
  detail::write_f64(out, opts_.silverman_factor);
  detail::write_f64_vector(out, samples_);
}

ReflectedKde ReflectedKde::load(std::istream& in) {
  Options opts;
  opts.bandwidth_floor = detail::read_f64(in);
  opts.silverman_factor = detail::read_f64(in);
  ReflectedKde kde(opts);
  for (double v : detail::read_f64_vector(in)) kde.add_sample(v);
  return kde;
}

}  // namespace avrank
