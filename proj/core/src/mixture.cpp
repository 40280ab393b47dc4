#include "avrank/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"

namespace avrank {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

MixtureState::MixtureState(int k, MixtureMode mode) : mode_(mode) {
  if (k < 1) throw ConfigError("mixture needs at least one candidate");
  log_wealth_.assign(k, 0.0);
}

double MixtureState::step(std::span<const double> candidate_e_values) {
  if (static_cast<int>(candidate_e_values.size()) != size()) {
    throw ConfigError("candidate e-value count does not match mixture size");
  }
  for (double e : candidate_e_values) {
    if (std::isnan(e) || e < 0.0 || std::isinf(e)) {
      throw StatisticError("candidate e-values must be finite and non-negative");
    }
  }

  double e_mix;
  if (mode_ == MixtureMode::adaptive) {
    double before = log_sum_exp(log_wealth_);
    for (int j = 0; j < size(); ++j) {
      log_wealth_[j] += std::log(candidate_e_values[j]);
    }
    double after = log_sum_exp(log_wealth_);
    if (!std::isfinite(before)) {
      e_mix = 1.0;  // every candidate already absorbed at zero: 0/0 is 1
    } else {
      e_mix = std::exp(after - before);
    }
  } else {
    double acc = 0.0;
    for (double e : candidate_e_values) acc += e;
    e_mix = acc / static_cast<double>(size());
    for (int j = 0; j < size(); ++j) {
      log_wealth_[j] += std::log(candidate_e_values[j]);
    }
  }
  return e_mix;
}

double MixtureState::mixture_log_wealth() const {
  return log_sum_exp(log_wealth_) - std::log(static_cast<double>(size()));
}

double MixtureState::regret() const {
  double best = *std::max_element(log_wealth_.begin(), log_wealth_.end());
  return best - mixture_log_wealth();
}

void MixtureState::save(std::ostream& out) const {
  detail::write_u64(out, mode_ == MixtureMode::adaptive ? 0 : 1);
  detail::write_f64_vector(out, log_wealth_);
}

MixtureState MixtureState::load(std::istream& in) {
  MixtureMode mode =
      detail::read_u64(in) == 0 ? MixtureMode::adaptive : MixtureMode::average;
  std::vector<double> lw = detail::read_f64_vector(in);
  MixtureState state(static_cast<int>(lw.size()), mode);
  state.log_wealth_ = std::move(lw);
  return state;
}

}  // namespace avrank
