#include "avrank/eprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avrank/detail/binary_io.hpp"
#include "avrank/errors.hpp"

namespace avrank {

EProcess::EProcess(double alpha_level) : alpha(alpha_level) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0,1)");
  }
}

void EProcess::absorb(double e) {
  if (std::isnan(e) || e < 0.0 || std::isinf(e)) {
    throw StatisticError("e-value must be finite and non-negative");
  }
  log_wealth += std::log(e);  // log(0) == -inf: wealth absorbs at zero
  log_wealth_max = std::max(log_wealth_max, log_wealth);
  step += 1;
  if (log_wealth >= log_threshold()) rejected = true;
}

double EProcess::anytime_p() const {
  return std::min(1.0, std::exp(-log_wealth_max));
}

double EProcess::current_p() const {
  return std::min(1.0, std::exp(-log_wealth));
}

double EProcess::log_threshold() const { return -std::log(alpha); }

void EProcess::save(std::ostream& out) const {
  detail::write_f64(out, log_wealth);
  detail::write_f64(out, log_wealth_max);
  detail::write_i64(out, step);
  detail::write_f64(out, alpha);
  detail::write_u64(out, rejected ? 1 : 0);
}

EProcess EProcess::load(std::istream& in) {
  EProcess ep;
  ep.log_wealth = detail::read_f64(in);
  ep.log_wealth_max = detail::read_f64(in);
  ep.step = detail::read_i64(in);
  ep.alpha = detail::read_f64(in);
  ep.rejected = detail::read_u64(in) != 0;
  return ep;
}

namespace {

void check_statistic(std::span<const double> statistic) {
  for (double s : statistic) {
    if (std::isnan(s) || s < 0.0 || std::isinf(s)) {
      throw StatisticError("statistic values must be finite and non-negative");
    }
  }
}

}  // namespace

double e_value_generic(std::span<const double> statistic, int seq_rank) {
  check_statistic(statistic);
  int t = static_cast<int>(statistic.size());
  if (seq_rank < 1 || seq_rank > t) throw DataError("rank outside statistic support");
  double total = 0.0;
  for (double s : statistic) total += s;
  if (total == 0.0) return 1.0;  // 0/0 convention
  return statistic[seq_rank - 1] * static_cast<double>(t) / total;
}

double e_value_reduced(std::span<const double> statistic, int red_rank,
                       const NullCategorical& q) {
  check_statistic(statistic);
  int slots = static_cast<int>(statistic.size());
  if (slots != q.slots()) throw StateError("statistic/null support mismatch");
  if (red_rank < 1 || red_rank > slots) throw DataError("reduced rank outside support");
  if (!(q.q[red_rank - 1] > 0.0)) {
    throw StateError("null categorical has zero mass at the realized slot");
  }
  double total = 0.0;
  for (double s : statistic) total += s;
  if (total == 0.0) return 1.0;  // 0/0 convention
  return statistic[red_rank - 1] / q.q[red_rank - 1] / total;
}

}  // namespace avrank
