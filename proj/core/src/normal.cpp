#include "avrank/normal.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace avrank {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

constexpr int kTableSize = 1 << 15;
constexpr double kTableMax = 8.0;
constexpr double kTableStep = kTableMax / (kTableSize - 1);

struct Tables {
  std::array<double, kTableSize> cdf;
  std::array<double, kTableSize> pdf;
  Tables() {
    for (int i = 0; i < kTableSize; ++i) {
      double x = i * kTableStep;
      cdf[i] = 0.5 * std::erfc(-x * kInvSqrt2);
      pdf[i] = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

double lerp_table(const std::array<double, kTableSize>& table, double x) {
  double pos = x / kTableStep;
  int idx = static_cast<int>(pos);
  double frac = pos - idx;
  return table[idx] + frac * (table[idx + 1] - table[idx]);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double fast_normal_pdf(double x) {
  double ax = std::fabs(x);
  if (ax >= kTableMax) return 0.0;
  return lerp_table(tables().pdf, ax);
}

double fast_normal_cdf(double x) {
  double ax = std::fabs(x);
  if (ax >= kTableMax) return x > 0.0 ? 1.0 : 0.0;
  double upper = lerp_table(tables().cdf, ax);
  return x >= 0.0 ? upper : 1.0 - upper;
}

}  // namespace avrank
