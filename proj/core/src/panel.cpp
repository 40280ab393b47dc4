#include "avrank/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "avrank/errors.hpp"
#include "avrank/rng.hpp"

namespace avrank {

namespace {

// Substream ids for the pieces of the simulation, so that e.g. the same
// seed with and without a treatment path yields identical noise.
enum StreamId : std::uint64_t {
  kLoadings = 1,
  kFactors = 2,
  kTheta = 3,
  kNoise = 4,
  kCovariates = 5,
};

void fill_normal(Rng& rng, Eigen::Ref<Eigen::MatrixXd> m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void IfeConfig::validate() const {
  if (n_controls < 1) throw ConfigError("need at least one control unit");
  if (!(1 <= t_blank && t_blank < t0 && t0 < t_total)) {
    throw ConfigError("require 1 <= t_blank < t0 < t_total");
  }
  if (std::abs(rho_lambda) >= 1.0 || std::abs(rho_eps) >= 1.0) {
    throw ConfigError("autoregressive parameters must lie in (-1,1)");
  }
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  if (r_factors < 0 || n_covariates < 0) {
    throw ConfigError("factor and covariate dimensions must be non-negative");
  }
  if (loadings.size() != 0 &&
      (loadings.rows() != n_controls + 1 || loadings.cols() != r_factors)) {
    throw ConfigError("loadings must be (N+1) x r");
  }
  if (covariates.size() != 0 &&
      (covariates.rows() != n_controls + 1 || covariates.cols() != n_covariates)) {
    throw ConfigError("covariates must be (N+1) x l");
  }
  if (!treatment.empty() &&
      static_cast<int>(treatment.size()) != t_total - t0) {
    throw ConfigError("treatment path must have T - t0 entries");
  }
}

Panel simulate_ife(const IfeConfig& cfg) {
  cfg.validate();
  const int units = cfg.n_controls + 1;
  const int t_total = cfg.t_total;

  Eigen::MatrixXd loadings = cfg.loadings;
  if (loadings.size() == 0 && cfg.r_factors > 0) {
    loadings.resize(units, cfg.r_factors);
    Rng rng(mix_seed(cfg.seed, kLoadings));
    fill_normal(rng, loadings);
  }
  Eigen::MatrixXd covariates = cfg.covariates;
  if (covariates.size() == 0 && cfg.n_covariates > 0) {
    covariates.resize(units, cfg.n_covariates);
    Rng rng(mix_seed(cfg.seed, kCovariates));
    fill_normal(rng, covariates);
  }

  Eigen::MatrixXd outcomes = Eigen::MatrixXd::Zero(units, t_total);

  if (cfg.r_factors > 0) {
    Rng rng(mix_seed(cfg.seed, kFactors));
    Eigen::VectorXd factor(cfg.r_factors);
    for (int j = 0; j < cfg.r_factors; ++j) factor[j] = rng.normal();
    double innov_sd = std::sqrt(1.0 - cfg.rho_lambda * cfg.rho_lambda);
    for (int t = 0; t < t_total; ++t) {
      if (t > 0) {
        for (int j = 0; j < cfg.r_factors; ++j) {
          factor[j] = cfg.rho_lambda * factor[j] + innov_sd * rng.normal();
        }
      }
      outcomes.col(t) += loadings * factor;
    }
  }

  if (cfg.n_covariates > 0) {
    Rng rng(mix_seed(cfg.seed, kTheta));
    Eigen::VectorXd theta(cfg.n_covariates);
    for (int t = 0; t < t_total; ++t) {
      for (int j = 0; j < cfg.n_covariates; ++j) theta[j] = rng.normal();
      outcomes.col(t) += covariates * theta;
    }
  }

  {
    Rng rng(mix_seed(cfg.seed, kNoise));
    Eigen::VectorXd eps(units);
    for (int i = 0; i < units; ++i) eps[i] = cfg.sigma * rng.normal();
    double innov_sd = cfg.sigma * std::sqrt(1.0 - cfg.rho_eps * cfg.rho_eps);
    for (int t = 0; t < t_total; ++t) {
      if (t > 0) {
        for (int i = 0; i < units; ++i) {
          eps[i] = cfg.rho_eps * eps[i] + innov_sd * rng.normal();
        }
      }
      outcomes.col(t) += eps;
    }
  }

  if (!cfg.treatment.empty()) {
    for (int t = cfg.t0; t < t_total; ++t) {
      outcomes(0, t) += cfg.treatment[t - cfg.t0];
    }
  }

  return Panel{std::move(outcomes), cfg};
}

TreatmentEstimates did_estimates(const Panel& panel) {
  const IfeConfig& cfg = panel.config;
  cfg.validate();
  const auto& y = panel.outcomes;
  const int units = cfg.n_controls + 1;
  const int train_begin = cfg.t_blank;  // zero-based column of first training period
  const int train_len = cfg.t0 - cfg.t_blank;
  if (train_len <= 0) throw ConfigError("empty training set");

  // Control mean per period.
  Eigen::RowVectorXd control_mean =
      y.bottomRows(units - 1).colwise().mean();
  double treated_train_mean =
      y.row(0).segment(train_begin, train_len).mean();
  double control_train_mean =
      control_mean.segment(train_begin, train_len).mean();
  double level = treated_train_mean - control_train_mean;

  TreatmentEstimates est;
  est.blank.reserve(cfg.t_blank);
  for (int t = 0; t < cfg.t_blank; ++t) {
    est.blank.push_back(y(0, t) - control_mean[t] - level);
  }
  est.post.reserve(cfg.t_total - cfg.t0);
  for (int t = cfg.t0; t < cfg.t_total; ++t) {
    est.post.push_back(y(0, t) - control_mean[t] - level);
  }
  return est;
}

Eigen::MatrixXd training_characteristics(const Panel& panel) {
  const IfeConfig& cfg = panel.config;
  const int train_len = cfg.t0 - cfg.t_blank;
  if (train_len <= 0) throw ConfigError("empty training set");
  return panel.outcomes.middleCols(cfg.t_blank, train_len).transpose();
}

Eigen::VectorXd scm_weights(const Eigen::MatrixXd& characteristics,
                            const Eigen::VectorXd& v_diag) {
  const Eigen::Index k = characteristics.rows();
  const Eigen::Index n = characteristics.cols() - 1;
  if (k < 1 || n < 1) throw ConfigError("characteristics must be K x (N+1), K,N >= 1");
  if (v_diag.size() != k) throw ConfigError("v_diag must have K entries");
  if (!characteristics.allFinite() || !v_diag.allFinite()) {
    throw DataError("characteristics must be finite");
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (v_diag[i] < 0.0) throw ConfigError("v_diag must be non-negative");
  }

  if (n == 1) return Eigen::VectorXd::Ones(1);

  // Work with the V^(1/2)-scaled problem: minimize ||x1 - X0 w||^2.
  Eigen::VectorXd scale = v_diag.array().sqrt();
  Eigen::VectorXd x1 = scale.asDiagonal() * characteristics.col(0);
  Eigen::MatrixXd x0 =
      scale.asDiagonal() * characteristics.rightCols(n);

  constexpr double kGapTol = 1e-8;
  constexpr int kMaxRounds = 10000;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[0] = 1.0;
  std::vector<Eigen::Index> active = {0};

  auto solve_restricted = [&](const std::vector<Eigen::Index>& idx) {
    // KKT system for min ||x1 - sub u||^2 s.t. sum u = 1 (signs free).
    const Eigen::Index a = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(x0.rows(), a);
    for (Eigen::Index j = 0; j < a; ++j) sub.col(j) = x0.col(idx[j]);
    Eigen::MatrixXd kkt(a + 1, a + 1);
    kkt.topLeftCorner(a, a) = 2.0 * (sub.transpose() * sub);
    kkt.topRightCorner(a, 1).setOnes();
    kkt.bottomLeftCorner(1, a).setOnes();
    kkt(a, a) = 0.0;
    Eigen::VectorXd rhs(a + 1);
    rhs.head(a) = 2.0 * (sub.transpose() * x1);
    rhs[a] = 1.0;
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    return Eigen::VectorXd(sol.head(a));
  };

  for (int round = 0; round < kMaxRounds; ++round) {
    Eigen::VectorXd residual = x1 - x0 * w;                     // K
    Eigen::VectorXd grad = -2.0 * (x0.transpose() * residual);  // N

    // Frank-Wolfe vertex and duality gap: gap = grad.w - min_j grad_j.
    // Strict comparison keeps the lowest index on ties.
    Eigen::Index best = 0;
    double best_val = grad[0];
    for (Eigen::Index j = 1; j < n; ++j) {
      if (grad[j] < best_val) {
        best_val = grad[j];
        best = j;
      }
    }
    double gap = grad.dot(w) - best_val;
    if (gap <= kGapTol) break;

    if (std::find(active.begin(), active.end(), best) == active.end()) {
      active.push_back(best);
      std::sort(active.begin(), active.end());
    }

    // Fully corrective step (Wolfe's minor cycle): reoptimize over the
    // affine hull of the active vertices; while the solution leaves the
    // simplex, move as far toward it as feasibility allows and drop the
    // vertex whose weight hits zero.
    for (;;) {
      Eigen::VectorXd u = solve_restricted(active);
      if (u.minCoeff() >= -1e-12) {
        w.setZero();
        double total = 0.0;
        for (std::size_t j = 0; j < active.size(); ++j) {
          double val = std::max(0.0, u[static_cast<Eigen::Index>(j)]);
          w[active[j]] = val;
          total += val;
        }
        w /= total;
        break;
      }
      double theta = 1.0;
      std::size_t drop = active.size();
      for (std::size_t j = 0; j < active.size(); ++j) {
        double wj = w[active[j]];
        double uj = u[static_cast<Eigen::Index>(j)];
        if (uj < wj) {
          double step_limit = wj / (wj - uj);
          if (step_limit < theta) {
            theta = step_limit;
            drop = j;
          }
        }
      }
      if (drop == active.size()) break;  // numerically stuck; keep w
      for (std::size_t j = 0; j < active.size(); ++j) {
        double wj = w[active[j]];
        double uj = u[static_cast<Eigen::Index>(j)];
        w[active[j]] = wj + theta * (uj - wj);
      }
      w[active[drop]] = 0.0;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      if (active.size() == 1) {
        w.setZero();
        w[active[0]] = 1.0;
        break;
      }
    }
  }

  return w;
}

Eigen::VectorXd scm_weights(const Panel& panel) {
  Eigen::MatrixXd x = training_characteristics(panel);
  return scm_weights(x, Eigen::VectorXd::Ones(x.rows()));
}

TreatmentEstimates scm_estimates(const Panel& panel, const Eigen::VectorXd& w) {
  const IfeConfig& cfg = panel.config;
  if (w.size() != cfg.n_controls) throw ConfigError("weights must have N entries");
  const auto& y = panel.outcomes;

  TreatmentEstimates est;
  est.blank.reserve(cfg.t_blank);
  for (int t = 0; t < cfg.t_blank; ++t) {
    est.blank.push_back(y(0, t) - y.col(t).tail(cfg.n_controls).dot(w));
  }
  est.post.reserve(cfg.t_total - cfg.t0);
  for (int t = cfg.t0; t < cfg.t_total; ++t) {
    est.post.push_back(y(0, t) - y.col(t).tail(cfg.n_controls).dot(w));
  }
  return est;
}

TreatmentEstimates block_aggregate(const TreatmentEstimates& estimates,
                                   int block) {
  if (block < 1) throw ConfigError("block size must be >= 1");
  if (block == 1) return estimates;
  if (estimates.blank.size() % block != 0) {
    throw ConfigError("blank count must be divisible by the block size");
  }
  TreatmentEstimates out;
  auto mean_of = [&](const std::vector<double>& xs, std::size_t begin) {
    double acc = 0.0;
    for (int j = 0; j < block; ++j) acc += xs[begin + j];
    return acc / block;
  };
  for (std::size_t i = 0; i + block <= estimates.blank.size(); i += block) {
    out.blank.push_back(mean_of(estimates.blank, i));
  }
  for (std::size_t i = 0; i + block <= estimates.post.size(); i += block) {
    out.post.push_back(mean_of(estimates.post, i));
  }
  return out;
}

void write_panel_csv(const Panel& panel, std::ostream& out) {
  out << "unit,t,y,treated\n";
  const IfeConfig& cfg = panel.config;
  for (Eigen::Index i = 0; i < panel.outcomes.rows(); ++i) {
    for (Eigen::Index t = 0; t < panel.outcomes.cols(); ++t) {
      int treated = (i == 0 && t >= cfg.t0) ? 1 : 0;
      out << (i + 1) << ',' << (t + 1) << ',' << format_double(panel.outcomes(i, t))
          << ',' << treated << '\n';
    }
  }
}

Panel read_panel_csv(std::istream& in, int t_blank) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty panel file");
  std::map<std::pair<int, int>, double> cells;
  int max_unit = 0;
  int max_t = 0;
  int t0 = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string unit_s, t_s, y_s, treated_s;
    if (!std::getline(row, unit_s, ',') || !std::getline(row, t_s, ',') ||
        !std::getline(row, y_s, ',') || !std::getline(row, treated_s)) {
      throw DataError("malformed panel row: " + line);
    }
    int unit = std::stoi(unit_s);
    int t = std::stoi(t_s);
    double y = std::stod(y_s);
    int treated = std::stoi(treated_s);
    if (!std::isfinite(y)) throw DataError("non-finite outcome in panel row: " + line);
    cells[{unit, t}] = y;
    max_unit = std::max(max_unit, unit);
    max_t = std::max(max_t, t);
    if (unit == 1 && treated == 1) {
      t0 = (t0 == 0) ? t - 1 : std::min(t0, t - 1);
    }
  }
  if (max_unit < 2 || max_t < 2) throw DataError("panel needs >= 2 units and periods");
  if (t0 == 0) t0 = max_t - 1;  // no treated rows: treat the last period as post
  Panel panel;
  panel.outcomes.resize(max_unit, max_t);
  for (int i = 1; i <= max_unit; ++i) {
    for (int t = 1; t <= max_t; ++t) {
      auto it = cells.find({i, t});
      if (it == cells.end()) throw DataError("panel is missing a (unit,t) cell");
      panel.outcomes(i - 1, t - 1) = it->second;
    }
  }
  panel.config.n_controls = max_unit - 1;
  panel.config.t_total = max_t;
  panel.config.t0 = t0;
  panel.config.t_blank = t_blank;
  panel.config.validate();
  return panel;
}

void write_estimates_csv(const TreatmentEstimates& estimates, int t0,
                         std::ostream& out) {
  out << "t,tau_hat,phase\n";
  for (std::size_t i = 0; i < estimates.blank.size(); ++i) {
    out << (i + 1) << ',' << format_double(estimates.blank[i]) << ",blank\n";
  }
  for (std::size_t i = 0; i < estimates.post.size(); ++i) {
    out << (t0 + 1 + i) << ',' << format_double(estimates.post[i]) << ",post\n";
  }
}

TreatmentEstimates read_estimates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty estimates file");
  TreatmentEstimates est;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_s, tau_s, phase;
    if (!std::getline(row, t_s, ',') || !std::getline(row, tau_s, ',') ||
        !std::getline(row, phase)) {
      throw DataError("malformed estimates row: " + line);
    }
    double tau = std::stod(tau_s);
    if (!std::isfinite(tau)) throw DataError("non-finite estimate: " + line);
    if (phase == "blank") {
      est.blank.push_back(tau);
    } else if (phase == "post") {
      est.post.push_back(tau);
    } else if (phase != "train") {
      throw DataError("unknown phase in estimates row: " + line);
    }
  }
  return est;
}

}  // namespace avrank
