#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace avrank {

// Interactive fixed-effects panel: unit 1 is treated after t0, units
// 2..N+1 are never treated. Factors and noise follow stationary VAR(1)
// processes whose innovations are scaled so every component has unit
// marginal variance (times sigma^2 for the noise).
struct IfeConfig {
  int n_controls = 1;   // N
  int t_total = 2;      // T
  int t0 = 1;           // last pre-treatment period
  int t_blank = 1;      // blank periods 1..t_blank; training is t_blank+1..t0
  int r_factors = 0;    // r
  int n_covariates = 0; // l
  double rho_lambda = 0.0;
  double rho_eps = 0.0;
  double sigma = 1.0;
  // Factor loadings, (N+1) x r. Left empty, they are drawn i.i.d. standard
  // normal from the seed stream.
  Eigen::MatrixXd loadings;
  // Covariates Z_i, (N+1) x l; drawn i.i.d. standard normal when empty and
  // l > 0. The time-varying coefficients theta_t are i.i.d. standard normal
  // (exchangeable over time).
  Eigen::MatrixXd covariates;
  // Treatment effect path tau_t for t = t0+1..T (size T - t0). Empty means
  // no effect.
  std::vector<double> treatment;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Panel {
  Eigen::MatrixXd outcomes;  // (N+1) x T, row 0 treated
  IfeConfig config;
};

Panel simulate_ife(const IfeConfig& cfg);

// Treatment estimates on the blank and post-treatment periods.
struct TreatmentEstimates {
  std::vector<double> blank;  // t = 1..t_blank
  std::vector<double> post;   // t = t0+1..T
};

// Difference-in-differences: treated outcome net of the control mean,
// centered by the training-period means of both.
TreatmentEstimates did_estimates(const Panel& panel);

// Characteristics used by the synthetic control weights when none are
// supplied: the training-period outcomes of every unit, K = |E| rows by
// N+1 columns (column 0 is the treated unit).
Eigen::MatrixXd training_characteristics(const Panel& panel);

// Synthetic control weights: the simplex point minimizing
// (X1 - X0 w)' V (X1 - X0 w), V = diag(v_diag). Solved by Frank-Wolfe with
// full reoptimization over the active vertex set each round (exact solves
// of the restricted quadratic), stopping at duality gap 1e-8. Vertex ties
// break toward the lowest index, so the output is deterministic.
Eigen::VectorXd scm_weights(const Eigen::MatrixXd& characteristics,
                            const Eigen::VectorXd& v_diag);
Eigen::VectorXd scm_weights(const Panel& panel);

TreatmentEstimates scm_estimates(const Panel& panel, const Eigen::VectorXd& w);

// Means of consecutive blocks of size block; blanks and post periods are
// blocked separately. The blank count must divide evenly; trailing partial
// post blocks are dropped.
TreatmentEstimates block_aggregate(const TreatmentEstimates& estimates,
                                   int block);

// CSV interchange. Panels use the header `unit,t,y,treated`; estimates use
// `t,tau_hat,phase` with phase one of blank, train, post.
void write_panel_csv(const Panel& panel, std::ostream& out);
Panel read_panel_csv(std::istream& in, int t_blank);
void write_estimates_csv(const TreatmentEstimates& estimates, int t0,
                         std::ostream& out);
TreatmentEstimates read_estimates_csv(std::istream& in);

}  // namespace avrank
