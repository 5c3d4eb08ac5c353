#pragma once

#include <Eigen/Core>
#include <vector>

#include "sensurv/common.hpp"

namespace sensurv {

struct BreslowStep {
  double time = 0.0;
  double increment = 0.0;  // jump of the baseline cumulative hazard
};

// Kernel-smoothed baseline hazard on M equally spaced midpoints over
// (0, t_max), Epanechnikov kernel, mass-renormalized near 0 and t_max.
// cumulative() integrates the midpoint representation (piecewise constant
// hazard per cell), so hazard values and cumulative hazards are mutually
// consistent for downstream influence-function sums.
struct SmoothedHazard {
  double bandwidth = 0.0;
  double t_max = 0.0;
  std::vector<BreslowStep> steps;
  std::vector<double> grid;    // midpoints u_j = (j-0.5) * t_max / M
  std::vector<double> values;  // smoothed hazard at midpoints
  std::vector<double> cum;     // cumulative at cell right edges

  double hazard_at(double u) const;   // exact kernel evaluation
  double cumulative(double u) const;  // piecewise-linear, constant past t_max
};

SmoothedHazard smooth_hazard(const std::vector<BreslowStep>& steps,
                             double bandwidth, double t_max, int grid_size);

struct CoxOptions {
  int max_iter = 25;
  double tol = 1e-8;  // on max|score|/n
};

struct CoxFit {
  Eigen::VectorXd coefficients;
  std::vector<BreslowStep> baseline_steps;
  SmoothedHazard smoothed;
  int iterations = 0;
  double gradient_norm = 0.0;  // scaled by n
  bool converged = true;

  double linear_predictor(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return coefficients.size() == 0 ? 0.0 : coefficients.dot(x);
  }
  // F(u|x) = 1 - exp(-H(u) e^{coef'x}) for failure fits
  double predict_cdf(double u, const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // G(u|x) = exp(-H(u) e^{coef'x}) for censoring fits
  double predict_surv(double u, const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // conditional hazard at u
  double hazard(double u, const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Breslow-ties partial likelihood, Newton iterations with step-halving.
// Rows are the caller's subset (one treatment arm); event[i] = 1 marks the
// outcome role being modeled (failure or censoring).
// bandwidth <= 0 selects sd(time) * n^(-1/5).
CoxFit fit_cox(const Eigen::MatrixXd& x, const Eigen::VectorXd& time,
               const std::vector<int>& event, double t_max, int grid_size,
               double bandwidth = 0.0, const CoxOptions& opts = {});

// The Breslow cumulative-baseline-hazard steps of a fit.
inline const std::vector<BreslowStep>& breslow_cumhaz(const CoxFit& fit) {
  return fit.baseline_steps;
}

// Breslow partial log-likelihood, score and information at beta.
// Exposed for the fitting loop and for model audits.
struct CoxDerivatives {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;  // negative Hessian
};
CoxDerivatives cox_derivatives(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& time,
                               const std::vector<int>& event,
                               const Eigen::VectorXd& beta,
                               bool with_info = true);

}  // namespace sensurv
