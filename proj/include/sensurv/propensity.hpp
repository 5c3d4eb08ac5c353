#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sensurv/common.hpp"
#include "sensurv/design.hpp"

namespace sensurv {

struct PropensityOptions {
  int max_sweeps = 100;
  double tol = 1e-6;      // max change of any component between sweeps
  double eps = 0.01;      // prediction clipping floor
  int smooth_knots = 5;   // knots for smooths expanded from identity columns
  double ridge = 1e-10;   // stabilizer for the per-block WLS solves
};

// Additive logistic model logit pi_1(x) = alpha + sum_j f_j(x). Component
// blocks follow the design groups: indicator and spline blocks enter
// linearly (a spline block is already a smooth of its covariate); identity
// continuous columns are expanded into a natural cubic spline smooth.
struct GamComponent {
  std::string name;
  std::vector<int> src_cols;   // design columns feeding this block
  std::vector<double> knots;   // nonempty when the block expands src_cols[0]
  Eigen::VectorXd coef;        // applies to the expanded block columns
};

struct PropensityFit {
  double intercept = 0.0;
  std::vector<GamComponent> components;
  int sweeps = 0;
  double final_change = 0.0;
  bool converged = false;
  double eps = 0.01;
  std::vector<double> loglik_trace;  // log-likelihood after each sweep

  // pi_hat_1(x), clipped to [eps, 1-eps]
  double predict1(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // pi_hat_t(x); predict(x,1) + predict(x,0) == 1 exactly
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x, int arm) const;
};

PropensityFit fit_propensity(const Eigen::MatrixXd& x, const DesignInfo& info,
                             const std::vector<int>& treatment,
                             const PropensityOptions& opts = {});

}  // namespace sensurv
