#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "sensurv/data.hpp"
#include "sensurv/nuisance.hpp"
#include "sensurv/pava.hpp"

namespace sensurv {

// Exponential tilt: F e^gamma / (1 - F + F e^gamma). Fixed points at
// F in {0,1} and gamma = 0; strictly increasing in gamma inside (0,1).
inline double tilt_cdf(double f, double gamma) {
  if (f <= 0.0) return 0.0;
  if (f >= 1.0) return 1.0;
  double w = f * std::exp(gamma);
  return w / (1.0 - f + w);
}

// Treatment-selection odds ratio of a 2x2 joint of (T, Y(t)<=s):
//   (P[T=1-t, Y<=s] / P[T=t, Y<=s]) / (P[T=1-t, Y>s] / P[T=t, Y>s]).
double bayes_odds_ratio(double p_other_le, double p_t_le, double p_other_gt,
                        double p_t_gt);

// Plug-in marginal CDF: average over rows of
// F_t(s|x) pi_t(x) + tilt(F_t(s|x), gamma) pi_{1-t}(x).
double psi_plugin(const NuisanceBundle& b, const Eigen::MatrixXd& rows, int arm,
                  double s, double gamma, double eps_pi = 0.01);

struct EstimateOptions {
  double tau = 130.0;
  double tau_dagger = 150.0;
  int folds = 5;  // 1 = fit and evaluate on the full sample (diagnostic)
  double bandwidth = 0.0;
  double trunc_percentile = 0.995;
  int grid_size = 200;
  std::uint64_t seed = 0;
  double eps_pi = 0.01;
  CensoringDesign censoring_design = CensoringDesign::Full;
  PropensityModel propensity_model = PropensityModel::Gam;
  double propensity_constant = 0.5;
  int workers = 1;

  NuisanceOptions nuisance() const {
    NuisanceOptions n;
    n.tau_dagger = tau_dagger;
    n.grid_size = grid_size;
    n.bandwidth = bandwidth;
    n.censoring_design = censoring_design;
    n.propensity_model = propensity_model;
    n.propensity_constant = propensity_constant;
    n.propensity.eps = eps_pi;
    return n;
  }
  static EstimateOptions from_config(const StudyConfig& c) {
    EstimateOptions o;
    o.tau = c.tau;
    o.tau_dagger = c.tau_dagger;
    o.folds = c.folds;
    o.bandwidth = c.bandwidth;
    o.trunc_percentile = c.trunc_percentile;
    o.grid_size = c.grid_size;
    o.seed = c.seed;
    return o;
  }
};

struct Cell {
  int arm = 1;
  double s = 0.0;
  double gamma = 0.0;
};

struct TruncationReport {
  long long n_truncated = 0;         // weight evaluations clipped in this cell
  long long degenerate_survival = 0; // l_t1 denominators below 1e-12
  double cutoff_inv_pi = std::numeric_limits<double>::infinity();
  double cutoff_inv_g_y[2] = {std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()};
  double cutoff_inv_g_s[2] = {std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()};
};

struct PsiEstimate {
  int arm = 1;
  double s = 0.0;
  double gamma = 0.0;
  double psi = 0.0;         // clipped to [0,1]
  double psi_preclip = 0.0;
  double sigma = 0.0;       // influence-based SD of psi_hat
  double sigma_boot = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool clipped = false;
  bool degenerate_ci = false;
  double sum_g = 0.0;
  double sum_h = 0.0;
  TruncationReport trunc;
};

struct InfluenceRows {
  std::vector<double> g, h;
};

// Logit-transformed 95% Wald interval, degenerate at the boundary.
std::pair<double, double> logit_wald_ci(double psi, double sigma,
                                        bool* degenerate = nullptr);

// Family-wise inverse-weight truncation cutoffs (infinite = no truncation).
struct WeightCutoffs {
  double inv_pi[2] = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
  double inv_g_y[2] = {std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  double inv_g_s[2] = {std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  std::vector<double> inv_g_grid[2];  // per midpoint, empty = no truncation
};

// Midpoint grid U covering (0, tau_dagger).
struct IFGrid {
  double tau_dagger = 150.0;
  int m = 200;
  double du() const { return tau_dagger / m; }
  double midpoint(int j) const { return (j + 0.5) * du(); }
};

struct PhiParts {
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;
  double total() const { return phi1 + phi2 + phi3; }
};

// Uncensored-data influence terms for one subject at (arm, s, gamma);
// y is the (possibly counterfactual) failure time entering I(Y<=s).
PhiParts phi_uncensored(const Eigen::Ref<const Eigen::VectorXd>& x, int treat,
                        double y, const NuisanceBundle& b, int arm, double s,
                        double gamma, double eps_pi = 0.01);

// l_t(u) = l_t1 + l_t2 + l_t3 evaluated at u for one subject.
double l_terms(double u, const Eigen::Ref<const Eigen::VectorXd>& x, int treat,
               const NuisanceBundle& b, int arm, double s, double gamma,
               double eps_pi = 0.01, long long* degenerate_count = nullptr);

struct IFRow {
  double g = 0.0;
  double h = 0.0;
};

// Observed-data influence pieces for one subject; grid integrals use the
// midpoint rule over u in U with u <= ytilde, I(u<s) strict.
IFRow if_row(const Eigen::Ref<const Eigen::VectorXd>& x, int treat,
             double ytilde, int delta, const NuisanceBundle& b,
             const IFGrid& grid, int arm, double s, double gamma,
             double eps_pi = 0.01, const WeightCutoffs* cuts = nullptr,
             TruncationReport* report = nullptr);

// Cross-fitted split-sample estimator: fits a nuisance bundle per fold
// complement, computes per-subject influence rows on the held-out fold,
// pools psi_hat = sum g / sum h (Eq.-10/11 form) with the ratio variance.
// Immutable after construction; estimate() is const and thread-safe.
class SplitSampleEstimator {
 public:
  SplitSampleEstimator(Dataset data, const EstimateOptions& opts,
                       NuisanceFactory factory = cox_gam_factory());

  std::vector<PsiEstimate> estimate(const std::vector<Cell>& cells,
                                    std::vector<InfluenceRows>* rows = nullptr) const;

  const FoldAssignment& folds() const { return folds_; }
  const Dataset& data() const { return data_; }
  const EstimateOptions& options() const { return opts_; }
  const NuisanceBundle& bundle(int fold_1based) const {
    return *bundles_[fold_1based - 1];
  }

 private:
  Dataset data_;
  EstimateOptions opts_;
  FoldAssignment folds_;
  std::vector<std::shared_ptr<const NuisanceBundle>> bundles_;

  // per-subject caches, filled at construction
  struct Cache;
  std::shared_ptr<const Cache> cache_;
};

// One-shot helper over a cell grid.
std::vector<PsiEstimate> estimate_psi(const std::vector<SurvivalRecord>& records,
                                      const DesignInfo& info,
                                      const EstimateOptions& opts,
                                      const std::vector<Cell>& cells);

// Survival of Y(t) among the opposite arm implied by psi_hat:
// (P[Y(t)>s] - P[Y(t)>s|T=t] P[T=t]) / P[T=1-t], clipped to [0,1].
double induced_counterfactual_surv(double psi_hat, double surv_given_arm,
                                   double arm_frequency, bool* clipped = nullptr);

}  // namespace sensurv
