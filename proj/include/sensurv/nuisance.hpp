#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "sensurv/cox.hpp"
#include "sensurv/data.hpp"
#include "sensurv/propensity.hpp"

namespace sensurv {

// Conditional nuisance functions the influence function consumes. The
// default implementation wraps cross-fitted Cox and GAM fits; simulations
// and tests can substitute exact or saturated versions.
class NuisanceBundle {
 public:
  virtual ~NuisanceBundle() = default;
  // F_t(u|x): conditional failure CDF under arm t
  virtual double failure_cdf(int arm, double u,
                             const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  // G_t(u|x): conditional censoring survival
  virtual double censoring_surv(int arm, double u,
                                const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  // conditional censoring hazard at u
  virtual double censoring_hazard(int arm, double u,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  // pi_1(x), unclipped
  virtual double propensity1(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
};

enum class CensoringDesign { Full, InterceptOnly };
enum class PropensityModel { Gam, Constant };

struct NuisanceOptions {
  double tau_dagger = 150.0;
  int grid_size = 200;
  double bandwidth = 0.0;  // <= 0: sd(time) * n^(-1/5) per model fit
  CensoringDesign censoring_design = CensoringDesign::Full;
  PropensityModel propensity_model = PropensityModel::Gam;
  double propensity_constant = 0.5;
  PropensityOptions propensity;
  CoxOptions cox;
};

// Treatment-specific Cox models for failure and censoring plus the additive
// logistic propensity model, all fitted on the rows listed in train_idx.
// Follow-up equal to tau_dagger with event = 0 is administrative truncation:
// such rows are at risk throughout the censoring model, not censoring events.
class CoxGamBundle : public NuisanceBundle {
 public:
  CoxGamBundle(const Dataset& data, const std::vector<int>& train_idx,
               const NuisanceOptions& opts);

  double failure_cdf(int arm, double u,
                     const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  double censoring_surv(int arm, double u,
                        const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  double censoring_hazard(int arm, double u,
                          const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  double propensity1(const Eigen::Ref<const Eigen::VectorXd>& x) const override;

  const CoxFit& failure_fit(int arm) const { return failure_[arm]; }
  bool censoring_is_null(int arm) const { return censoring_null_[arm]; }
  const CoxFit& censoring_fit(int arm) const { return censoring_[arm]; }
  const PropensityFit* propensity_fit() const {
    return has_gam_ ? &prop_ : nullptr;
  }

 private:
  CoxFit failure_[2];
  CoxFit censoring_[2];
  bool censoring_null_[2] = {false, false};
  PropensityFit prop_;
  bool has_gam_ = false;
  double prop_const_ = 0.5;
};

using NuisanceFactory = std::function<std::shared_ptr<const NuisanceBundle>(
    const Dataset&, const std::vector<int>&, const NuisanceOptions&)>;

NuisanceFactory cox_gam_factory();

}  // namespace sensurv
