#include "sensurv/nuisance.hpp"

#include <cmath>

namespace sensurv {

namespace {

struct Subset {
  Eigen::MatrixXd x;
  Eigen::VectorXd time;
  std::vector<int> event;
  int n_events = 0;
};

Subset make_subset(const Dataset& d, const std::vector<int>& rows, int arm,
                   bool censoring_role, double tau_dagger, bool intercept_only) {
  std::vector<int> keep;
  for (int i : rows)
    if (d.treatment[i] == arm) keep.push_back(i);
  Subset s;
  const int p = intercept_only ? 0 : d.p();
  s.x.resize(static_cast<int>(keep.size()), p);
  s.time.resize(static_cast<int>(keep.size()));
  s.event.resize(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    int i = keep[r];
    if (p > 0) s.x.row(static_cast<int>(r)) = d.x.row(i);
    s.time[static_cast<int>(r)] = d.time[i];
    int ev;
    if (censoring_role) {
      // loss to follow-up, not administrative truncation at tau_dagger
      ev = (d.event[i] == 0 && d.time[i] < tau_dagger) ? 1 : 0;
    } else {
      ev = d.event[i];
    }
    s.event[r] = ev;
    s.n_events += ev;
  }
  return s;
}

CoxFit null_cox_fit(double tau_dagger, int grid_size) {
  CoxFit fit;
  fit.coefficients = Eigen::VectorXd();
  fit.smoothed = smooth_hazard({}, tau_dagger / grid_size, tau_dagger, grid_size);
  return fit;
}

}  // namespace

CoxGamBundle::CoxGamBundle(const Dataset& data, const std::vector<int>& train_idx,
                           const NuisanceOptions& opts) {
  for (int arm = 0; arm < 2; ++arm) {
    Subset f = make_subset(data, train_idx, arm, false, opts.tau_dagger, false);
    if (f.n_events == 0) {
      throw numeric_error("FoldWithoutEvents",
                          "training sample has no failure events in arm " +
                              std::to_string(arm));
    }
    failure_[arm] = fit_cox(f.x, f.time, f.event, opts.tau_dagger,
                            opts.grid_size, opts.bandwidth, opts.cox);

    bool intercept_only = opts.censoring_design == CensoringDesign::InterceptOnly;
    Subset c = make_subset(data, train_idx, arm, true, opts.tau_dagger,
                           intercept_only);
    if (c.n_events == 0) {
      censoring_null_[arm] = true;
      censoring_[arm] = null_cox_fit(opts.tau_dagger, opts.grid_size);
    } else {
      censoring_[arm] = fit_cox(c.x, c.time, c.event, opts.tau_dagger,
                                opts.grid_size, opts.bandwidth, opts.cox);
    }
  }

  if (opts.propensity_model == PropensityModel::Gam) {
    Eigen::MatrixXd x(static_cast<int>(train_idx.size()), data.p());
    std::vector<int> t(train_idx.size());
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
      x.row(static_cast<int>(r)) = data.x.row(train_idx[r]);
      t[r] = data.treatment[train_idx[r]];
    }
    prop_ = fit_propensity(x, data.info, t, opts.propensity);
    has_gam_ = true;
  } else {
    prop_const_ = opts.propensity_constant;
  }
}

double CoxGamBundle::failure_cdf(int arm, double u,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return failure_[arm].predict_cdf(u, x);
}

double CoxGamBundle::censoring_surv(
    int arm, double u, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (censoring_null_[arm]) return 1.0;
  return censoring_[arm].predict_surv(u, x);
}

double CoxGamBundle::censoring_hazard(
    int arm, double u, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (censoring_null_[arm]) return 0.0;
  return censoring_[arm].hazard(u, x);
}

double CoxGamBundle::propensity1(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return has_gam_ ? prop_.predict1(x) : prop_const_;
}

NuisanceFactory cox_gam_factory() {
  return [](const Dataset& d, const std::vector<int>& idx,
            const NuisanceOptions& o) -> std::shared_ptr<const NuisanceBundle> {
    return std::make_shared<CoxGamBundle>(d, idx, o);
  };
}

}  // namespace sensurv
