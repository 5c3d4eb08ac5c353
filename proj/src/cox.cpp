#include "sensurv/cox.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace sensurv {

namespace {

// Integral of the Epanechnikov kernel K(v) = 0.75(1-v^2) over [-1, z].
double epan_mass(double z) {
  if (z <= -1.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return 0.75 * (z - z * z * z / 3.0) + 0.5;
}

// Indices sorted by time ascending; ties keep subject order.
std::vector<int> order_by_time(const Eigen::VectorXd& time) {
  std::vector<int> idx(time.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return time[a] < time[b]; });
  return idx;
}

}  // namespace

double SmoothedHazard::hazard_at(double u) const {
  if (bandwidth <= 0.0) return 0.0;
  double raw = 0.0;
  for (const BreslowStep& s : steps) {
    double v = (u - s.time) / bandwidth;
    if (v > -1.0 && v < 1.0) raw += 0.75 * (1.0 - v * v) / bandwidth * s.increment;
  }
  // Renormalize by the kernel mass that falls inside (0, t_max).
  double mass = epan_mass((t_max - u) / bandwidth) - epan_mass((0.0 - u) / bandwidth);
  if (mass <= 1e-12) return 0.0;
  return raw / mass;
}

double SmoothedHazard::cumulative(double u) const {
  const int m = static_cast<int>(values.size());
  if (m == 0 || u <= 0.0) return 0.0;
  const double du = t_max / m;
  if (u >= t_max) return cum.back();
  int cell = static_cast<int>(u / du);  // cell covering [cell*du, (cell+1)*du)
  if (cell >= m) cell = m - 1;
  double left_edge = cell * du;
  double base = cell == 0 ? 0.0 : cum[cell - 1];
  return base + values[cell] * (u - left_edge);
}

SmoothedHazard smooth_hazard(const std::vector<BreslowStep>& steps,
                             double bandwidth, double t_max, int grid_size) {
  if (!(bandwidth > 0.0))
    throw numeric_error("NonpositiveBandwidth", "bandwidth must be positive");
  SmoothedHazard sh;
  sh.bandwidth = bandwidth;
  sh.t_max = t_max;
  sh.steps = steps;
  sh.grid.resize(grid_size);
  sh.values.resize(grid_size);
  sh.cum.resize(grid_size);
  const double du = t_max / grid_size;
  double acc = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    sh.grid[j] = (j + 0.5) * du;
    sh.values[j] = sh.hazard_at(sh.grid[j]);
    acc += sh.values[j] * du;
    sh.cum[j] = acc;
  }
  return sh;
}

CoxDerivatives cox_derivatives(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& time,
                               const std::vector<int>& event,
                               const Eigen::VectorXd& beta, bool with_info) {
  const int n = static_cast<int>(time.size());
  const int p = static_cast<int>(x.cols());
  CoxDerivatives d;
  d.score = Eigen::VectorXd::Zero(p);
  d.info = Eigen::MatrixXd::Zero(p, p);

  std::vector<int> idx = order_by_time(time);
  Eigen::VectorXd elp(n);
  for (int i = 0; i < n; ++i) {
    double lp = p == 0 ? 0.0 : beta.dot(x.row(i));
    elp[i] = std::exp(std::min(lp, 500.0));
  }

  // Walk from the largest time down, maintaining risk-set sums
  // S0 = sum e^lp, S1 = sum x e^lp, S2 = sum x x' e^lp.
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  int i = n - 1;
  while (i >= 0) {
    double t = time[idx[i]];
    int j = i;
    while (j >= 0 && time[idx[j]] == t) {
      int r = idx[j];
      s0 += elp[r];
      if (p > 0) {
        s1.noalias() += elp[r] * x.row(r).transpose();
        if (with_info)
          s2.noalias() += elp[r] * x.row(r).transpose() * x.row(r);
      }
      --j;
    }
    // Breslow: every event at t shares the same risk-set denominator.
    for (int q = i; q > j; --q) {
      int r = idx[q];
      if (event[r] != 1) continue;
      double lp = p == 0 ? 0.0 : beta.dot(x.row(r));
      d.loglik += lp - std::log(s0);
      if (p > 0) {
        Eigen::VectorXd xbar = s1 / s0;
        d.score.noalias() += x.row(r).transpose() - xbar;
        if (with_info) d.info.noalias() += s2 / s0 - xbar * xbar.transpose();
      }
    }
    i = j;
  }
  return d;
}

CoxFit fit_cox(const Eigen::MatrixXd& x, const Eigen::VectorXd& time,
               const std::vector<int>& event, double t_max, int grid_size,
               double bandwidth, const CoxOptions& opts) {
  const int n = static_cast<int>(time.size());
  const int p = static_cast<int>(x.cols());
  int n_events = 0;
  for (int e : event) n_events += e;
  if (n_events == 0)
    throw numeric_error("NoEvents", "no events of the requested role in subset");

  CoxFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(p);

  if (p > 0) {
    // Center columns for conditioning; the partial likelihood is shift
    // invariant so the coefficients are unchanged.
    Eigen::MatrixXd xc = x;
    Eigen::RowVectorXd mean = x.colwise().mean();
    xc.rowwise() -= mean;
    for (int j = 0; j < p; ++j) {
      if (xc.col(j).squaredNorm() < 1e-24)
        throw numeric_error("RankDeficientDesign",
                            "constant design column " + std::to_string(j) +
                                " in Cox fit");
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    CoxDerivatives cur = cox_derivatives(xc, time, event, beta, true);
    bool done = false;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
      fit.gradient_norm = cur.score.cwiseAbs().maxCoeff() / n;
      if (fit.gradient_norm <= opts.tol) {
        done = true;
        break;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(cur.info);
      double dmax = ldlt.vectorD().maxCoeff();
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
          ldlt.vectorD().minCoeff() <= 1e-12 * dmax) {
        throw numeric_error("RankDeficientDesign",
                            "observed information is singular in Cox fit");
      }
      Eigen::VectorXd dir = ldlt.solve(cur.score);
      double step = 1.0;
      CoxDerivatives next;
      for (int h = 0; h < 30; ++h) {
        next = cox_derivatives(xc, time, event, beta + step * dir, true);
        if (next.loglik >= cur.loglik - 1e-12) break;
        step *= 0.5;
      }
      beta += step * dir;
      cur = std::move(next);
    }
    fit.iterations = it;
    fit.converged = done;
    if (!done) {
      fit.gradient_norm = cur.score.cwiseAbs().maxCoeff() / n;
      throw numeric_error("Nonconvergence",
                          "Cox fit did not converge in " +
                              std::to_string(opts.max_iter) + " iterations");
    }
    fit.coefficients = beta;
  }

  // Breslow increments d_u / sum_{risk set} e^{lp}, uncentered predictors so
  // the baseline refers to x = 0.
  Eigen::VectorXd elp(n);
  for (int i = 0; i < n; ++i) {
    double lp = p == 0 ? 0.0 : fit.coefficients.dot(x.row(i));
    elp[i] = std::exp(std::min(lp, 500.0));
  }
  std::vector<int> idx = order_by_time(time);
  double at_risk = elp.sum();
  std::size_t i = 0;
  while (i < idx.size()) {
    double t = time[idx[i]];
    int d = 0;
    double removed = 0.0;
    std::size_t j = i;
    while (j < idx.size() && time[idx[j]] == t) {
      d += event[idx[j]];
      removed += elp[idx[j]];
      ++j;
    }
    if (d > 0) fit.baseline_steps.push_back({t, d / at_risk});
    at_risk -= removed;
    i = j;
  }

  double b = bandwidth;
  if (b <= 0.0) {
    double mean_t = time.mean();
    double sd = std::sqrt((time.array() - mean_t).square().sum() /
                          std::max(1, n - 1));
    b = sd * std::pow(static_cast<double>(n), -0.2);
    if (b <= 0.0) b = t_max / grid_size;
  }
  fit.smoothed = smooth_hazard(fit.baseline_steps, b, t_max, grid_size);
  return fit;
}

double CoxFit::predict_cdf(double u,
                           const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (u < 0.0 || u > smoothed.t_max)
    throw numeric_error("TimeOutOfRange", "prediction time outside [0, tau_dagger]");
  double h = smoothed.cumulative(u) * std::exp(std::min(linear_predictor(x), 500.0));
  return 1.0 - std::exp(-h);
}

double CoxFit::predict_surv(double u,
                            const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (u < 0.0 || u > smoothed.t_max)
    throw numeric_error("TimeOutOfRange", "prediction time outside [0, tau_dagger]");
  double h = smoothed.cumulative(u) * std::exp(std::min(linear_predictor(x), 500.0));
  return std::exp(-h);
}

double CoxFit::hazard(double u,
                      const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return smoothed.hazard_at(u) * std::exp(std::min(linear_predictor(x), 500.0));
}

}  // namespace sensurv
