#include "sensurv/propensity.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace sensurv {

namespace {

double expit(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double bernoulli_loglik(const std::vector<int>& y, const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (int i = 0; i < eta.size(); ++i) {
    double p = std::min(1.0 - 1e-12, std::max(1e-12, expit(eta[i])));
    ll += y[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return ll;
}

struct Block {
  GamComponent comp;
  Eigen::MatrixXd design;  // n x block columns
};

// Expanded per-component designs. Identity continuous columns become natural
// cubic spline smooths; blocks whose knots collapse stay linear.
std::vector<Block> build_blocks(const Eigen::MatrixXd& x, const DesignInfo& info,
                                int smooth_knots) {
  std::vector<Block> blocks;
  for (const EncodedGroup& g : info.groups) {
    Block b;
    b.comp.name = g.name;
    for (int c = 0; c < g.n_cols; ++c) b.comp.src_cols.push_back(g.first_col + c);
    if (g.encoding == Encoding::Identity) {
      Eigen::VectorXd col = x.col(g.first_col);
      std::vector<double> sorted(col.begin(), col.end());
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> knots;
      for (int j = 0; j < smooth_knots; ++j) {
        double p = 0.05 + 0.90 * static_cast<double>(j) / (smooth_knots - 1);
        double kv = quantile_sorted(sorted, p);
        if (knots.empty() || kv - knots.back() > 1e-9 * std::max(1.0, std::abs(kv)))
          knots.push_back(kv);
      }
      if (knots.size() >= 3) {
        b.comp.knots = knots;
        b.design.resize(x.rows(), static_cast<int>(knots.size()) - 1);
        for (int i = 0; i < x.rows(); ++i) {
          std::vector<double> bs = spline_basis(col[i], knots);
          for (std::size_t c = 0; c < bs.size(); ++c) b.design(i, c) = bs[c];
        }
      } else {
        b.design = col;
      }
    } else {
      b.design.resize(x.rows(), g.n_cols);
      for (int c = 0; c < g.n_cols; ++c) b.design.col(c) = x.col(g.first_col + c);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace

PropensityFit fit_propensity(const Eigen::MatrixXd& x, const DesignInfo& info,
                             const std::vector<int>& treatment,
                             const PropensityOptions& opts) {
  const int n = static_cast<int>(treatment.size());
  int n1 = 0;
  for (int t : treatment) n1 += t;
  if (n1 == 0 || n1 == n)
    throw numeric_error("SingleArm", "both treatment arms must be nonempty");

  PropensityFit fit;
  fit.eps = opts.eps;
  std::vector<Block> blocks = build_blocks(x, info, opts.smooth_knots);

  const double pbar = static_cast<double>(n1) / n;
  double alpha = std::log(pbar / (1.0 - pbar));
  std::vector<Eigen::VectorXd> f(blocks.size(), Eigen::VectorXd::Zero(n));
  std::vector<Eigen::VectorXd> coef;
  for (const Block& b : blocks) coef.push_back(Eigen::VectorXd::Zero(b.design.cols()));

  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, alpha);
  double ll = bernoulli_loglik(treatment, eta);
  fit.loglik_trace.push_back(ll);

  double change = 0.0;
  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    double alpha_old = alpha;
    std::vector<Eigen::VectorXd> f_old = f;
    std::vector<Eigen::VectorXd> coef_old = coef;

    // Local scoring: working response and weights at the current eta,
    // then one backfitting cycle over component blocks.
    Eigen::VectorXd w(n), z(n);
    for (int i = 0; i < n; ++i) {
      double p = std::min(1.0 - 1e-6, std::max(1e-6, expit(eta[i])));
      w[i] = p * (1.0 - p);
      z[i] = eta[i] + (treatment[i] - p) / w[i];
    }
    double wsum = w.sum();

    for (std::size_t j = 0; j < blocks.size(); ++j) {
      // partial residual: z minus everything except block j
      Eigen::VectorXd r = z;
      r.array() -= alpha;
      for (std::size_t k = 0; k < blocks.size(); ++k)
        if (k != j) r -= f[k];
      const Eigen::MatrixXd& d = blocks[j].design;
      Eigen::MatrixXd xtwx = d.transpose() * w.asDiagonal() * d;
      xtwx.diagonal().array() += opts.ridge;
      Eigen::VectorXd xtwr = d.transpose() * (w.asDiagonal() * r);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
      coef[j] = ldlt.solve(xtwr);
      f[j] = d * coef[j];
      // center so the intercept absorbs the weighted mean
      double m = (w.array() * f[j].array()).sum() / wsum;
      f[j].array() -= m;
      alpha += m;
      eta = Eigen::VectorXd::Constant(n, alpha);
      for (const auto& fk : f) eta += fk;
    }
    // refresh the intercept against the working response
    {
      Eigen::VectorXd r = z;
      for (const auto& fk : f) r -= fk;
      alpha = (w.array() * r.array()).sum() / wsum;
      eta = Eigen::VectorXd::Constant(n, alpha);
      for (const auto& fk : f) eta += fk;
    }

    // Step-halve the joint update if the likelihood would decrease.
    double ll_new = bernoulli_loglik(treatment, eta);
    double alpha_full = alpha;
    std::vector<Eigen::VectorXd> f_full = f;
    std::vector<Eigen::VectorXd> coef_full = coef;
    double step = 1.0;
    int halvings = 0;
    while (ll_new < ll - 1e-12 && halvings < 20) {
      step *= 0.5;
      alpha = alpha_old + step * (alpha_full - alpha_old);
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        coef[j] = coef_old[j] + step * (coef_full[j] - coef_old[j]);
        f[j] = f_old[j] + step * (f_full[j] - f_old[j]);
      }
      eta = Eigen::VectorXd::Constant(n, alpha);
      for (const auto& fk : f) eta += fk;
      ll_new = bernoulli_loglik(treatment, eta);
      ++halvings;
    }
    if (ll_new < ll - 1e-12) {
      // No improving step; keep the previous state and stop.
      alpha = alpha_old;
      f = f_old;
      coef = coef_old;
      fit.converged = true;
      ++sweep;
      change = 0.0;
      break;
    }
    ll = ll_new;
    fit.loglik_trace.push_back(ll);

    change = std::abs(alpha - alpha_old);
    for (std::size_t j = 0; j < blocks.size(); ++j)
      change = std::max(change, (f[j] - f_old[j]).cwiseAbs().maxCoeff());
    if (change < opts.tol) {
      ++sweep;
      fit.converged = true;
      break;
    }
  }

  fit.sweeps = sweep;
  fit.final_change = change;
  fit.intercept = alpha;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    blocks[j].comp.coef = coef[j];
    fit.components.push_back(blocks[j].comp);
  }
  // The centering shifted per-block offsets into alpha; bake each block's
  // offset into the stored coefficients by re-deriving it from the data mean.
  // Prediction applies coef to the raw block and adds a stored offset.
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    Eigen::VectorXd raw = blocks[j].design * coef[j];
    double off = (f[j] - raw).mean();  // constant vector, any entry works
    fit.intercept += off;
  }
  return fit;
}

double PropensityFit::predict1(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double eta = intercept;
  for (const GamComponent& c : components) {
    if (!c.knots.empty()) {
      std::vector<double> bs = spline_basis(x[c.src_cols[0]], c.knots);
      for (std::size_t b = 0; b < bs.size(); ++b) eta += c.coef[b] * bs[b];
    } else {
      for (std::size_t b = 0; b < c.src_cols.size(); ++b)
        eta += c.coef[b] * x[c.src_cols[b]];
    }
  }
  double p = expit(eta);
  return std::min(1.0 - eps, std::max(eps, p));
}

double PropensityFit::predict(const Eigen::Ref<const Eigen::VectorXd>& x,
                              int arm) const {
  if (x.size() == 0 && !components.empty())
    throw numeric_error("DimensionMismatch", "design row dimension mismatch");
  for (const GamComponent& c : components) {
    for (int sc : c.src_cols) {
      if (sc >= x.size())
        throw numeric_error("DimensionMismatch", "design row dimension mismatch");
    }
  }
  double p1 = predict1(x);
  return arm == 1 ? p1 : 1.0 - p1;
}

}  // namespace sensurv
