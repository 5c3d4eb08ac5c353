#include "sensurv/design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace sensurv {

std::vector<double> spline_basis(double x, const std::vector<double>& knots) {
  const int k = static_cast<int>(knots.size());
  if (k < 3) {
    throw data_error("TooFewKnots",
                     "spline_basis needs at least 3 knots, got " +
                         std::to_string(k));
  }
  for (int j = 1; j < k; ++j) {
    if (!(knots[j] > knots[j - 1])) {
      throw data_error("TooFewKnots", "spline knots must be strictly increasing");
    }
  }
  auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  // d_j(x) = [(x-k_j)_+^3 - (x-k_K)_+^3] / (k_K - k_j)
  auto d = [&](int j) {
    return (cube_plus(x - knots[j]) - cube_plus(x - knots[k - 1])) /
           (knots[k - 1] - knots[j]);
  };
  std::vector<double> basis(k - 1);
  basis[0] = x;
  const double d_last = d(k - 2);
  for (int j = 0; j < k - 2; ++j) basis[j + 1] = d(j) - d_last;
  return basis;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const int n = static_cast<int>(sorted.size());
  if (n == 0) return 0.0;
  if (n == 1) return sorted[0];
  double h = p * (n - 1);
  int lo = static_cast<int>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - lo;
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

namespace {

double parse_double_strict(const std::string& s, const std::string& context) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || !std::isfinite(v)) {
    throw data_error("NonNumericValue", "non-numeric value '" + s + "' " + context);
  }
  return v;
}

std::vector<double> quantile_knots(std::vector<double> values, int n_knots) {
  std::sort(values.begin(), values.end());
  std::vector<double> knots;
  if (n_knots < 2) n_knots = 2;
  // n_knots quantiles evenly spaced over [0.10, 0.90]
  for (int j = 0; j < n_knots; ++j) {
    double p = 0.10 + 0.80 * static_cast<double>(j) / (n_knots - 1);
    knots.push_back(quantile_sorted(values, p));
  }
  return knots;
}

// Collapse knots closer than a relative tolerance; near-constant covariates
// end up with too few knots and fall back to identity encoding.
std::vector<double> dedupe_knots(const std::vector<double>& knots, bool* changed) {
  std::vector<double> out;
  double span = std::abs(knots.back() - knots.front());
  double tol = std::max(1e-12, 1e-9 * std::max(1.0, span));
  for (double kv : knots) {
    if (out.empty() || kv - out.back() > tol) out.push_back(kv);
  }
  *changed = out.size() != knots.size();
  return out;
}

}  // namespace

DesignEncoder::DesignEncoder(
    const DesignSpec& spec,
    const std::vector<std::vector<std::string>>& raw_columns)
    : spec_(spec) {
  if (raw_columns.size() != spec.covariates.size()) {
    throw config_error("DimensionMismatch",
                       "raw column count does not match covariate spec");
  }
  int col = 0;
  for (std::size_t j = 0; j < spec.covariates.size(); ++j) {
    const CovariateSpec& cs = spec.covariates[j];
    EncodedGroup g;
    g.name = cs.name;
    g.encoding = cs.encoding;
    g.first_col = col;
    if (cs.encoding == Encoding::Categorical) {
      // Reference level = most frequent; ties broken lexicographically.
      std::map<std::string, int> counts;
      for (const auto& v : raw_columns[j]) counts[v]++;
      std::string ref;
      int best = -1;
      for (const auto& [lvl, c] : counts) {
        if (c > best) {
          best = c;
          ref = lvl;
        }
      }
      g.reference = ref;
      for (const auto& [lvl, c] : counts) {
        (void)c;
        if (lvl != ref) g.levels.push_back(lvl);
      }
      g.n_cols = static_cast<int>(g.levels.size());
      for (const auto& lvl : g.levels)
        info_.column_names.push_back(cs.name + "=" + lvl);
    } else if (cs.encoding == Encoding::Identity) {
      g.n_cols = 1;
      info_.column_names.push_back(cs.name);
    } else {
      std::vector<double> values;
      values.reserve(raw_columns[j].size());
      for (const auto& v : raw_columns[j])
        values.push_back(parse_double_strict(v, "in covariate " + cs.name));
      std::vector<double> knots =
          cs.knots.empty() ? quantile_knots(values, cs.n_knots) : cs.knots;
      bool changed = false;
      knots = dedupe_knots(knots, &changed);
      g.knots_deduped = changed;
      if (knots.size() < 3) {
        // Degenerate spread: encode as identity, keep the flag.
        g.encoding = Encoding::Identity;
        g.n_cols = 1;
        info_.column_names.push_back(cs.name);
      } else {
        g.knots = knots;
        g.n_cols = static_cast<int>(knots.size()) - 1;
        for (int b = 0; b < g.n_cols; ++b)
          info_.column_names.push_back(cs.name + ".ns" + std::to_string(b + 1));
      }
    }
    col += g.n_cols;
    info_.groups.push_back(std::move(g));
  }
  info_.n_cols = col;
}

Eigen::VectorXd DesignEncoder::encode(
    const std::vector<std::string>& raw_row) const {
  if (raw_row.size() != info_.groups.size()) {
    throw config_error("DimensionMismatch", "raw row size does not match spec");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(info_.n_cols);
  for (std::size_t j = 0; j < info_.groups.size(); ++j) {
    const EncodedGroup& g = info_.groups[j];
    if (g.encoding == Encoding::Categorical) {
      const std::string& v = raw_row[j];
      if (v != g.reference) {
        auto it = std::find(g.levels.begin(), g.levels.end(), v);
        if (it == g.levels.end()) {
          throw data_error("NonNumericValue",
                           "unknown level '" + v + "' for covariate " + g.name);
        }
        out[g.first_col + static_cast<int>(it - g.levels.begin())] = 1.0;
      }
    } else if (g.encoding == Encoding::Identity) {
      out[g.first_col] =
          parse_double_strict(raw_row[j], "in covariate " + g.name);
    } else {
      double x = parse_double_strict(raw_row[j], "in covariate " + g.name);
      std::vector<double> b = spline_basis(x, g.knots);
      for (int c = 0; c < g.n_cols; ++c) out[g.first_col + c] = b[c];
    }
  }
  return out;
}

Eigen::MatrixXd DesignEncoder::encode_all(
    const std::vector<std::vector<std::string>>& raw_columns) const {
  const int n = raw_columns.empty() ? 0 : static_cast<int>(raw_columns[0].size());
  Eigen::MatrixXd x(n, info_.n_cols);
  std::vector<std::string> row(raw_columns.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < raw_columns.size(); ++j) row[j] = raw_columns[j][i];
    x.row(i) = encode(row);
  }
  return x;
}

}  // namespace sensurv
