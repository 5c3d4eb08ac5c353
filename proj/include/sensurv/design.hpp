#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sensurv/common.hpp"

namespace sensurv {

// Natural cubic spline basis at x for the given ascending knots.
// Returns #knots-1 values (intercept excluded): the identity term plus the
// difference-of-truncated-cubes terms, linear beyond the boundary knots.
std::vector<double> spline_basis(double x, const std::vector<double>& knots);

// Quantile of sorted values, linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double p);

enum class Encoding { Categorical, Identity, Spline };

struct CovariateSpec {
  std::string name;
  Encoding encoding = Encoding::Identity;
  // Spline knots: explicit values win; otherwise n_knots quantiles of the
  // observed covariate spread evenly over the [10,90] percentile range
  // (n_knots=3 -> {10,50,90}th percentiles).
  int n_knots = 3;
  std::vector<double> knots;
};

struct DesignSpec {
  std::string time_col;
  std::string event_col;
  std::string treatment_col;
  std::vector<CovariateSpec> covariates;
};

// One encoded covariate: which design columns it occupies and how they were
// produced. knots_deduped flags near-constant covariates whose quantile knots
// collided and were reduced.
struct EncodedGroup {
  std::string name;
  Encoding encoding = Encoding::Identity;
  int first_col = 0;
  int n_cols = 0;
  std::vector<double> knots;        // spline groups
  std::vector<std::string> levels;  // categorical: non-reference levels
  std::string reference;            // categorical: reference level
  bool knots_deduped = false;
};

struct DesignInfo {
  std::vector<EncodedGroup> groups;
  std::vector<std::string> column_names;
  int n_cols = 0;
};

// Fits the encoding (quantile knots, categorical levels) on raw columns and
// encodes rows. Deterministic: identical raw data gives identical designs.
class DesignEncoder {
 public:
  // raw_columns[j] holds the string cells of covariate j, spec order.
  DesignEncoder(const DesignSpec& spec,
                const std::vector<std::vector<std::string>>& raw_columns);

  const DesignInfo& info() const { return info_; }

  Eigen::VectorXd encode(const std::vector<std::string>& raw_row) const;
  Eigen::MatrixXd encode_all(
      const std::vector<std::vector<std::string>>& raw_columns) const;

 private:
  DesignSpec spec_;
  DesignInfo info_;
};

}  // namespace sensurv
