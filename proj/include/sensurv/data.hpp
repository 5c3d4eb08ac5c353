#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sensurv/common.hpp"
#include "sensurv/design.hpp"

namespace sensurv {

// One subject. covariates is the encoded design row.
struct SurvivalRecord {
  std::vector<double> covariates;
  int treatment = 0;        // {0,1}
  double followup_time = 0; // months, >= 0
  int event = 0;            // 1 = failure observed, 0 = censored
};

// Columnar view used by the numerical code.
struct Dataset {
  Eigen::MatrixXd x;            // n x p design
  Eigen::VectorXd time;         // follow-up times
  std::vector<int> treatment;   // {0,1}
  std::vector<int> event;       // {0,1}
  DesignInfo info;

  int n() const { return static_cast<int>(time.size()); }
  int p() const { return static_cast<int>(x.cols()); }
};

Dataset to_dataset(const std::vector<SurvivalRecord>& records,
                   const DesignInfo& info);
std::vector<SurvivalRecord> to_records(const Dataset& d);

// Analysis configuration shared by the estimator and the CLI.
struct StudyConfig {
  double tau = 130.0;           // analysis horizon
  double tau_dagger = 150.0;    // administrative truncation, > tau
  std::vector<double> s_grid;   // evaluation times in [0, tau]
  std::vector<double> gamma1;   // sensitivity values for arm 1
  std::vector<double> gamma0;   // sensitivity values for arm 0
  int folds = 5;                // K >= 2 (1 = fit and evaluate on the full
                                // sample, diagnostic use only)
  double bandwidth = 0.0;       // <= 0: sd(time) * n^(-1/5) per fit
  double trunc_percentile = 0.995;
  int grid_size = 200;          // M midpoints over (0, tau_dagger)
  std::uint64_t seed = 0;

  void validate() const;
};

struct FoldAssignment {
  std::vector<int> fold_of;  // subject index -> fold id in {1..k}
  int k = 0;
};

// Random permutation then block split; first n%k folds get the extra subject.
FoldAssignment assign_folds(int n, int k, std::uint64_t seed);

// CSV ingestion: header row, columns referenced by name, '.' decimal
// separator. Rows with missing or invalid values in used columns abort the
// load with the offending 1-based data row reported.
struct LoadedData {
  std::vector<SurvivalRecord> records;
  DesignInfo info;
};
LoadedData load_csv(const std::string& path, const DesignSpec& spec);

}  // namespace sensurv
