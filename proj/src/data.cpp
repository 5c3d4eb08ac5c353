#include "sensurv/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sensurv/rng.hpp"

namespace sensurv {

Dataset to_dataset(const std::vector<SurvivalRecord>& records,
                   const DesignInfo& info) {
  Dataset d;
  d.info = info;
  const int n = static_cast<int>(records.size());
  const int p = n > 0 ? static_cast<int>(records[0].covariates.size()) : info.n_cols;
  d.x.resize(n, p);
  d.time.resize(n);
  d.treatment.resize(n);
  d.event.resize(n);
  for (int i = 0; i < n; ++i) {
    const SurvivalRecord& r = records[i];
    if (static_cast<int>(r.covariates.size()) != p) {
      throw data_error("DimensionMismatch", "ragged covariate rows");
    }
    for (int j = 0; j < p; ++j) d.x(i, j) = r.covariates[j];
    d.time[i] = r.followup_time;
    d.treatment[i] = r.treatment;
    d.event[i] = r.event;
  }
  return d;
}

std::vector<SurvivalRecord> to_records(const Dataset& d) {
  std::vector<SurvivalRecord> out(d.n());
  for (int i = 0; i < d.n(); ++i) {
    out[i].covariates.assign(d.x.row(i).begin(), d.x.row(i).end());
    out[i].treatment = d.treatment[i];
    out[i].followup_time = d.time[i];
    out[i].event = d.event[i];
  }
  return out;
}

void StudyConfig::validate() const {
  if (!(tau < tau_dagger))
    throw config_error("ConfigInvalid", "tau must be < tau_dagger");
  if (tau <= 0.0) throw config_error("ConfigInvalid", "tau must be positive");
  for (double s : s_grid) {
    if (s < 0.0 || s > tau)
      throw config_error("ConfigInvalid", "s_grid values must lie in [0, tau]");
  }
  if (!std::is_sorted(s_grid.begin(), s_grid.end()))
    throw config_error("ConfigInvalid", "s_grid must be ascending");
  if (folds < 1) throw config_error("ConfigInvalid", "folds must be >= 1");
  if (grid_size < 10) throw config_error("ConfigInvalid", "grid_size must be >= 10");
  if (!(trunc_percentile > 0.0 && trunc_percentile <= 1.0))
    throw config_error("ConfigInvalid", "trunc_percentile must be in (0,1]");
}

FoldAssignment assign_folds(int n, int k, std::uint64_t seed) {
  if (k < 2 || k > n)
    throw config_error("KTooLarge",
                       "need n >= k >= 2, got n=" + std::to_string(n) +
                           ", k=" + std::to_string(k));
  Rng rng(Rng::derive(seed, 0x666f6c64ULL));  // dedicated stream for folds
  std::vector<int> perm = rng.permutation(n);
  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(n, 0);
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    for (int j = 0; j < size; ++j) fa.fold_of[perm[pos++]] = f + 1;
  }
  return fa;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = s.find_first_not_of(' ');
    if (b == std::string::npos)
      s.clear();
    else if (b > 0)
      s = s.substr(b);
  }
  return out;
}

bool is_missing(const std::string& s) {
  if (s.empty()) return true;
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(c)));
  return t == "na" || t == "nan";
}

double parse_cell(const std::string& s, int row, const std::string& col) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || (end && *end != '\0') || !std::isfinite(v)) {
    throw data_error("NonNumericValue", "row " + std::to_string(row) +
                                            ", column '" + col +
                                            "': non-numeric value '" + s + "'");
  }
  return v;
}

}  // namespace

LoadedData load_csv(const std::string& path, const DesignSpec& spec) {
  std::ifstream in(path);
  if (!in) throw data_error("MissingFile", "cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw data_error("MissingColumn", "empty file: " + path);
  std::vector<std::string> header = split_csv_line(line);

  auto col_index = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw data_error("MissingColumn", "column '" + name + "' not in header");
    return static_cast<int>(it - header.begin());
  };

  const int time_idx = col_index(spec.time_col);
  const int event_idx = col_index(spec.event_col);
  const int treat_idx = col_index(spec.treatment_col);
  std::vector<int> cov_idx;
  for (const auto& cs : spec.covariates) cov_idx.push_back(col_index(cs.name));

  std::vector<double> times;
  std::vector<int> events, treatments;
  std::vector<std::vector<std::string>> raw_cols(spec.covariates.size());

  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw data_error("NonNumericValue",
                       "row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
    }
    auto used = [&](int idx, const std::string& name) -> const std::string& {
      if (is_missing(cells[idx])) {
        throw data_error("MissingValue", "row " + std::to_string(row) +
                                             ": missing value in column '" +
                                             name + "'");
      }
      return cells[idx];
    };

    double t = parse_cell(used(time_idx, spec.time_col), row, spec.time_col);
    if (t < 0.0)
      throw data_error("NegativeTime",
                       "row " + std::to_string(row) + ": negative follow-up time");
    double ev = parse_cell(used(event_idx, spec.event_col), row, spec.event_col);
    if (ev != 0.0 && ev != 1.0)
      throw data_error("NonNumericValue",
                       "row " + std::to_string(row) +
                           ": event indicator must be 0 or 1, got " +
                           cells[event_idx]);
    double tr = parse_cell(used(treat_idx, spec.treatment_col), row,
                           spec.treatment_col);
    if (tr != 0.0 && tr != 1.0)
      throw data_error("NonNumericValue",
                       "row " + std::to_string(row) +
                           ": treatment must be 0 or 1, got " + cells[treat_idx]);
    times.push_back(t);
    events.push_back(static_cast<int>(ev));
    treatments.push_back(static_cast<int>(tr));
    for (std::size_t j = 0; j < cov_idx.size(); ++j) {
      raw_cols[j].push_back(used(cov_idx[j], spec.covariates[j].name));
    }
  }

  DesignEncoder encoder(spec, raw_cols);
  LoadedData out;
  out.info = encoder.info();
  const int n = static_cast<int>(times.size());
  out.records.resize(n);
  std::vector<std::string> raw_row(spec.covariates.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < raw_cols.size(); ++j) raw_row[j] = raw_cols[j][i];
    Eigen::VectorXd enc = encoder.encode(raw_row);
    out.records[i].covariates.assign(enc.begin(), enc.end());
    out.records[i].followup_time = times[i];
    out.records[i].event = events[i];
    out.records[i].treatment = treatments[i];
  }
  return out;
}

}  // namespace sensurv
