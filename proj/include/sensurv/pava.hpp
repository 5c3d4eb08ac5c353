#pragma once

#include <vector>

namespace sensurv {

// Pool adjacent violators: least-squares projection of y onto the
// nondecreasing cone. Block-merge formulation, O(n).
inline std::vector<double> pava_monotonize(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> value;   // block means
  std::vector<double> weight;  // block sizes
  value.reserve(n);
  weight.reserve(n);
  for (int i = 0; i < n; ++i) {
    value.push_back(y[i]);
    weight.push_back(1.0);
    while (value.size() >= 2 && value[value.size() - 2] > value.back()) {
      double w = weight[weight.size() - 2] + weight.back();
      double v = (value[value.size() - 2] * weight[weight.size() - 2] +
                  value.back() * weight.back()) /
                 w;
      value.pop_back();
      weight.pop_back();
      value.back() = v;
      weight.back() = w;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < value.size(); ++b) {
    for (int r = 0; r < static_cast<int>(weight[b]); ++r) out.push_back(value[b]);
  }
  return out;
}

}  // namespace sensurv
