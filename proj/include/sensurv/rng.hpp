#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace sensurv {

// splitmix64 generator. Self-contained so that datasets, fold splits and
// bootstrap draws are bit-identical for a given seed regardless of the
// standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], safe under log()
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential() { return -std::log(uniform_pos()); }

  // Box-Muller; one value per call, no cached spare, so the stream position
  // is a pure function of the call count.
  double normal() {
    double u = uniform_pos();
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // integer in [0, n) without modulo bias (Lemire reduction)
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Fisher-Yates permutation of {0,...,n-1}
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

  // Derived stream seed: decorrelates (master, index) pairs so parallel
  // replicates can each own an independent generator.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    Rng r(master ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    r.next_u64();
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace sensurv
