#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace homokin {

// Halton low-discrepancy sequence with a seeded Cranley-Patterson rotation.
// Deterministic given (dim, seed); distinct seeds give independently shifted
// point sets so repeated experiments have independent sampling error.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shift_(dim), index_(0) {
    static constexpr int primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
    bases_.assign(dim_, 2);
    for (int d = 0; d < dim_ && d < 8; ++d) bases_[d] = primes[d];
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int d = 0; d < dim_; ++d) shift_[d] = uni(rng);
  }

  // Next point in [0,1)^dim.
  std::vector<double> next() {
    ++index_;
    std::vector<double> p(dim_);
    for (int d = 0; d < dim_; ++d) {
      double v = radical_inverse(index_, bases_[d]) + shift_[d];
      p[d] = v - std::floor(v);
    }
    return p;
  }

 private:
  static double radical_inverse(std::uint64_t n, int base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (n > 0) {
      x += f * static_cast<double>(n % base);
      n /= base;
      f *= inv;
    }
    return x;
  }

  int dim_;
  std::vector<int> bases_;
  std::vector<double> shift_;
  std::uint64_t index_;
};

}  // namespace homokin
