#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <omp.h>

namespace kwising {

/// Neumaier compensated summation.
template <class T>
class BasicCompensatedSum {
 public:
  void add(T x) noexcept {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

using CompensatedSum = BasicCompensatedSum<double>;

// Block size of the deterministic reductions below. The partition of [0, n)
// into blocks does not depend on the thread count, so results are bitwise
// reproducible for any OMP_NUM_THREADS.
inline constexpr std::int64_t kReductionBlock = 4096;

/// Sum of term(i) for i in [0, n), OpenMP-parallel over fixed blocks, with the
/// block partials combined in index order.
template <class Term>
double parallel_sum(std::int64_t n, Term&& term) {
  if (n <= 0) return 0.0;
  const std::int64_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < blocks; ++b) {
    CompensatedSum acc;
    const std::int64_t lo = b * kReductionBlock;
    const std::int64_t hi = std::min(n, lo + kReductionBlock);
    for (std::int64_t i = lo; i < hi; ++i) acc.add(term(i));
    partial[static_cast<std::size_t>(b)] = acc.value();
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

/// Serial reference for parallel_sum: one compensated pass in index order.
template <class Term>
double serial_sum(std::int64_t n, Term&& term) {
  CompensatedSum acc;
  for (std::int64_t i = 0; i < n; ++i) acc.add(term(i));
  return acc.value();
}

}  // namespace kwising
