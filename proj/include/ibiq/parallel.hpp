#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace ibiq {

// Worker count: hardware concurrency, capped by IBIQ_THREADS when set.
unsigned thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; the
// assignment of indices to results never depends on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Deterministic compensated sum of term(i), i in [0, n): fixed blocks of
// `block` terms are summed independently (possibly in parallel) and the
// block totals combined in index order.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         std::size_t block = 4096);

}  // namespace ibiq
