#pragma once

#include <cmath>

namespace rhlab {

// Neumaier-compensated running sum. A -inf term poisons the sum permanently.
class CompensatedSum {
 public:
  void add(double v) {
    if (std::isinf(v) || std::isinf(sum_)) {
      sum_ += v;
      comp_ = 0.0;
      return;
    }
    double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return std::isinf(sum_) ? sum_ : sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace rhlab
