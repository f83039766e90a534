#pragma once

namespace cumdiff {

// Compensated (Kahan) accumulator. Tracks the rounding error of each
// addition and feeds it back into the next one, so long sums of doubles
// stay accurate to a few ulps independent of length.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  KahanSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cumdiff
