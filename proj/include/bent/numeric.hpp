#pragma once

#include <cmath>

namespace bent {

/// Neumaier-compensated running sum.
class CompensatedSum {
   public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const {
        return sum_ + compensation_;
    }

   private:
    double sum_ = 0;
    double compensation_ = 0;
};

}  // namespace bent
