#pragma once

#include <cstddef>
#include <span>

namespace elastic_reflect::detail {

/// Neumaier compensated accumulator. Summation order still matters in the
/// last bits, so deterministic reductions must also fix the order.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace elastic_reflect::detail
