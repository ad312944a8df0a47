#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace gridsynth::detail {

// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1); 0 for n < 2
    double variance = 0.0;
    std::size_t n = 0;
};

// Two-pass mean and sample variance.
inline Moments moments(std::span<const double> xs) {
    Moments m;
    m.n = xs.size();
    if (xs.empty()) return m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    CompensatedSum sq;
    for (double x : xs) sq.add((x - m.mean) * (x - m.mean));
    m.variance = sq.value() / static_cast<double>(xs.size() - 1);
    m.stddev = std::sqrt(m.variance);
    return m;
}

}  // namespace gridsynth::detail
