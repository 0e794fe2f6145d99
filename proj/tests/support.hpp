#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace testsupport {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

inline double std_error(const std::vector<double>& v) { return std::sqrt(variance(v) / v.size()); }

/// Kolmogorov-Smirnov critical value c(alpha) = sqrt(-ln(alpha / 2) / 2).
inline double ks_coefficient(double alpha) { return std::sqrt(-std::log(alpha / 2.0) / 2.0); }

template <class Cdf>
double ks_one_sample(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

}  // namespace testsupport
