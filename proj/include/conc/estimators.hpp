#pragma once

#include "conc/bounds.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace conc {

/// Empirical tail probability with an exact (Clopper-Pearson) two-sided interval.
struct TailEstimate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double level = 0.99;

    friend bool operator==(const TailEstimate&, const TailEstimate&) = default;
};

enum class VerdictStatus { dominated, violation, inconclusive };

std::string to_string(VerdictStatus status);
VerdictStatus verdict_from_string(const std::string& name);

struct Verdict {
    BoundValue bound;
    TailEstimate estimate;
    VerdictStatus status = VerdictStatus::inconclusive;
};

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
};

struct MgfCheck {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;  ///< exponents above the overflow guard
    bool pass = false;
};

inline constexpr double kMgfOverflowGuard = 700.0;

TailEstimate mc_tail(std::size_t successes, std::size_t trials, double level = 0.99);
TailEstimate mc_tail(std::span<const std::uint8_t> indicators, double level = 0.99);

/// Normal-approximation interval; for centring only, never for verdicts.
MeanEstimate mc_mean(std::span<const double> values, double level = 0.99);

/// Mean of exp(exponent); passes iff the interval's lower end is <= 1.
MgfCheck mgf_check(std::span<const double> exponents, double level = 0.99);

/// violation iff ci_low > bound; dominated iff ci_high <= bound.
Verdict domination(const BoundValue& bound, const TailEstimate& estimate);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

}  // namespace conc
