#include "conc/estimators.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

namespace conc {

namespace {

double normal_upper_quantile(double level) {
    const boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(boost::math::complement(std_normal, (1.0 - level) / 2.0));
}

}  // namespace

std::string to_string(VerdictStatus status) {
    switch (status) {
        case VerdictStatus::dominated: return "dominated";
        case VerdictStatus::violation: return "violation";
        case VerdictStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

VerdictStatus verdict_from_string(const std::string& name) {
    if (name == "dominated") return VerdictStatus::dominated;
    if (name == "violation") return VerdictStatus::violation;
    if (name == "inconclusive") return VerdictStatus::inconclusive;
    throw std::invalid_argument("unknown verdict: " + name);
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

TailEstimate mc_tail(std::size_t successes, std::size_t trials, double level) {
    if (trials == 0) throw std::invalid_argument("mc_tail: need at least one trial");
    if (successes > trials) throw std::invalid_argument("mc_tail: successes exceed trials");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("mc_tail: level must lie in (0, 1)");
    using boost::math::binomial_distribution;
    const double alpha = (1.0 - level) / 2.0;
    const auto n = static_cast<double>(trials);
    const auto k = static_cast<double>(successes);
    TailEstimate est;
    est.successes = successes;
    est.trials = trials;
    est.level = level;
    est.point = k / n;
    est.ci_low = binomial_distribution<double>::find_lower_bound_on_p(n, k, alpha);
    est.ci_high = binomial_distribution<double>::find_upper_bound_on_p(n, k, alpha);
    return est;
}

TailEstimate mc_tail(std::span<const std::uint8_t> indicators, double level) {
    std::size_t hits = 0;
    for (auto v : indicators) hits += (v != 0);
    return mc_tail(hits, indicators.size(), level);
}

MeanEstimate mc_mean(std::span<const double> values, double level) {
    if (values.size() < 2) throw std::invalid_argument("mc_mean: need at least two values");
    MeanEstimate est;
    est.n = values.size();
    const auto n = static_cast<double>(values.size());
    est.mean = compensated_sum(values) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.se = std::sqrt(ss / (n - 1.0) / n);
    const double z = normal_upper_quantile(level);
    est.ci_low = est.mean - z * est.se;
    est.ci_high = est.mean + z * est.se;
    return est;
}

MgfCheck mgf_check(std::span<const double> exponents, double level) {
    MgfCheck check;
    std::vector<double> kept;
    kept.reserve(exponents.size());
    for (double e : exponents) {
        if (!std::isfinite(e)) throw std::invalid_argument("mgf_check: non-finite exponent");
        if (e > kMgfOverflowGuard) {
            ++check.excluded;
            continue;
        }
        kept.push_back(std::exp(e));
    }
    check.used = kept.size();
    if (kept.size() < 2) throw std::invalid_argument("mgf_check: fewer than two usable exponents");
    const MeanEstimate m = mc_mean(kept, level);
    check.mean = m.mean;
    check.ci_low = m.ci_low;
    check.ci_high = m.ci_high;
    check.pass = check.ci_low <= 1.0;
    return check;
}

Verdict domination(const BoundValue& bound, const TailEstimate& estimate) {
    Verdict v{bound, estimate, VerdictStatus::inconclusive};
    if (estimate.ci_low > bound.value)
        v.status = VerdictStatus::violation;
    else if (estimate.ci_high <= bound.value)
        v.status = VerdictStatus::dominated;
    return v;
}

}  // namespace conc
