#include "conc/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>

namespace conc {

double additive_functional(const Trajectory& traj, const Observable& f) {
    const std::size_t n = traj.steps();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = f(traj.time(i), traj.state(i));
        if (!std::isfinite(v)) throw TrialAborted(fmt::format("additive_functional: non-finite value at step {}", i));
        sum += v;
    }
    return sum * traj.dt;
}

double discrete_additive_functional(const Trajectory& traj, const Observable& f) {
    const std::size_t n = traj.steps();
    double sum = 0.0;
    for (std::size_t u = 1; u <= n; ++u) {
        const double v = f(traj.time(u), traj.state(u));
        if (!std::isfinite(v)) throw TrialAborted(fmt::format("discrete_additive_functional: non-finite value at {}", u));
        sum += v;
    }
    return sum;
}

double martingale_transform(const Trajectory& traj, const Weight& weight, std::size_t k) {
    const std::size_t n = traj.steps();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += weight(traj.time(i)) * (traj.at(i + 1, k) - traj.at(i, k));
    return sum;
}

double decomposition_residual(const Trajectory& traj, std::size_t m) {
    if (m > traj.steps()) throw std::invalid_argument("decomposition_residual: index beyond the grid");
    const double T = traj.horizon();
    double lhs = 0.0;
    double transform = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lhs += traj.at(i) * traj.dt;
        transform += (T - traj.time(i + 1)) * (traj.at(i + 1) - traj.at(i));
    }
    const double rhs = transform - (T - traj.time(m)) * traj.at(m) + T * traj.at(0);
    return std::fabs(lhs - rhs);
}

double weighted_realized_qv(const Trajectory& traj, const Weight& weight, std::size_t k) {
    const std::size_t n = traj.steps();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = traj.at(i + 1, k) - traj.at(i, k);
        sum += weight(traj.time(i)) * dx * dx;
    }
    return sum;
}

ResolventSpec ResolventSpec::ou_linear(double kappa, double c, double T) {
    ResolventSpec spec;
    spec.kind = Kind::closed_form_ou_linear;
    spec.kappa = kappa;
    spec.c = c;
    spec.T = T;
    return spec;
}

double resolvent(const ResolventSpec& spec, double t, double x) {
    if (t > spec.T) throw std::invalid_argument("resolvent: t must not exceed T");
    if (spec.kind == ResolventSpec::Kind::closed_form_ou_linear) {
        if (!(spec.kappa > 0.0)) throw std::invalid_argument("resolvent: kappa must be positive");
        return spec.c * x * (-std::expm1(-spec.kappa * (spec.T - t))) / spec.kappa;
    }
    if (!spec.semigroup) throw std::invalid_argument("resolvent: numeric kind needs a semigroup");
    if (t == spec.T) return 0.0;
    constexpr double kRelTol = 1e-8;
    constexpr double kAbsTol = 1e-12;
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double u) { return spec.semigroup(t, u, x); }, t, spec.T, 20, kRelTol, &error, &l1);
    if (!std::isfinite(value) || error > std::max(kRelTol * std::fabs(value), kAbsTol))
        throw QuadratureError(fmt::format("resolvent: quadrature did not converge (estimate {}, error {})", value, error));
    return value;
}

std::vector<double> auxiliary_martingale_path(const Trajectory& traj, const Observable& f, const ResolventSpec& spec) {
    const std::size_t n = traj.steps();
    std::vector<double> m(n + 1);
    double running = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        m[i] = running + resolvent(spec, traj.time(i), traj.at(i));
        if (i < n) running += f(traj.time(i), traj.state(i)) * traj.dt;
    }
    return m;
}

FunctionalStats h_a_statistic(std::span<const double> increments, double a, double pqv_proxy) {
    if (!(a >= 0.0)) throw std::invalid_argument("h_a_statistic: threshold must be non-negative");
    FunctionalStats stats;
    stats.a_threshold = a;
    double jumps = 0.0;
    for (double dm : increments) {
        stats.S_T += dm;
        stats.weighted_qv += dm * dm;
        stats.max_jump = std::max(stats.max_jump, std::fabs(dm));
        if (std::fabs(dm) > a) jumps += dm * dm;
    }
    stats.H_a = jumps + pqv_proxy;
    return stats;
}

namespace {

// int_{lo}^{hi} (1 - e^{-kappa u})^2 / kappa^2 du via the power series of
// (1 - e^{-x})^2 = sum_{n>=2} (-1)^n (2^n - 2) / n! x^n, for kappa * hi small.
double squared_decay_integral_series(double kappa, double lo, double hi) {
    double sum = 0.0;
    double coef = 1.0;  // (2^n - 2) / n! with sign, starting at n = 2
    double pow2 = 4.0;
    double fact = 2.0;
    double kpow = 1.0;  // kappa^{n-2}
    double hi_pow = hi * hi * hi;
    double lo_pow = lo * lo * lo;
    for (int n = 2; n < 40; ++n) {
        coef = ((n % 2 == 0) ? 1.0 : -1.0) * (pow2 - 2.0) / fact;
        const double term = coef * kpow * (hi_pow - lo_pow) / (n + 1);
        sum += term;
        if (n > 4 && std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
        pow2 *= 2.0;
        fact *= (n + 1);
        kpow *= kappa;
        hi_pow *= hi;
        lo_pow *= lo;
    }
    return sum;
}

}  // namespace

double pqv_exp_decay_envelope(double sigma, double kappa, double T, double t) {
    if (kappa < 0.0) throw std::invalid_argument("pqv_exp_decay_envelope: kappa must be non-negative");
    if (t > T) throw std::invalid_argument("pqv_exp_decay_envelope: t must not exceed T");
    if (t <= 0.0) return 0.0;
    const double s2 = sigma * sigma;
    // Substitute u = T - s, integrating over [T - t, T].
    const double lo = T - t;
    if (kappa * T <= 0.5) return s2 * squared_decay_integral_series(kappa, lo, T);
    const double k2 = kappa * kappa;
    const double e1 = std::exp(-kappa * lo) - std::exp(-kappa * T);
    const double e2 = std::exp(-2.0 * kappa * lo) - std::exp(-2.0 * kappa * T);
    return s2 / k2 * (t - 2.0 * e1 / kappa + e2 / (2.0 * kappa));
}

}  // namespace conc
