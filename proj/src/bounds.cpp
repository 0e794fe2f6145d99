#include "conc/bounds.hpp"

#include <algorithm>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <fmt/format.h>
#include <stdexcept>

namespace conc {

namespace {

const double kCbrt2 = std::cbrt(2.0);

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

BoundValue make_bound(BoundFamily family, double raw, std::map<std::string, double> params) {
    BoundValue b;
    b.family = family;
    // Deep tails underflow; keep the value strictly positive.
    b.raw = std::max(raw, std::numeric_limits<double>::denorm_min());
    b.value = std::min(1.0, b.raw);
    b.params = std::move(params);
    b.params["raw"] = b.raw;
    return b;
}

// int_0^T e^{-a u} du, valid for any real a.
double exp_integral(double a, double T) {
    const double x = a * T;
    if (std::fabs(x) < 1e-8) return T * (1.0 - 0.5 * x);
    return -std::expm1(-x) / a;
}

// int_0^T u^k e^{-kappa u} du for kappa >= 0.
double moment_integral(unsigned k, double kappa, double T) {
    if (kappa * T == 0.0) return std::pow(T, k + 1) / (k + 1);
    return boost::math::factorial<double>(k) * boost::math::gamma_p(k + 1.0, kappa * T) / std::pow(kappa, k + 1);
}

}  // namespace

std::string to_string(BoundFamily family) {
    switch (family) {
        case BoundFamily::gaussian: return "gaussian";
        case BoundFamily::bennett: return "bennett";
        case BoundFamily::bernstein_gamma: return "bernstein_gamma";
        case BoundFamily::azuma: return "azuma";
        case BoundFamily::selfnorm: return "selfnorm";
        case BoundFamily::selfnorm_cd: return "selfnorm_cd";
        case BoundFamily::composite: return "composite";
    }
    return "composite";
}

double eval_h(double x) {
    require(x >= -1.0, "eval_h: x must be >= -1");
    if (x == -1.0) return 1.0;
    if (std::fabs(x) < 0.1) {
        // h(x) = sum_{n>=2} (-1)^n x^n / (n (n - 1))
        double sum = 0.0;
        double xn = x * x;
        for (int n = 2; n < 40; ++n) {
            const double term = ((n % 2 == 0) ? xn : -xn) / (n * (n - 1.0));
            sum += term;
            if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
            xn *= x;
        }
        return sum;
    }
    return (1.0 + x) * std::log1p(x) - x;
}

double eval_h1(double x) {
    require(x >= -0.5, "eval_h1: x must be >= -1/2");
    // (1 + x)^2 - (1 + 2x) = x^2 avoids the cancellation near 0.
    return x * x / (1.0 + x + std::sqrt(1.0 + 2.0 * x));
}

double eval_phi_a(double a, double x) {
    require(a >= 0.0, "eval_phi_a: a must be non-negative");
    const double y = a * x;
    if (std::fabs(y) < 0.1) {
        // phi_a(x) = x^2 sum_{n>=2} y^{n-2} / n!
        double sum = 0.0;
        double term = 0.5;
        for (int n = 2; n < 30; ++n) {
            sum += term;
            term *= y / (n + 1);
            if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
        }
        return x * x * sum;
    }
    return (std::expm1(y) - y) / (a * a);
}

BoundValue gaussian_tail(double R, double v) {
    require(R > 0.0 && v > 0.0, "gaussian_tail: R and v must be positive");
    return make_bound(BoundFamily::gaussian, std::exp(-R * R / (2.0 * v)), {{"R", R}, {"v", v}});
}

BoundValue bennett_tail(double R, double m, double a) {
    require(R > 0.0 && m > 0.0 && a > 0.0, "bennett_tail: R, m and a must be positive");
    return make_bound(BoundFamily::bennett, std::exp(-(m / (a * a)) * eval_h(a * R / m)), {{"R", R}, {"m", m}, {"a", a}});
}

BoundValue bernstein_gamma_tail(double R, double m, double b) {
    require(R > 0.0 && m > 0.0 && b > 0.0, "bernstein_gamma_tail: R, m and b must be positive");
    return make_bound(BoundFamily::bernstein_gamma, std::exp(-(m / (b * b)) * eval_h1(b * R / m)),
                      {{"R", R}, {"m", m}, {"b", b}});
}

BoundValue azuma_tail(double R, double a2) {
    require(R > 0.0 && a2 > 0.0, "azuma_tail: R and a2 must be positive");
    return make_bound(BoundFamily::azuma, std::exp(-R * R / (2.0 * (4.0 * a2))), {{"R", R}, {"a2", a2}});
}

BoundValue selfnorm_tail(double R) {
    require(R > 0.0, "selfnorm_tail: R must be positive");
    const double prefactor = std::min(kCbrt2, std::cbrt(4.0 / 9.0) / std::cbrt(R * R));
    return make_bound(BoundFamily::selfnorm, prefactor * std::exp(-R * R / 2.0), {{"R", R}, {"prefactor", prefactor}});
}

BoundValue selfnorm_cd_tail(double R, double C, double D) {
    require(R > 0.0, "selfnorm_cd_tail: R must be positive");
    require(C >= 0.0 && D >= 0.0, "selfnorm_cd_tail: C and D must be non-negative");
    const double scale = C * R + D;
    require(scale > 0.0, "selfnorm_cd_tail: C R + D must be positive");
    const double raw = kCbrt2 * std::cbrt(std::min(1.0, scale / (3.0 * R * R))) * std::exp(-R * R / (3.0 * scale));
    return make_bound(BoundFamily::selfnorm_cd, raw, {{"R", R}, {"C", C}, {"D", D}});
}

double selfnorm_cstd_shift(double C, double D, double mean_S, double mean_H0, double rho2) {
    return D + C * std::fabs(mean_S) + mean_H0 + 2.0 * rho2;
}

BoundValue selfnorm_cstd_tail(double R, double C, double D, double mean_S, double mean_H0, double rho2) {
    BoundValue b = selfnorm_cd_tail(R, C, selfnorm_cstd_shift(C, D, mean_S, mean_H0, rho2));
    b.params["D"] = D;
    b.params["D_prime"] = selfnorm_cstd_shift(C, D, mean_S, mean_H0, rho2);
    b.params["mean_S"] = mean_S;
    b.params["mean_H0"] = mean_H0;
    b.params["rho2"] = rho2;
    return b;
}

BoundValue poly_kernel_bound(double R, double T, double sigma2, double alpha) {
    require(alpha > -3.0, "poly_kernel_bound: alpha must exceed -3");
    require(R > 0.0 && T > 0.0 && sigma2 > 0.0, "poly_kernel_bound: R, T and sigma2 must be positive");
    return make_bound(BoundFamily::gaussian, std::exp(-(3.0 + alpha) * R * R * T / (2.0 * sigma2)),
                      {{"R", R}, {"T", T}, {"sigma2", sigma2}, {"alpha", alpha}});
}

BoundValue exp_kernel_bound(double R, double T) {
    require(R > 0.0 && T > 0.0, "exp_kernel_bound: R and T must be positive");
    return make_bound(BoundFamily::gaussian, std::exp(-R * R * T / 4.0), {{"R", R}, {"T", T}});
}

double polyak_lambda_max(double T, double p, double mbar, double Mbar) {
    const double tp = std::pow(T, p);
    return 2.0 * mbar / (Mbar * Mbar) * tp / (1.0 + tp);
}

BoundValue polyak_bound(double R, double T, double p, double mbar, double G) {
    require(p < 0.5, "polyak_bound: p must be below 1/2");
    require(R > 0.0 && T > 0.0 && mbar > 0.0 && G > 0.0, "polyak_bound: R, T, mbar and G must be positive");
    return make_bound(BoundFamily::azuma, std::exp(-(1.0 - 2.0 * p) * mbar * mbar * R * R * T / (32.0 * G * G)),
                      {{"R", R}, {"T", T}, {"p", p}, {"mbar", mbar}, {"G", G}});
}

BoundValue lipschitz_sde_bound(double R, double T, double rho, double kappa, double C_t1, double lip) {
    require(rho > 0.0 && kappa > 0.0 && lip > 0.0, "lipschitz_sde_bound: rho, kappa and lip must be positive");
    require(R > 0.0 && T > 0.0 && C_t1 >= 0.0, "lipschitz_sde_bound: need R, T > 0 and C >= 0");
    const double correction = 1.0 + C_t1 * (-std::expm1(-kappa * T)) / T;
    const double raw = std::exp(-kappa * kappa * R * R * T / (2.0 * rho * rho * lip * lip * correction));
    return make_bound(BoundFamily::gaussian, raw,
                      {{"R", R}, {"T", T}, {"rho", rho}, {"kappa", kappa}, {"C", C_t1}, {"lip", lip}});
}

double lipschitz_sde_mu_shift(double T, double rho, double kappa, double lip, double w1) {
    return rho * lip * (-std::expm1(-kappa * T)) / (kappa * T) * w1;
}

BoundValue ou_squared_bound(double R, double T, double kappa, double d, double x_norm2) {
    require(kappa > 0.0 && T > 0.0, "ou_squared_bound: kappa and T must be positive");
    require(R > 0.0 && d > 0.0 && x_norm2 >= 0.0, "ou_squared_bound: need R, d > 0 and |x|^2 >= 0");
    const double D = x_norm2 / (kappa * T) + d / kappa;
    const double k2RT = kappa * kappa * R * R * T;
    const double raw = kCbrt2 * std::cbrt(std::min(1.0, (R + D) / (3.0 * k2RT))) * std::exp(-k2RT / (3.0 * (R + D)));
    return make_bound(BoundFamily::selfnorm_cd, raw,
                      {{"R", R}, {"T", T}, {"kappa", kappa}, {"d", d}, {"x_norm2", x_norm2}, {"D", D}});
}

BoundValue ou_squared_lipschitz_instance(double R, double T, double kappa, double d) {
    require(kappa > 0.0 && T > 0.0 && R > 0.0 && d > 0.0, "ou_squared_lipschitz_instance: inputs must be positive");
    const double denom = 6.0 * (R + d / kappa + 8.0 * d * d / (kappa * kappa));
    return make_bound(BoundFamily::selfnorm, kCbrt2 * std::exp(-kappa * kappa * R * R * T / denom),
                      {{"R", R}, {"T", T}, {"kappa", kappa}, {"d", d}});
}

double c_kappa(double kappa, double C, double T) { return exp_integral(kappa + C, T); }

double d_kappa_c(double kappa, double C, double D, double T) {
    require(kappa >= 0.0, "d_kappa_c: kappa must be non-negative");
    if (std::fabs(C) * T < 1e-4) {
        // (1 - e^{-Cu}) / C = u - C u^2 / 2 + C^2 u^3 / 6 - ...
        return D * (moment_integral(1, kappa, T) - 0.5 * C * moment_integral(2, kappa, T) +
                    C * C / 6.0 * moment_integral(3, kappa, T));
    }
    return D * (exp_integral(kappa, T) - exp_integral(kappa + C, T)) / C;
}

BoundValue squared_lipschitz_bound(double R, double T, double sigma, double kappa, double C, double D,
                                   double mean_ST_over_T) {
    require(R > 0.0 && T > 0.0 && sigma > 0.0, "squared_lipschitz_bound: R, T and sigma must be positive");
    require(D >= 0.0, "squared_lipschitz_bound: D must be non-negative");
    const double ck = c_kappa(kappa, C, T);
    const double dk = d_kappa_c(kappa, C, D, T);
    const double denom = 24.0 * sigma * sigma * (ck * ck * R + 2.0 * ck * ck * mean_ST_over_T + 2.0 * dk * dk);
    require(denom > 0.0, "squared_lipschitz_bound: degenerate variance proxy");
    return make_bound(BoundFamily::selfnorm, kCbrt2 * std::exp(-R * R * T / denom),
                      {{"R", R},
                       {"T", T},
                       {"sigma", sigma},
                       {"kappa", kappa},
                       {"C", C},
                       {"D", D},
                       {"mean_ST_over_T", mean_ST_over_T},
                       {"C_kappa", ck},
                       {"D_kappa_C", dk}});
}

BoundValue degenerate_bound(double R, double T, double alpha, double beta) {
    require(alpha > 0.0 && beta > 0.0, "degenerate_bound: alpha and beta must be positive");
    require(alpha != beta, "degenerate_bound: alpha == beta is not supported");
    require(R > 0.0 && T > 0.0, "degenerate_bound: R and T must be positive");
    const double lo = std::min(alpha, beta);
    const double gap = std::fabs(alpha - beta);
    const double f1 = -std::expm1(-lo * T);
    const double f2 = -std::expm1(-gap * T);
    const double raw = std::exp(-R * R * T * lo * lo * gap * gap / (4.0 * f1 * f1 * f2 * f2));
    return make_bound(BoundFamily::gaussian, raw, {{"R", R}, {"T", T}, {"alpha", alpha}, {"beta", beta}});
}

double degenerate_sensitivity(double alpha, double beta, double t) {
    require(alpha != beta, "degenerate_sensitivity: alpha == beta is not supported");
    return (std::exp(-alpha * t) - std::exp(-beta * t)) / (beta - alpha);
}

std::pair<double, double> ldp_rates(double R, double d, double kappa) {
    require(R > 0.0, "ldp_rates: R must be positive");
    require(d > 0.0 && kappa > 0.0, "ldp_rates: d and kappa must be positive");
    const double num = (d - 2.0 * kappa * R) * (d - 2.0 * kappa * R);
    return {num / (12.0 * (R + d / (2.0 * kappa))), num / (8.0 * R)};
}

double mgf_envelope(double lambda, double deviation, double rho2, double a, double H_a) {
    return lambda * deviation - eval_phi_a(a, std::fabs(lambda)) * H_a - 0.5 * lambda * lambda * rho2;
}

}  // namespace conc
