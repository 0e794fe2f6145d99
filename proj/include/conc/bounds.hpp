#pragma once

#include <map>
#include <string>
#include <utility>

namespace conc {

enum class BoundFamily { gaussian, bennett, bernstein_gamma, azuma, selfnorm, selfnorm_cd, composite };

std::string to_string(BoundFamily family);

/// A tail-probability bound. `value` is min(1, raw); `raw` keeps the unclamped
/// formula value and `params` every symbol that entered the formula.
struct BoundValue {
    double value = 1.0;
    double raw = 1.0;
    BoundFamily family = BoundFamily::composite;
    std::map<std::string, double> params;

    friend bool operator==(const BoundValue&, const BoundValue&) = default;
};

// Special functions.

/// h(x) = (1 + x) log(1 + x) - x for x >= -1, h(-1) = 1.
double eval_h(double x);
/// h1(x) = 1 + x - sqrt(1 + 2x) for x >= -1/2.
double eval_h1(double x);
/// phi_a(x) = (e^{ax} - 1 - ax) / a^2, phi_0(x) = x^2 / 2.
double eval_phi_a(double a, double x);

// Generic martingale-route bounds. Unless stated otherwise R is on the raw
// scale of S_T - E S_T.

/// exp(-R^2 / (2 v)).
BoundValue gaussian_tail(double R, double v);
/// exp(-(m / a^2) h(a R / m)), m = mu + nu.
BoundValue bennett_tail(double R, double m, double a);
/// exp(-(m / b^2) h1(b R / m)), m = mu + nu.
BoundValue bernstein_gamma_tail(double R, double m, double b);
/// exp(-R^2 / (8 a2)) for bounded martingale differences with sum of squares <= a2.
BoundValue azuma_tail(double R, double a2);
/// min{2^{1/3}, (2/3)^{2/3} R^{-2/3}} e^{-R^2/2}, R on the self-normalized scale.
BoundValue selfnorm_tail(double R);
/// 2^{1/3} min{1, (CR + D) / (3R^2)}^{1/3} exp(-R^2 / (3 (CR + D))).
BoundValue selfnorm_cd_tail(double R, double C, double D);

/// D' = D + C |E S_T| + E H^0_T + 2 rho^2 for the variant conditioned on H^0_T <= C |S_T| + D.
double selfnorm_cstd_shift(double C, double D, double mean_S, double mean_H0, double rho2);
BoundValue selfnorm_cstd_tail(double R, double C, double D, double mean_S, double mean_H0, double rho2);

/// d<X>_u <= sigma2 (T - u)^alpha du; R on the T^{-(2 + alpha/2)} scale:
/// exp(-(3 + alpha) R^2 T / (2 sigma2)).
BoundValue poly_kernel_bound(double R, double T, double sigma2, double alpha);
/// d<X>_u <= e^{-(T - u)} du; R on the T^{-1/2} scale: exp(-R^2 T / 4).
BoundValue exp_kernel_bound(double R, double T);

// Application-specific bounds. R on the time-average scale unless noted.

/// (2 mbar / Mbar^2) T^p / (1 + T^p).
double polyak_lambda_max(double T, double p, double mbar, double Mbar);
/// exp(-(1 - 2p) mbar^2 R^2 T / (32 G^2)).
BoundValue polyak_bound(double R, double T, double p, double mbar, double G);

/// exp(-kappa^2 R^2 T / (2 rho^2 lip^2 (1 + C (1 - e^{-kappa T}) / T))).
BoundValue lipschitz_sde_bound(double R, double T, double rho, double kappa, double C_t1, double lip);
/// Threshold shift rho lip (1 - e^{-kappa T}) / (kappa T) W1(mu_0, nu) for the
/// variant centred at the stationary (or evolution-system) average.
double lipschitz_sde_mu_shift(double T, double rho, double kappa, double lip, double w1);

/// Two-sided bound for the squared OU time average started at x, |x|^2 = x_norm2.
BoundValue ou_squared_bound(double R, double T, double kappa, double d, double x_norm2);
/// The looser OU instance of the squared-Lipschitz bound:
/// 2^{1/3} exp(-kappa^2 R^2 T / (6 (R + d/kappa + 8 d^2/kappa^2))).
BoundValue ou_squared_lipschitz_instance(double R, double T, double kappa, double d);

/// C_kappa(T) = int_0^T e^{-(kappa + C) u} du.
double c_kappa(double kappa, double C, double T);
/// D_{kappa,C}(T) = D int_0^T e^{-kappa u} int_0^u e^{-C (u - v)} dv du.
double d_kappa_c(double kappa, double C, double D, double T);
/// 2^{1/3} exp(-R^2 T / (24 sigma^2 (C_k^2 R + 2 C_k^2 E[S_T/T] + 2 D_{k,C}^2))).
BoundValue squared_lipschitz_bound(double R, double T, double sigma, double kappa, double C, double D,
                                   double mean_ST_over_T);

/// Degenerate (X, Y) pair, 1-Lipschitz observable of Y.
BoundValue degenerate_bound(double R, double T, double alpha, double beta);
/// (e^{-alpha t} - e^{-beta t}) / (beta - alpha): sensitivity of Y_t to the start of X.
double degenerate_sensitivity(double alpha, double beta, double t);

/// (I, J): the rate implied by the squared-OU bound and the sharp LDP rate.
std::pair<double, double> ldp_rates(double R, double d, double kappa);

/// lambda * deviation - phi_a(|lambda|) H^a - lambda^2 rho2 / 2.
double mgf_envelope(double lambda, double deviation, double rho2, double a, double H_a);

}  // namespace conc
