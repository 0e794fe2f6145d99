#pragma once

#include "conc/processes.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace conc {

/// Observable f(t, x) evaluated along a trajectory.
using Observable = std::function<double(double t, std::span<const double> x)>;
/// Deterministic weight w(u).
using Weight = std::function<double(double u)>;

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FunctionalStats {
    double S_T = 0.0;          ///< terminal martingale increment, sum of dM
    double weighted_qv = 0.0;  ///< realized sum of (dM)^2
    double H_a = 0.0;
    double max_jump = 0.0;
    double a_threshold = 0.0;
};

/// Left-point Riemann sum of f(t_i, X_i) dt over i = 0..n-1. Throws TrialAborted
/// on a non-finite value.
double additive_functional(const Trajectory& traj, const Observable& f);

/// Discrete-time additive functional sum_{u=1}^{T} f(u, X_u) on a unit grid.
double discrete_additive_functional(const Trajectory& traj, const Observable& f);

/// sum_i w(t_i) (X_{i+1} - X_i) on component k.
double martingale_transform(const Trajectory& traj, const Weight& weight, std::size_t k = 0);

/// Residual of the summation-by-parts identity
///   sum_{i<m} X_i dt = sum_{i<m} (T - t_{i+1}) (X_{i+1} - X_i) - (T - t_m) X_m + T X_0
/// at grid index m (m = steps() gives t = T). Exact up to rounding.
double decomposition_residual(const Trajectory& traj, std::size_t m);

/// sum_i w(t_i) (X_{i+1} - X_i)^2 on component k.
double weighted_realized_qv(const Trajectory& traj, const Weight& weight, std::size_t k = 0);

struct ResolventSpec {
    enum class Kind { closed_form_ou_linear, numeric_quadrature };
    Kind kind = Kind::closed_form_ou_linear;
    double kappa = 1.0;
    double c = 1.0;  ///< slope of f(x) = c x for the closed form
    /// P_{t,u} f(x), required for the numeric kind.
    std::function<double(double t, double u, double x)> semigroup;
    double T = 1.0;

    static ResolventSpec ou_linear(double kappa, double c, double T);
};

/// R_t^T(x) = int_t^T P_{t,u} f(x) du.
double resolvent(const ResolventSpec& spec, double t, double x);

/// M^T at every grid point: sum_{j<i} f(t_j, X_j) dt + R_{t_i}^T(X_i).
std::vector<double> auxiliary_martingale_path(const Trajectory& traj, const Observable& f, const ResolventSpec& spec);

/// H^a = sum (dM)^2 1{|dM| > a} + pqv_proxy.
FunctionalStats h_a_statistic(std::span<const double> increments, double a, double pqv_proxy);

/// int_0^t (sigma^2 / kappa^2) (1 - e^{-kappa (T - s)})^2 ds; kappa = 0 gives
/// the limit sigma^2 int_0^t (T - s)^2 ds.
double pqv_exp_decay_envelope(double sigma, double kappa, double T, double t);

}  // namespace conc
