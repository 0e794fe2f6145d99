#pragma once

#include "conc/rng.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace conc {

/// Raised when a simulated trial produces a non-finite value. The experiment
/// runner counts these as aborted trials.
class TrialAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State values on the uniform grid t0 + i*dt, i = 0..steps(), stored
/// row-major with `dim` entries per grid point.
struct Trajectory {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t dim = 1;
    std::vector<double> values;
    std::optional<std::vector<double>> jump_times;

    std::size_t steps() const noexcept { return values.size() / dim - 1; }
    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    double horizon() const noexcept { return time(steps()); }
    std::span<const double> state(std::size_t i) const noexcept { return {values.data() + i * dim, dim}; }
    double at(std::size_t i, std::size_t k = 0) const noexcept { return values[i * dim + k]; }
    /// Scalar component k as a contiguous copy.
    std::vector<double> component(std::size_t k) const;
};

struct CoupledPair {
    Trajectory a;
    Trajectory b;
    bool shared_noise = false;
};

/// Number of grid steps for horizon T; rejects T <= 0, dt <= 0 and dt not
/// dividing T to within 1e-9 relative.
std::size_t grid_steps(double T, double dt);

Trajectory brownian_path(std::size_t d, double T, double dt, SeedContext& ctx);

/// Exact Ornstein-Uhlenbeck transition dX = -kappa X dt + dB. `noise_scale`
/// multiplies every Gaussian increment (0 gives the deterministic flow).
Trajectory ou_path(double kappa, std::span<const double> x0, double T, double dt, SeedContext& ctx,
                   double noise_scale = 1.0);

/// Drift b(t, x) writing into `out` (same dimension as x).
using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// Euler-Maruyama for dX = b(t, X) dt + sigma dB with constant d x d `sigma`
/// (row-major). Throws TrialAborted on a non-finite state.
Trajectory sde_euler_path(const DriftFn& drift, std::span<const double> sigma, std::span<const double> x0, double T,
                          double dt, SeedContext& ctx);

/// Homogeneous Poisson process; values hold N_t on the grid, jump_times the
/// exact arrival times in [0, T].
Trajectory poisson_path(double rate, double T, double dt, SeedContext& ctx);

/// (X, Y) with dX = -alpha X dt + dB (exact transition) and
/// dY = (-beta Y + X) dt integrated by the exponential trapezoid rule.
Trajectory degenerate_pair_path(double alpha, double beta, double x, double y, double T, double dt, SeedContext& ctx,
                                double noise_scale = 1.0);

/// Compactly supported law for the stochastic-approximation noise W_t.
struct NoiseLaw {
    double support_lo = -1.0;
    double support_hi = 1.0;
    std::function<double(SeedContext&)> sample;

    static NoiseLaw uniform(double lo, double hi);
};

struct PolyakConfig {
    double lambda = 0.5;
    double p = 0.25;
    std::function<double(double x, double w)> g;
    NoiseLaw w_law;
    double x0 = 1.0;
    double mbar = 1.0;
    double Mbar = 1.0;
    /// g*(x) = sup over the support of |g(x, w)|; enables the C_t record.
    std::function<double(double x)> g_star;
    /// sup_{|x| <= r} g*(x); enables the deterministic envelope.
    std::function<double(double r)> g_star_ball_sup;

    double step(std::size_t t) const;  ///< alpha_t = lambda t^{-p}, t >= 1
    void validate() const;
};

/// lambda <= (2 mbar / Mbar^2) T^p / (1 + T^p).
bool polyak_admissible(const PolyakConfig& cfg, std::size_t T);

struct PolyakPath {
    Trajectory traj;             ///< X_0..X_T on the unit grid
    std::vector<double> c_t;     ///< C_t = |alpha_t g*(X_{t-1})|, t = 1..T (index t-1); empty without g*
};

/// X_t = X_{t-1} - alpha_t g(X_{t-1}, W_t). With `bound_requested`, an
/// inadmissible step scale is rejected.
PolyakPath polyak_run(const PolyakConfig& cfg, std::size_t T, SeedContext& ctx, bool bound_requested = false);

/// R_0 = |x0|, R_{s+1} = R_s + alpha_{s+1} sup_{|x| <= R_s} g*(x); returns R_0..R_T.
std::vector<double> polyak_envelope(const PolyakConfig& cfg, std::size_t T);

/// Path generator used for synchronous couplings: the same SeedContext must
/// produce the same noise for any start.
using PathGenerator = std::function<Trajectory(std::span<const double> start, SeedContext& ctx)>;

/// Runs `gen` from both starts on copies of `ctx`, so both paths see the same noise.
CoupledPair couple(const PathGenerator& gen, std::span<const double> start_a, std::span<const double> start_b,
                   const SeedContext& ctx);

}  // namespace conc
