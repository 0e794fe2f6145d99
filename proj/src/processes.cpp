#include "conc/processes.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace conc {

namespace {

void require_finite(double v, const char* what, std::size_t step) {
    if (!std::isfinite(v)) throw TrialAborted(fmt::format("{}: non-finite state at step {}", what, step));
}

Trajectory make_grid(std::size_t dim, double dt, std::size_t n) {
    Trajectory traj;
    traj.dt = dt;
    traj.dim = dim;
    traj.values.assign((n + 1) * dim, 0.0);
    return traj;
}

}  // namespace

std::vector<double> Trajectory::component(std::size_t k) const {
    std::vector<double> out(steps() + 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, k);
    return out;
}

std::size_t grid_steps(double T, double dt) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive and finite");
    if (!(dt > 0.0)) throw std::invalid_argument("step dt must be positive");
    const double ratio = T / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::fabs(n * dt - T) > 1e-9 * T)
        throw std::invalid_argument(fmt::format("step dt={} does not divide horizon T={}", dt, T));
    return static_cast<std::size_t>(n);
}

Trajectory brownian_path(std::size_t d, double T, double dt, SeedContext& ctx) {
    if (d == 0) throw std::invalid_argument("brownian_path: dimension must be at least 1");
    const std::size_t n = grid_steps(T, dt);
    Trajectory traj = make_grid(d, dt, n);
    const double sd = std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) traj.values[(i + 1) * d + k] = traj.values[i * d + k] + sd * ctx.normal();
    return traj;
}

Trajectory ou_path(double kappa, std::span<const double> x0, double T, double dt, SeedContext& ctx,
                   double noise_scale) {
    if (!(kappa > 0.0)) throw std::invalid_argument("ou_path: kappa must be positive");
    if (x0.empty()) throw std::invalid_argument("ou_path: empty initial state");
    const std::size_t n = grid_steps(T, dt);
    const std::size_t d = x0.size();
    Trajectory traj = make_grid(d, dt, n);
    std::copy(x0.begin(), x0.end(), traj.values.begin());
    const double decay = std::exp(-kappa * dt);
    const double sd = noise_scale * std::sqrt(-std::expm1(-2.0 * kappa * dt) / (2.0 * kappa));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            traj.values[(i + 1) * d + k] = traj.values[i * d + k] * decay + sd * ctx.normal();
    return traj;
}

Trajectory sde_euler_path(const DriftFn& drift, std::span<const double> sigma, std::span<const double> x0, double T,
                          double dt, SeedContext& ctx) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("sde_euler_path: empty initial state");
    if (sigma.size() != d * d) throw std::invalid_argument("sde_euler_path: sigma must be d x d");
    const std::size_t n = grid_steps(T, dt);
    Trajectory traj = make_grid(d, dt, n);
    std::copy(x0.begin(), x0.end(), traj.values.begin());
    const double sd = std::sqrt(dt);
    std::vector<double> b(d), dB(d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> x{traj.values.data() + i * d, d};
        drift(traj.time(i), x, b);
        for (std::size_t k = 0; k < d; ++k) {
            require_finite(b[k], "sde_euler_path drift", i);
            dB[k] = sd * ctx.normal();
        }
        for (std::size_t r = 0; r < d; ++r) {
            double noise = 0.0;
            for (std::size_t c = 0; c < d; ++c) noise += sigma[r * d + c] * dB[c];
            const double next = x[r] + b[r] * dt + noise;
            require_finite(next, "sde_euler_path", i + 1);
            traj.values[(i + 1) * d + r] = next;
        }
    }
    return traj;
}

Trajectory poisson_path(double rate, double T, double dt, SeedContext& ctx) {
    if (!(rate > 0.0)) throw std::invalid_argument("poisson_path: rate must be positive");
    const std::size_t n = grid_steps(T, dt);
    Trajectory traj = make_grid(1, dt, n);
    std::vector<double> jumps;
    for (double t = ctx.exponential(rate); t <= T; t += ctx.exponential(rate)) jumps.push_back(t);
    std::size_t count = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = traj.time(i);
        while (count < jumps.size() && jumps[count] <= t) ++count;
        traj.values[i] = static_cast<double>(count);
    }
    traj.jump_times = std::move(jumps);
    return traj;
}

Trajectory degenerate_pair_path(double alpha, double beta, double x, double y, double T, double dt, SeedContext& ctx,
                                double noise_scale) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("degenerate_pair_path: alpha, beta must be positive");
    if (alpha == beta) throw std::invalid_argument("degenerate_pair_path: alpha == beta is not supported");
    const std::size_t n = grid_steps(T, dt);
    Trajectory traj = make_grid(2, dt, n);
    traj.values[0] = x;
    traj.values[1] = y;
    const double decay_x = std::exp(-alpha * dt);
    const double decay_y = std::exp(-beta * dt);
    const double sd = noise_scale * std::sqrt(-std::expm1(-2.0 * alpha * dt) / (2.0 * alpha));
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = traj.values[2 * i];
        const double yi = traj.values[2 * i + 1];
        const double xn = xi * decay_x + sd * ctx.normal();
        traj.values[2 * (i + 1)] = xn;
        traj.values[2 * (i + 1) + 1] = decay_y * yi + 0.5 * dt * (decay_y * xi + xn);
    }
    return traj;
}

NoiseLaw NoiseLaw::uniform(double lo, double hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("NoiseLaw::uniform: support must be a finite interval");
    return NoiseLaw{lo, hi, [lo, hi](SeedContext& ctx) { return lo + (hi - lo) * ctx.uniform(); }};
}

double PolyakConfig::step(std::size_t t) const { return lambda * std::pow(static_cast<double>(t), -p); }

void PolyakConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("PolyakConfig: lambda must be positive");
    if (!(p >= 0.0 && p < 0.5)) throw std::invalid_argument("PolyakConfig: p must lie in [0, 1/2)");
    if (!(mbar > 0.0 && mbar <= Mbar)) throw std::invalid_argument("PolyakConfig: need 0 < mbar <= Mbar");
    if (!g) throw std::invalid_argument("PolyakConfig: g is not set");
    if (!w_law.sample) throw std::invalid_argument("PolyakConfig: noise sampler is not set");
    if (!std::isfinite(w_law.support_lo) || !std::isfinite(w_law.support_hi) || w_law.support_lo > w_law.support_hi)
        throw std::invalid_argument("PolyakConfig: noise law must have compact support");
}

bool polyak_admissible(const PolyakConfig& cfg, std::size_t T) {
    const double tp = std::pow(static_cast<double>(T), cfg.p);
    return cfg.lambda <= 2.0 * cfg.mbar / (cfg.Mbar * cfg.Mbar) * tp / (1.0 + tp);
}

PolyakPath polyak_run(const PolyakConfig& cfg, std::size_t T, SeedContext& ctx, bool bound_requested) {
    cfg.validate();
    if (T < 1) throw std::invalid_argument("polyak_run: horizon must be at least 1");
    if (bound_requested && !polyak_admissible(cfg, T))
        throw std::invalid_argument(fmt::format("polyak_run: lambda={} is not admissible for T={}", cfg.lambda, T));
    PolyakPath out;
    out.traj = make_grid(1, 1.0, T);
    out.traj.values[0] = cfg.x0;
    if (cfg.g_star) out.c_t.resize(T);
    for (std::size_t t = 1; t <= T; ++t) {
        const double prev = out.traj.values[t - 1];
        const double alpha = cfg.step(t);
        const double w = cfg.w_law.sample(ctx);
        const double next = prev - alpha * cfg.g(prev, w);
        require_finite(next, "polyak_run", t);
        out.traj.values[t] = next;
        if (cfg.g_star) out.c_t[t - 1] = std::fabs(alpha * cfg.g_star(prev));
    }
    return out;
}

std::vector<double> polyak_envelope(const PolyakConfig& cfg, std::size_t T) {
    if (!cfg.g_star_ball_sup) throw std::invalid_argument("polyak_envelope: g_star_ball_sup is not set");
    std::vector<double> r(T + 1);
    r[0] = std::fabs(cfg.x0);
    for (std::size_t s = 0; s < T; ++s) r[s + 1] = r[s] + cfg.step(s + 1) * cfg.g_star_ball_sup(r[s]);
    return r;
}

CoupledPair couple(const PathGenerator& gen, std::span<const double> start_a, std::span<const double> start_b,
                   const SeedContext& ctx) {
    if (start_a.size() != start_b.size()) throw std::invalid_argument("couple: starts differ in dimension");
    SeedContext ctx_a = ctx;
    SeedContext ctx_b = ctx;
    CoupledPair pair{gen(start_a, ctx_a), gen(start_b, ctx_b), true};
    if (pair.a.t0 != pair.b.t0 || pair.a.dt != pair.b.dt || pair.a.dim != pair.b.dim ||
        pair.a.values.size() != pair.b.values.size())
        throw std::invalid_argument("couple: generated paths do not share a grid");
    return pair;
}

}  // namespace conc
