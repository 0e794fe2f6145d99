#include "scenario_kernel.hpp"

#include "conc/bounds.hpp"
#include "conc/estimators.hpp"
#include "conc/functionals.hpp"
#include "conc/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace conc {
namespace detail {
namespace {

class Params {
public:
    explicit Params(const ScenarioSpec& spec) : spec_(spec) {}

    double get(const std::string& key) const {
        auto it = spec_.params.find(key);
        if (it == spec_.params.end())
            throw std::invalid_argument(fmt::format("{}: missing parameter '{}'", spec_.name, key));
        return it->second;
    }
    double positive(const std::string& key) const {
        const double v = get(key);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(fmt::format("{}: parameter '{}' must be positive", spec_.name, key));
        return v;
    }
    std::size_t count(const std::string& key) const {
        const double v = positive(key);
        if (v != std::floor(v) || v > 1e9)
            throw std::invalid_argument(fmt::format("{}: parameter '{}' must be a positive integer", spec_.name, key));
        return static_cast<std::size_t>(v);
    }
    bool flag(const std::string& key) const {
        const double v = get(key);
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument(fmt::format("{}: parameter '{}' must be 0 or 1", spec_.name, key));
        return v == 1.0;
    }
    double step(double T) const {
        const double dt = spec_.dt.value_or(T / 1000.0);
        grid_steps(T, dt);
        return dt;
    }
    void unit_step() const {
        if (spec_.dt && *spec_.dt != 1.0)
            throw std::invalid_argument(fmt::format("{}: discrete-time scenario runs on the unit grid", spec_.name));
    }

private:
    const ScenarioSpec& spec_;
};

double sq(double x) { return x * x; }

double first(double, std::span<const double> x) { return x[0]; }

double norm2(double, std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

/// Sum of g(t_i) dt over the left-point grid i = 0..n-1.
template <class G>
double grid_sum(std::size_t n, double dt, G g) {
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = g(static_cast<double>(i) * dt) * dt;
    return compensated_sum(terms);
}

class BrownianAvg final : public ScenarioKernel {
public:
    explicit BrownianAvg(const Params& p) : T_(p.positive("T")), dt_(p.step(T_)) {}
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const Trajectory path = brownian_path(1, T_, dt_, ctx);
        const double S = additive_functional(path, first);
        const double T = T_;
        const double qv = weighted_realized_qv(path, [T, dt = dt_](double u) { return sq(T - u - dt); });
        return {S / (T_ * T_), true, qv};
    }
    BoundValue bound(double R) const override {
        // Stated form exp(-3 R^2 T); the sub-Gaussian route with <M>_T = T^3/3 gives exp(-3 R^2 T / 2).
        BoundValue b = gaussian_tail(R * T_ * T_, std::pow(T_, 3) / 6.0);
        const BoundValue derived = gaussian_tail(R * T_ * T_, std::pow(T_, 3) / 3.0);
        b.params["pqv"] = std::pow(T_, 3) / 3.0;
        b.params["subgaussian_route_value"] = derived.value;
        return b;
    }
    std::string event() const override { return "T^-2 int_0^T B dt >= R"; }
    std::string side_condition() const override { return "closed-form pQV T^3/3 <= T^3/3 (holds surely)"; }
    std::string aux_name() const override { return "realized_weighted_qv"; }

private:
    double T_, dt_;
};

class PoissonAvg final : public ScenarioKernel {
public:
    explicit PoissonAvg(const Params& p) : rate_(p.positive("rate")), T_(p.positive("T")), dt_(p.step(T_)) {
        mean_ = grid_sum(grid_steps(T_, dt_), dt_, [this](double t) { return rate_ * t; });
        m_ = rate_ * std::pow(T_, 3) / 3.0;
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const Trajectory path = poisson_path(rate_, T_, dt_, ctx);
        const double S = additive_functional(path, first);
        // Jumps of M^T are T - tau; H^a with a = T adds the squares of those above a.
        std::vector<double> jumps;
        for (double tau : *path.jump_times) jumps.push_back(T_ - tau);
        const FunctionalStats st = h_a_statistic(jumps, T_, m_);
        return {(S - mean_) / (T_ * T_), st.H_a <= m_, st.max_jump};
    }
    BoundValue bound(double R) const override { return bennett_tail(R * T_ * T_, m_, T_); }
    std::string event() const override { return "T^-2 (int_0^T N dt - E) >= R"; }
    std::string side_condition() const override {
        return "H^a_T = rate T^3/3 + sum (dM)^2 1{dM > T} <= rate T^3/3, jumps of M realized";
    }
    std::string aux_name() const override { return "max_martingale_jump"; }

private:
    double rate_, T_, dt_, mean_ = 0.0, m_ = 0.0;
};

class BmSquared final : public ScenarioKernel {
public:
    explicit BmSquared(const Params& p)
        : T_(p.positive("T")), dt_(p.step(T_)), C_(p.get("C")), D_(p.get("D")) {
        const std::size_t n = grid_steps(T_, dt_);
        mean_S_ = grid_sum(n, dt_, [](double t) { return t; });
        mean_H0_ = grid_sum(n, dt_, [this](double t) { return 4.0 * sq(T_ - t) * t; });
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const Trajectory path = brownian_path(1, T_, dt_, ctx);
        const double S = additive_functional(path, [](double, std::span<const double> x) { return x[0] * x[0]; });
        const double H0 = additive_functional(
            path, [T = T_](double t, std::span<const double> x) { return 4.0 * sq(T - t) * x[0] * x[0]; });
        const double dev = std::fabs(S - mean_S_);
        const double T2 = T_ * T_;
        const bool ok = H0 + mean_H0_ <= C_ * T2 * dev + D_ * T2 * T2;
        return {dev / T2, ok, H0};
    }
    BoundValue bound(double R) const override {
        const double T2 = T_ * T_;
        BoundValue b = selfnorm_cd_tail(R * T2, C_ * T2, D_ * T2 * T2);
        b.params["C_per_T2"] = C_;
        b.params["D_per_T4"] = D_;
        return b;
    }
    std::string event() const override { return "|T^-2 (int_0^T B^2 dt - E)| >= R"; }
    std::string side_condition() const override {
        return "H^0_T + E H^0_T <= C T^2 |S_T - E S_T| + D T^4 with H^0_T = 4 int (T-t)^2 B^2 dt realized";
    }
    std::string aux_name() const override { return "H0"; }

private:
    double T_, dt_, C_, D_, mean_S_ = 0.0, mean_H0_ = 0.0;
};

/// OU started at (x, 0, ..., 0) with S_T = int |X|^2 dt.
class OuSquaredBase : public ScenarioKernel {
public:
    explicit OuSquaredBase(const Params& p)
        : kappa_(p.positive("kappa")), d_(p.count("d")), x_(p.get("x")), T_(p.positive("T")), dt_(p.step(T_)) {
        start_.assign(d_, 0.0);
        start_[0] = x_;
        const double dd = static_cast<double>(d_);
        mean_S_ = grid_sum(grid_steps(T_, dt_), dt_, [this, dd](double t) { return second_moment(t, dd); });
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const Trajectory path = ou_path(kappa_, start_, T_, dt_, ctx);
        const double S = additive_functional(path, norm2);
        const double H0 = additive_functional(path, [k = kappa_, T = T_](double t, std::span<const double> x) {
            return norm2(t, x) * sq(-std::expm1(-2.0 * k * (T - t))) / (k * k);
        });
        return {std::fabs(S - mean_S_) / T_, H0 <= S / (kappa_ * kappa_), H0};
    }
    std::string event() const override { return "|T^-1 (int_0^T |X|^2 dt - E)| >= R"; }
    std::string side_condition() const override {
        return "H^0_T = int |X|^2 (1 - e^{-2 kappa (T-t)})^2 / kappa^2 dt <= S_T / kappa^2 (holds surely)";
    }
    std::string aux_name() const override { return "H0"; }

protected:
    double second_moment(double t, double dd) const {
        const double e = std::exp(-2.0 * kappa_ * t);
        return x_ * x_ * e + dd * (-std::expm1(-2.0 * kappa_ * t)) / (2.0 * kappa_);
    }

    double kappa_;
    std::size_t d_;
    double x_, T_, dt_;
    std::vector<double> start_;
    double mean_S_ = 0.0;
};

class OuSquared final : public OuSquaredBase {
public:
    using OuSquaredBase::OuSquaredBase;
    BoundValue bound(double R) const override {
        return ou_squared_bound(R, T_, kappa_, static_cast<double>(d_), x_ * x_);
    }
};

class SquaredLipschitzOu final : public OuSquaredBase {
public:
    explicit SquaredLipschitzOu(const Params& p) : OuSquaredBase(p), sigma_(p.positive("sigma")) {
        // E S_T / T for the continuous path.
        const double dd = static_cast<double>(d_);
        const double k2 = 2.0 * kappa_;
        const double decay = -std::expm1(-k2 * T_) / k2;
        mean_ST_over_T_ = (x_ * x_ * decay + dd / k2 * (T_ - decay)) / T_;
    }
    BoundValue bound(double R) const override {
        BoundValue b = squared_lipschitz_bound(R, T_, sigma_, kappa_, kappa_, std::sqrt(static_cast<double>(d_)),
                                               mean_ST_over_T_);
        b.params["ou_instance_value"] = ou_squared_lipschitz_instance(R, T_, kappa_, static_cast<double>(d_)).value;
        return b;
    }
    std::string side_condition() const override { return "none (unconditional statement)"; }

private:
    double sigma_;
    double mean_ST_over_T_ = 0.0;
};

class DegeneratePair final : public ScenarioKernel {
public:
    explicit DegeneratePair(const Params& p)
        : alpha_(p.positive("alpha")), beta_(p.positive("beta")), x_(p.get("x")), y_(p.get("y")),
          T_(p.positive("T")), dt_(p.step(T_)) {
        if (alpha_ == beta_) throw std::invalid_argument("degenerate_pair: alpha == beta is not supported");
        SeedContext quiet;
        const Trajectory mean_path = degenerate_pair_path(alpha_, beta_, x_, y_, T_, dt_, quiet, 0.0);
        mean_S_ = additive_functional(mean_path, second);
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const Trajectory path = degenerate_pair_path(alpha_, beta_, x_, y_, T_, dt_, ctx);
        return {(additive_functional(path, second) - mean_S_) / T_, true, path.at(path.steps(), 1)};
    }
    BoundValue bound(double R) const override { return degenerate_bound(R, T_, alpha_, beta_); }
    std::string event() const override { return "T^-1 (int_0^T Y dt - E) >= R"; }
    std::string side_condition() const override { return "none (unconditional statement)"; }
    std::string aux_name() const override { return "Y_T"; }

private:
    static double second(double, std::span<const double> x) { return x[1]; }
    double alpha_, beta_, x_, y_, T_, dt_, mean_S_ = 0.0;
};

/// g(x, w) = x - w with W uniform on [w_lo, w_hi]; shared by the two
/// stochastic-approximation scenarios.
struct PolyakSetup {
    PolyakConfig cfg;
    std::size_t T = 0;
    double G = 0.0;
    std::vector<double> mean;  ///< E X_t, t = 0..T

    explicit PolyakSetup(const Params& p, const std::string& name) {
        p.unit_step();
        const double lo = p.get("w_lo");
        const double hi = p.get("w_hi");
        cfg.lambda = p.positive("lambda");
        cfg.p = p.get("p");
        cfg.x0 = p.get("x0");
        cfg.mbar = p.positive("mbar");
        cfg.Mbar = p.positive("Mbar");
        if (cfg.mbar > 1.0 || cfg.Mbar < 1.0)
            throw std::invalid_argument(name + ": g(x, w) = x - w has derivative 1, so need mbar <= 1 <= Mbar");
        cfg.w_law = NoiseLaw::uniform(lo, hi);
        cfg.g = [](double x, double w) { return x - w; };
        cfg.g_star = [lo, hi](double x) { return std::max(std::fabs(x - lo), std::fabs(x - hi)); };
        cfg.g_star_ball_sup = [lo, hi](double r) { return r + std::max(std::fabs(lo), std::fabs(hi)); };
        cfg.validate();
        T = p.count("T");
        if (cfg.step(1) > 1.0) throw std::invalid_argument(name + ": lambda must not exceed 1");
        // With alpha_t <= 1 every iterate is a convex combination of x0 and noise draws.
        const double wmax = std::max(std::fabs(lo), std::fabs(hi));
        G = p.get("G");
        if (G == 0.0) G = std::max(std::fabs(cfg.x0), wmax) + wmax;
        if (!(G > 0.0)) throw std::invalid_argument(name + ": G must be positive (0 selects the envelope)");
        const double wbar = 0.5 * (lo + hi);
        mean.resize(T + 1);
        mean[0] = cfg.x0;
        for (std::size_t t = 1; t <= T; ++t) mean[t] = mean[t - 1] - cfg.step(t) * (mean[t - 1] - wbar);
    }

    double path_gstar_max(const Trajectory& traj) const {
        double m = 0.0;
        for (double x : traj.values) m = std::max(m, cfg.g_star(x));
        return m;
    }
};

class PolyakRuppert final : public ScenarioKernel {
public:
    explicit PolyakRuppert(const Params& p) : s_(p, "polyak_ruppert") {
        if (!polyak_admissible(s_.cfg, s_.T))
            throw std::invalid_argument(fmt::format("polyak_ruppert: lambda={} is not admissible for T={}",
                                                    s_.cfg.lambda, s_.T));
        std::vector<double> head(s_.mean.begin(), s_.mean.end() - 1);
        mean_avg_ = compensated_sum(head) / static_cast<double>(s_.T);
    }
    double dt() const override { return 1.0; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const PolyakPath run = polyak_run(s_.cfg, s_.T, ctx, true);
        std::vector<double> head(run.traj.values.begin(), run.traj.values.end() - 1);
        const double avg = compensated_sum(head) / static_cast<double>(s_.T);
        const double gmax = s_.path_gstar_max(run.traj);
        return {avg - mean_avg_, gmax <= s_.G, gmax};
    }
    BoundValue bound(double R) const override {
        BoundValue b = polyak_bound(R, static_cast<double>(s_.T), s_.cfg.p, s_.cfg.mbar, s_.G);
        b.params["lambda"] = s_.cfg.lambda;
        b.params["lambda_max"] = polyak_lambda_max(static_cast<double>(s_.T), s_.cfg.p, s_.cfg.mbar, s_.cfg.Mbar);
        return b;
    }
    std::string event() const override { return "T^-1 sum_{t<T} X_t - E >= R"; }
    std::string side_condition() const override { return "sup_{t<=T} g*(X_t) <= G, realized per path"; }
    std::string aux_name() const override { return "path_gstar_max"; }

private:
    PolyakSetup s_;
    double mean_avg_ = 0.0;
};

class DiscreteChain final : public ScenarioKernel {
public:
    explicit DiscreteChain(const Params& p) : s_(p, "discrete_chain") {
        const double aT = s_.cfg.step(s_.T);
        if (s_.cfg.step(1) + aT > 2.0 * s_.cfg.mbar / sq(s_.cfg.Mbar))
            throw std::invalid_argument("discrete_chain: need alpha_1 + alpha_T <= 2 mbar / Mbar^2");
        kappa_T_ = aT * (s_.cfg.mbar - 0.5 * aT * sq(s_.cfg.Mbar));
        if (!(kappa_T_ > 0.0 && kappa_T_ < 1.0)) throw std::invalid_argument("discrete_chain: kappa_T must lie in (0, 1)");
        a2_ = p.get("a2");
        if (a2_ == 0.0) {
            std::vector<double> terms(s_.T);
            for (std::size_t t = 1; t <= s_.T; ++t) terms[t - 1] = std::pow(static_cast<double>(t), -2.0 * s_.cfg.p);
            a2_ = sq(s_.cfg.lambda * s_.G / kappa_T_) * compensated_sum(terms);
        }
        if (!(a2_ > 0.0)) throw std::invalid_argument("discrete_chain: a2 must be positive (0 selects the default)");
        std::vector<double> tail(s_.mean.begin() + 1, s_.mean.end());
        mean_S_ = compensated_sum(tail);
    }
    double dt() const override { return 1.0; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const PolyakPath run = polyak_run(s_.cfg, s_.T, ctx);
        const double S = discrete_additive_functional(run.traj, first);
        std::vector<double> sq_terms(run.c_t.size());
        for (std::size_t i = 0; i < run.c_t.size(); ++i) sq_terms[i] = sq(run.c_t[i] / kappa_T_);
        const double sum_c2 = compensated_sum(sq_terms);
        return {S - mean_S_, sum_c2 <= a2_, sum_c2};
    }
    BoundValue bound(double R) const override {
        BoundValue b = azuma_tail(R, a2_);
        b.params["kappa_T"] = kappa_T_;
        return b;
    }
    std::string event() const override { return "sum_{u=1}^T X_u - E >= R"; }
    std::string side_condition() const override { return "sum_t C_t^2 / kappa_T^2 <= a2, C_t = alpha_t g*(X_{t-1}) realized"; }
    std::string aux_name() const override { return "sum_C2_over_kappa2"; }

private:
    PolyakSetup s_;
    double kappa_T_ = 0.0, a2_ = 0.0, mean_S_ = 0.0;
};

/// dX = -kappa X dt + dB in one dimension with f(x) = lip * x.
class ContractiveSde : public ScenarioKernel {
public:
    explicit ContractiveSde(const Params& p)
        : kappa_(p.positive("kappa")), x0_(p.get("x0")), T_(p.positive("T")), dt_(p.step(T_)),
          rho_(p.positive("rho")), C_(p.get("C")), lip_(p.positive("lip")), euler_(p.flag("euler")) {
        if (C_ < 0.0) throw std::invalid_argument("contractive SDE: C must be non-negative");
        const double step_decay = 1.0 - kappa_ * dt_;
        mean_S_ = grid_sum(grid_steps(T_, dt_), dt_, [&](double t) {
            if (!euler_) return x0_ * std::exp(-kappa_ * t);
            return x0_ * std::pow(step_decay, std::round(t / dt_));
        });
    }
    double dt() const override { return dt_; }
    BoundValue bound(double R) const override { return lipschitz_sde_bound(R, T_, rho_, kappa_, C_, lip_); }
    std::string side_condition() const override { return "none (unconditional statement)"; }

protected:
    double sample_S(SeedContext& ctx) const {
        const double start[1] = {x0_};
        if (!euler_) return additive_functional(ou_path(kappa_, start, T_, dt_, ctx), first);
        const double sigma[1] = {1.0};
        const DriftFn drift = [k = kappa_](double, std::span<const double> x, std::span<double> out) {
            out[0] = -k * x[0];
        };
        return additive_functional(sde_euler_path(drift, sigma, start, T_, dt_, ctx), first);
    }

    double kappa_, x0_, T_, dt_, rho_, C_, lip_;
    bool euler_;
    double mean_S_ = 0.0;
};

class ContractiveSdeLipschitz final : public ContractiveSde {
public:
    using ContractiveSde::ContractiveSde;
    TrialRecord simulate(SeedContext& ctx) const override {
        return {lip_ * (sample_S(ctx) - mean_S_) / T_, true, 0.0};
    }
    std::string event() const override { return "T^-1 (int_0^T f(X) dt - E) >= R"; }
};

/// W1(N(0, s^2), delta_x) = E|Z - x|, the folded-normal mean.
double folded_normal_mean(double s, double x) {
    const double ax = std::fabs(x);
    const double phi_tail = 0.5 * std::erfc(ax / (s * std::numbers::sqrt2));
    return s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-ax * ax / (2.0 * s * s)) + ax * (1.0 - 2.0 * phi_tail);
}

class ContractiveSdeLipschitzMu final : public ContractiveSde {
public:
    explicit ContractiveSdeLipschitzMu(const Params& p) : ContractiveSde(p) {
        w1_ = folded_normal_mean(std::sqrt(0.5 / kappa_), x0_);
        shift_ = lipschitz_sde_mu_shift(T_, rho_, kappa_, lip_, w1_);
    }
    TrialRecord simulate(SeedContext& ctx) const override {
        // The stationary law N(0, 1/(2 kappa)) has mean(f) = 0.
        return {lip_ * sample_S(ctx) / T_, true, 0.0};
    }
    double threshold(double R) const override { return R + shift_; }
    BoundValue bound(double R) const override {
        BoundValue b = ContractiveSde::bound(R);
        b.params["W1"] = w1_;
        b.params["shift"] = shift_;
        return b;
    }
    std::string event() const override { return "T^-1 int_0^T f(X) dt - mu(f) >= R + shift"; }

private:
    double w1_ = 0.0, shift_ = 0.0;
};

/// X = s B; verdict on the joint event with the realized weighted QV.
class MartingaleGeneric final : public ScenarioKernel {
public:
    explicit MartingaleGeneric(const Params& p)
        : s_(p.positive("s")), T_(p.positive("T")), dt_(p.step(T_)), sigma2_(p.get("sigma2")) {
        if (sigma2_ == 0.0) sigma2_ = s_ * s_ * std::pow(T_, 3) / 3.0;
        if (!(sigma2_ > 0.0)) throw std::invalid_argument("martingale_generic: sigma2 must be positive");
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        Trajectory path = brownian_path(1, T_, dt_, ctx);
        for (double& v : path.values) v *= s_;
        const double S = additive_functional(path, first);
        const double qv = weighted_realized_qv(path, [T = T_, dt = dt_](double u) { return sq(T - u - dt); });
        return {S, qv <= sigma2_, qv};
    }
    BoundValue bound(double R) const override { return gaussian_tail(R, sigma2_); }
    std::string event() const override { return "int_0^T X dt >= R"; }
    std::string side_condition() const override { return "sum (T - t_{i+1})^2 (dX_i)^2 <= sigma2, realized"; }
    std::string aux_name() const override { return "realized_weighted_qv"; }

private:
    double s_, T_, dt_, sigma2_;
};

/// Gaussian martingale with d<X>_u = sigma2 k(T - u) du, sampled from exact increments.
class KernelMartingale : public ScenarioKernel {
public:
    KernelMartingale(double T, double dt) : T_(T), dt_(dt) {}
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const std::size_t n = grid_steps(T_, dt_);
        Trajectory path;
        path.dt = dt_;
        path.values.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) path.values[i + 1] = path.values[i] + sd_[i] * ctx.normal();
        return {additive_functional(path, first) / scale_, true, path.values[n]};
    }
    std::string side_condition() const override { return "deterministic pQV kernel (holds surely)"; }
    std::string aux_name() const override { return "X_T"; }

protected:
    /// `mass(a, b)` is the pQV accumulated on [a, b].
    template <class Mass>
    void init(Mass mass, double scale) {
        const std::size_t n = grid_steps(T_, dt_);
        sd_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = static_cast<double>(i) * dt_;
            sd_[i] = std::sqrt(mass(a, std::min(T_, a + dt_)));
        }
        scale_ = scale;
    }

    double T_, dt_;
    std::vector<double> sd_;
    double scale_ = 1.0;
};

class PolyKernel final : public KernelMartingale {
public:
    explicit PolyKernel(const Params& p)
        : KernelMartingale(p.positive("T"), p.step(p.positive("T"))), sigma2_(p.positive("sigma2")),
          alpha_(p.get("alpha")) {
        if (!(alpha_ > -1.0)) throw std::invalid_argument("martingale_poly_kernel: alpha must exceed -1");
        const double e = alpha_ + 1.0;
        init([&](double a, double b) { return sigma2_ * (std::pow(T_ - a, e) - std::pow(T_ - b, e)) / e; },
             std::pow(T_, 2.0 + 0.5 * alpha_));
    }
    BoundValue bound(double R) const override { return poly_kernel_bound(R, T_, sigma2_, alpha_); }
    std::string event() const override { return "T^-(2 + alpha/2) int_0^T X dt >= R"; }

private:
    double sigma2_, alpha_;
};

class ExpKernel final : public KernelMartingale {
public:
    explicit ExpKernel(const Params& p) : KernelMartingale(p.positive("T"), p.step(p.positive("T"))) {
        init([&](double a, double b) { return std::exp(-(T_ - b)) - std::exp(-(T_ - a)); }, std::sqrt(T_));
    }
    BoundValue bound(double R) const override { return exp_kernel_bound(R, T_); }
    std::string event() const override { return "T^-1/2 int_0^T X dt >= R"; }
};

/// Doleans-Dade check: the grid holds lambda, each row the mean of
/// exp(lambda S_T - penalty).
class MartMgf final : public ScenarioKernel {
public:
    explicit MartMgf(const Params& p)
        : T_(p.positive("T")), dt_(p.step(T_)), lemma_form_(p.flag("lemma_form")) {}
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        return {additive_functional(brownian_path(1, T_, dt_, ctx), first), true, 0.0};
    }
    BoundValue bound(double lambda) const override {
        BoundValue b;
        b.value = b.raw = 1.0;
        b.family = BoundFamily::composite;
        b.params = {{"lambda", lambda}, {"penalty", penalty(lambda)}, {"raw", 1.0}};
        return b;
    }
    ScenarioRow evaluate(double lambda, std::span<const TrialRecord> records, double level) const override {
        std::vector<double> exponents;
        exponents.reserve(records.size());
        const double pen = penalty(lambda);
        for (const TrialRecord& r : records)
            if (!r.aborted) exponents.push_back(lambda * r.deviation - pen);
        const MgfCheck check = mgf_check(exponents, level);
        ScenarioRow row;
        row.R = lambda;
        row.bound = bound(lambda);
        row.estimate.successes = check.used;
        row.estimate.trials = exponents.size();
        row.estimate.point = check.mean;
        row.estimate.ci_low = check.ci_low;
        row.estimate.ci_high = check.ci_high;
        row.estimate.level = level;
        row.marginal_successes = row.joint_successes = check.used;
        row.status = !check.pass ? VerdictStatus::violation
                                 : (check.ci_high <= 1.0 ? VerdictStatus::dominated : VerdictStatus::inconclusive);
        return row;
    }
    std::string event() const override { return "E exp(lambda S_T - penalty) <= 1; R column holds lambda"; }
    std::string side_condition() const override {
        return lemma_form_ ? "penalty phi_0(lambda) <M>_T = lambda^2 T^3 / 6" : "penalty lambda^2 <M>_T = lambda^2 T^3 / 3";
    }

private:
    double penalty(double lambda) const {
        const double pqv = std::pow(T_, 3) / 3.0;
        return lemma_form_ ? eval_phi_a(0.0, std::fabs(lambda)) * pqv : lambda * lambda * pqv;
    }
    double T_, dt_;
    bool lemma_form_;
};

/// OU with f(x) = c x and the closed-form resolvent; deviation (M_T - M_0) / T.
class ResolventMart final : public ScenarioKernel {
public:
    explicit ResolventMart(const Params& p)
        : kappa_(p.positive("kappa")), x0_(p.get("x0")), c_(p.get("c")), T_(p.positive("T")), dt_(p.step(T_)),
          spec_(ResolventSpec::ou_linear(kappa_, c_, T_)) {
        if (c_ == 0.0) throw std::invalid_argument("resolvent_mart: c must be non-zero");
        v_ = pqv_exp_decay_envelope(c_, kappa_, T_, T_);
    }
    double dt() const override { return dt_; }
    TrialRecord simulate(SeedContext& ctx) const override {
        const double start[1] = {x0_};
        const Trajectory path = ou_path(kappa_, start, T_, dt_, ctx);
        const Observable f = [c = c_](double, std::span<const double> x) { return c * x[0]; };
        const std::vector<double> M = auxiliary_martingale_path(path, f, spec_);
        const double S = additive_functional(path, f);
        return {(M.back() - M.front()) / T_, true, std::fabs(M.back() - S)};
    }
    BoundValue bound(double R) const override {
        BoundValue b = gaussian_tail(R * T_, v_);
        b.params["sigma_kappa_value"] = std::min(1.0, std::exp(-kappa_ * kappa_ * R * R * T_ / (2.0 * c_ * c_)));
        return b;
    }
    std::string event() const override { return "T^-1 (M^T_T - M^T_0) >= R"; }
    std::string side_condition() const override {
        return "<M^T>_T <= v = int_0^T (c/kappa)^2 (1 - e^{-kappa (T-s)})^2 ds (holds surely)";
    }
    std::string aux_name() const override { return "terminal_identity_gap"; }

private:
    double kappa_, x0_, c_, T_, dt_;
    ResolventSpec spec_;
    double v_ = 0.0;
};

}  // namespace

ScenarioRow ScenarioKernel::evaluate(double R, std::span<const TrialRecord> records, double level) const {
    const double thr = threshold(R);
    std::size_t n = 0, marginal = 0, joint = 0;
    for (const TrialRecord& r : records) {
        if (r.aborted) continue;
        ++n;
        if (r.deviation >= thr) {
            ++marginal;
            if (r.side_ok) ++joint;
        }
    }
    ScenarioRow row;
    row.R = R;
    row.marginal_successes = marginal;
    row.joint_successes = joint;
    row.estimate = mc_tail(joint, n, level);
    const Verdict v = domination(bound(R), row.estimate);
    row.bound = v.bound;
    row.status = v.status;
    return row;
}

void ScenarioKernel::summarize(std::span<const TrialRecord> records, std::map<std::string, double>& extras) const {
    std::vector<double> dev, aux;
    std::size_t side = 0;
    double aux_max = -std::numeric_limits<double>::infinity();
    for (const TrialRecord& r : records) {
        if (r.aborted) continue;
        dev.push_back(r.deviation);
        aux.push_back(r.aux);
        aux_max = std::max(aux_max, r.aux);
        if (r.side_ok) ++side;
    }
    if (dev.empty()) return;
    const double n = static_cast<double>(dev.size());
    const double mean = compensated_sum(dev) / n;
    std::vector<double> centred(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) centred[i] = sq(dev[i] - mean);
    extras["deviation_mean"] = mean;
    extras["deviation_variance"] = dev.size() > 1 ? compensated_sum(centred) / (n - 1.0) : 0.0;
    extras["side_condition_rate"] = static_cast<double>(side) / n;
    extras[aux_name() + "_mean"] = compensated_sum(aux) / n;
    extras[aux_name() + "_max"] = aux_max;
}

std::unique_ptr<ScenarioKernel> make_kernel(const ScenarioSpec& spec) {
    const Params p(spec);
    const std::string& n = spec.name;
    if (n == "brownian_avg") return std::make_unique<BrownianAvg>(p);
    if (n == "poisson_avg") return std::make_unique<PoissonAvg>(p);
    if (n == "bm_squared") return std::make_unique<BmSquared>(p);
    if (n == "ou_squared") return std::make_unique<OuSquared>(p);
    if (n == "squared_lipschitz_ou") return std::make_unique<SquaredLipschitzOu>(p);
    if (n == "degenerate_pair") return std::make_unique<DegeneratePair>(p);
    if (n == "polyak_ruppert") return std::make_unique<PolyakRuppert>(p);
    if (n == "discrete_chain") return std::make_unique<DiscreteChain>(p);
    if (n == "contractive_sde_lipschitz") return std::make_unique<ContractiveSdeLipschitz>(p);
    if (n == "contractive_sde_lipschitz_mu") return std::make_unique<ContractiveSdeLipschitzMu>(p);
    if (n == "martingale_generic") return std::make_unique<MartingaleGeneric>(p);
    if (n == "martingale_poly_kernel") return std::make_unique<PolyKernel>(p);
    if (n == "martingale_exp_kernel") return std::make_unique<ExpKernel>(p);
    if (n == "mart_mgf") return std::make_unique<MartMgf>(p);
    if (n == "resolvent_mart") return std::make_unique<ResolventMart>(p);
    throw UnknownScenario("unknown scenario '" + n + "'");
}

}  // namespace detail

std::vector<ScenarioSpec> registry() {
    using N = Normalization;
    auto make = [](std::string name, std::string summary, std::map<std::string, double> params,
                   std::vector<double> grid, N norm) {
        ScenarioSpec s;
        s.name = std::move(name);
        s.summary = std::move(summary);
        s.params = std::move(params);
        s.R_grid = std::move(grid);
        s.normalization = norm;
        return s;
    };
    const std::map<std::string, double> polyak = {{"lambda", 0.5}, {"p", 0.25}, {"T", 1000}, {"x0", 1.0},
                                                  {"mbar", 1.0},   {"Mbar", 1.0}, {"w_lo", -1.0}, {"w_hi", 1.0},
                                                  {"G", 0.0}};
    std::map<std::string, double> chain = polyak;
    chain["a2"] = 0.0;
    const std::map<std::string, double> sde = {{"kappa", 1.0}, {"x0", 1.0}, {"T", 10.0}, {"rho", 1.0},
                                               {"C", 0.0},     {"lip", 1.0}, {"euler", 0.0}};
    std::vector<ScenarioSpec> out = {
        make("brownian_avg", "time average of Brownian motion", {{"T", 1.0}}, {0.5, 1.0, 1.5}, N::t2_avg),
        make("poisson_avg", "time average of a Poisson process (Bennett)", {{"rate", 1.0}, {"T", 3.0}}, {0.2, 0.4},
             N::t2_avg),
        make("bm_squared", "squared Brownian motion, self-normalized two-sided bound",
             {{"T", 1.0}, {"C", 4.0}, {"D", 0.75}}, {1.0, 2.0, 4.0}, N::t2_avg),
        make("ou_squared", "squared norm of an Ornstein-Uhlenbeck process, two-sided",
             {{"kappa", 1.0}, {"d", 1.0}, {"x", 0.0}, {"T", 10.0}}, {0.5, 1.0}, N::time_avg),
        make("squared_lipschitz_ou", "Bernstein-type bound for squared observables, OU instance",
             {{"kappa", 1.0}, {"d", 1.0}, {"x", 0.0}, {"T", 10.0}, {"sigma", 1.0}}, {0.5, 1.0}, N::time_avg),
        make("degenerate_pair", "degenerate diffusion (X, Y) with f(X, Y) = Y",
             {{"alpha", 2.0}, {"beta", 1.0}, {"x", 0.0}, {"y", 0.0}, {"T", 10.0}}, {0.25, 0.5}, N::time_avg),
        make("polyak_ruppert", "averaged stochastic approximation iterates", polyak, {0.02, 0.05, 0.5, 1.0},
             N::time_avg),
        make("discrete_chain", "discrete-time Markov chain additive functional (Azuma route)", chain,
             {20.0, 50.0, 100.0}, N::raw),
        make("contractive_sde_lipschitz", "Lipschitz observable of a contractive SDE", sde, {0.25, 0.5, 1.0},
             N::time_avg),
        make("contractive_sde_lipschitz_mu", "Lipschitz observable centred at the invariant mean", sde,
             {0.25, 0.5, 1.0}, N::time_avg),
        make("martingale_generic", "time integral of a martingale on the joint QV event",
             {{"s", 1.0}, {"T", 1.0}, {"sigma2", 0.0}}, {0.5, 1.0, 1.5}, N::raw),
        make("martingale_poly_kernel", "martingale with polynomial pQV kernel",
             {{"T", 1.0}, {"sigma2", 1.0}, {"alpha", 1.0}}, {0.5, 1.0, 1.5}, N::power_avg),
        make("martingale_exp_kernel", "martingale with exponential pQV kernel", {{"T", 4.0}}, {0.5, 1.0, 1.5},
             N::sqrt_t_avg),
        make("mart_mgf", "exponential supermartingale check", {{"T", 1.0}, {"lemma_form", 0.0}},
             {-0.5, -0.25, 0.25, 0.5}, N::lambda),
        make("resolvent_mart", "auxiliary martingale from the OU-linear resolvent",
             {{"kappa", 1.0}, {"x0", 1.0}, {"c", 1.0}, {"T", 5.0}}, {0.25, 0.5, 1.0}, N::time_avg),
    };
    return out;
}

ScenarioSpec find_scenario(const std::string& name) {
    for (ScenarioSpec& s : registry())
        if (s.name == name) return s;
    throw UnknownScenario("unknown scenario '" + name + "'");
}

}  // namespace conc
