// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "conc/bounds.hpp"
#include "conc/experiments.hpp"
#include "conc/functionals.hpp"
#include "conc/processes.hpp"
#include "oracles/special_values.hpp"
#include "support.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef CONCVERIFY_PATH
#error "CONCVERIFY_PATH must point at the concverify binary"
#endif

using namespace conc;
namespace ts = testsupport;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string note) {
        pass = pass && ok;
        notes.push_back(fmt::format("{}{}", ok ? "" : "FAILED ", note));
    }
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    std::string detail;
    for (const std::string& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("{} criterion {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", id, title, detail);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

double identity(double, std::span<const double> x) { return x[0]; }

Outcome special_functions() {
    Outcome o;
    double worst = 0.0;
    for (const auto& p : oracle::h_table) worst = std::max(worst, rel(eval_h(p.x), p.value));
    for (const auto& p : oracle::h1_table) worst = std::max(worst, rel(eval_h1(p.x), p.value));
    for (const auto& p : oracle::phi_a_table) worst = std::max(worst, rel(eval_phi_a(p.a, p.x), p.value));
    o.require(worst <= 1e-12, fmt::format("60 oracle points, worst rel err {:.2e} (tol 1e-12)", worst));
    const double e1 = std::fabs(eval_h(std::exp(1.0) - 1.0) - 1.0);
    const double e2 = std::fabs(eval_h1(1.5) - 0.5);
    const double e3 = std::fabs(eval_h1(4.0) - 2.0);
    o.require(std::max({e1, e2, e3}) <= 1e-15,
              fmt::format("h(e-1), h1(1.5), h1(4) abs err {:.1e} {:.1e} {:.1e} (tol 1e-15)", e1, e2, e3));
    return o;
}

Outcome integration_by_parts() {
    Outcome o;
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        SeedContext c = derive_stream(42, i);
        const Trajectory p = brownian_path(1, 1.0, 1e-3, c);
        const double S = additive_functional(p, identity);
        worst = std::max(worst, decomposition_residual(p, p.steps()) / (1.0 + std::fabs(S)));
    }
    o.require(worst <= 1e-10, fmt::format("100 paths, worst relative residual {:.2e} (tol 1e-10)", worst));
    return o;
}

Outcome brownian_average() {
    Outcome o;
    ScenarioSpec s = find_scenario("brownian_avg");
    s.params["T"] = 1.0;
    s.dt = 1e-3;
    s.trials = 100000;
    s.seed = 42;
    s.R_grid = {0.5, 1.0, 1.5};
    const ScenarioReport r = run(s);
    const double var = r.extras.at("deviation_variance");
    o.require(rel(var, 1.0 / 3.0) <= 0.02, fmt::format("(a) Var = {:.5f} vs 1/3 (tol 2%)", var));
    bool b_ok = true, c_ok = true;
    std::string b_note, c_note;
    for (const ScenarioRow& row : r.rows) {
        const double oracle = ts::normal_sf(std::sqrt(3.0) * row.R);
        const bool inside = row.estimate.ci_low <= oracle && oracle <= row.estimate.ci_high;
        b_ok = b_ok && inside;
        b_note += fmt::format(" R={} [{:.5f},{:.5f}]~{:.5f}", row.R, row.estimate.ci_low, row.estimate.ci_high, oracle);
        c_ok = c_ok && row.status != VerdictStatus::violation;
        c_note += fmt::format(" R={} {} (bound {:.5f})", row.R, to_string(row.status), row.bound.value);
    }
    o.require(b_ok, "(b) 99% CI contains Gaussian tail:" + b_note);
    o.require(c_ok, "(c) exp(-3R^2) verdict:" + c_note);
    return o;
}

Outcome poisson_average() {
    Outcome o;
    ScenarioSpec s = find_scenario("poisson_avg");
    s.params["rate"] = 1.0;
    s.params["T"] = 3.0;
    s.trials = 100000;
    s.R_grid = {0.2, 0.4};
    const ScenarioReport r = run(s);
    for (const ScenarioRow& row : r.rows) {
        const double expected = std::exp(-(3.0 / 3.0) * eval_h(3.0 * row.R));
        o.require(rel(row.bound.value, expected) < 1e-12 && row.status == VerdictStatus::dominated,
                  fmt::format("R={} tail {:.5f} CI [{:.5f},{:.5f}] bound {:.5f} {}", row.R, row.estimate.point,
                              row.estimate.ci_low, row.estimate.ci_high, row.bound.value, to_string(row.status)));
    }
    bool grid_ok = true;
    for (int i = 1; i <= 10000; ++i) {
        const double x = 0.01 * i;
        grid_ok = grid_ok && eval_h(x) >= x * x / (2.0 * (1.0 + x / 3.0));
    }
    o.require(grid_ok, "h(x) >= x^2/(2(1+x/3)) on 10^4 grid points in (0, 100]");
    return o;
}

Outcome ou_moments() {
    Outcome o;
    const double kappa = 1.0, d = 3.0;
    const double x0[] = {2.0, 0.0, 0.0};
    const double times[] = {0.5, 1.0, 2.0};
    std::vector<std::vector<double>> sq(3);
    for (std::size_t i = 0; i < 100000; ++i) {
        SeedContext c = derive_stream(42, i);
        const Trajectory p = ou_path(kappa, x0, 2.0, 0.5, c);
        for (int k = 0; k < 3; ++k) {
            const auto x = p.state(static_cast<std::size_t>(std::lround(times[k] / 0.5)));
            sq[k].push_back(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        }
    }
    for (int k = 0; k < 3; ++k) {
        const double t = times[k];
        const double e = std::exp(-2.0 * kappa * t);
        const double expected = 4.0 * e + d * (1.0 - e) / (2.0 * kappa);
        const double z = (ts::mean(sq[k]) - expected) / ts::std_error(sq[k]);
        o.require(std::fabs(z) <= 3.0,
                  fmt::format("t={} mean {:.5f} vs {:.5f} ({:+.2f} SE)", t, ts::mean(sq[k]), expected, z));
    }
    return o;
}

Outcome ou_squared() {
    Outcome o;
    ScenarioSpec s = find_scenario("ou_squared");
    s.params["x"] = 0.0;
    s.params["d"] = 1.0;
    s.params["kappa"] = 1.0;
    s.params["T"] = 10.0;
    s.trials = 100000;
    s.R_grid = {0.5, 1.0};
    const ScenarioReport r = run(s);
    for (const ScenarioRow& row : r.rows)
        o.require(row.status != VerdictStatus::violation,
                  fmt::format("R={} CI [{:.5f},{:.5f}] bound {:.5f} {}", row.R, row.estimate.ci_low,
                              row.estimate.ci_high, row.bound.value, to_string(row.status)));
    // At a vanishing threshold a two-sided event fires on almost every path.
    ScenarioSpec tiny = s;
    tiny.trials = 2000;
    tiny.R_grid = {1e-9};
    const double frac = run(tiny).rows.at(0).estimate.point;
    o.require(r.event.front() == '|' && frac > 0.99,
              fmt::format("event '{}', P(|dev| >= 1e-9) = {:.4f}", r.event, frac));
    return o;
}

Outcome degenerate_pair() {
    Outcome o;
    const double alpha = 2.0, beta = 1.0, target = std::exp(-1.0) - std::exp(-2.0);
    const PathGenerator gen = [&](std::span<const double> start, SeedContext& c) {
        return degenerate_pair_path(alpha, beta, start[0], start[1], 1.0, 1e-3, c);
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < 20; ++k)
        for (double h : {0.01, 0.5, 2.0}) {
            const double a[] = {0.1 * k, -0.3};
            const double b[] = {0.1 * k + h, -0.3};
            const CoupledPair pair = couple(gen, a, b, derive_stream(42, k));
            worst = std::max(worst, std::fabs((pair.b.values.back() - pair.a.values.back()) / h - target));
        }
    o.require(worst <= 1e-4, fmt::format("60 coupled pairs, worst |quotient - 0.232544| = {:.2e} (tol 1e-4)", worst));

    ScenarioSpec s = find_scenario("degenerate_pair");
    s.R_grid = {0.5};
    const ScenarioReport r = run(s);
    const ScenarioRow& row = r.rows.at(0);
    o.require(row.status != VerdictStatus::violation,
              fmt::format("R=0.5 CI [{:.5f},{:.5f}] bound {:.5f} {}", row.estimate.ci_low, row.estimate.ci_high,
                          row.bound.value, to_string(row.status)));
    return o;
}

Outcome polyak() {
    Outcome o;
    PolyakConfig cfg;
    cfg.lambda = 0.5;
    cfg.p = 0.25;
    cfg.mbar = cfg.Mbar = 1.0;
    cfg.w_law = NoiseLaw::uniform(-1.0, 1.0);
    cfg.g = [](double x, double w) { return x - w; };
    cfg.g_star = [](double x) { return std::fabs(x) + 1.0; };
    cfg.g_star_ball_sup = [](double r) { return r + 1.0; };
    const std::size_t T = 1000;
    o.require(polyak_admissible(cfg, T),
              fmt::format("(a) lambda 0.5 <= {:.4f}", polyak_lambda_max(T, cfg.p, cfg.mbar, cfg.Mbar)));

    // Checked at every t: by t = T the gap is far below the iterates' rounding.
    const double x = 1.0, y = -1.0;
    std::vector<double> limit(T + 1, (x - y) * (x - y));
    for (std::size_t u = 1; u <= T; ++u)
        limit[u] = limit[u - 1] * (1.0 - 2.0 * cfg.step(u) + cfg.step(u) * cfg.step(u));
    const PathGenerator gen = [&](std::span<const double> start, SeedContext& c) {
        PolyakConfig local = cfg;
        local.x0 = start[0];
        return polyak_run(local, T, c).traj;
    };
    std::vector<std::vector<double>> sq(T + 1);
    for (std::size_t k = 0; k < 10000; ++k) {
        const double a[] = {x};
        const double b[] = {y};
        const CoupledPair pair = couple(gen, a, b, derive_stream(42, k));
        for (std::size_t t = 0; t <= T; ++t) {
            const double diff = pair.a.values[t] - pair.b.values[t];
            sq[t].push_back(diff * diff);
        }
    }
    // Iterates are O(1), so differences below ~1e-13 are rounding.
    constexpr double kRoundingFloor = 1e-26;
    bool contracts = true;
    double worst = 0.0;
    for (std::size_t t = 0; t <= T; ++t) {
        const double excess = ts::mean(sq[t]) - limit[t] - 3.0 * ts::std_error(sq[t]);
        contracts = contracts && excess <= 1e-9 * limit[t] + kRoundingFloor;
        if (limit[t] > kRoundingFloor) worst = std::max(worst, ts::mean(sq[t]) / limit[t]);
    }
    o.require(contracts, fmt::format("(b) E(X^x - X^y)_t^2 within 3 SE of the product bound for all t <= {}, "
                                     "at T {:.3e} vs {:.3e}, max ratio {:.6f}",
                                     T, ts::mean(sq[T]), limit[T], worst));

    ScenarioSpec s = find_scenario("polyak_ruppert");
    s.trials = 10000;
    const ScenarioReport r = run(s);
    bool ok = true;
    std::string note;
    for (const ScenarioRow& row : r.rows) {
        ok = ok && row.status == VerdictStatus::dominated;
        note += fmt::format(" R={} {:.4f}<= {:.4f} {}", row.R, row.estimate.ci_high, row.bound.value,
                            to_string(row.status));
    }
    o.require(ok, "(c) joint-event tail:" + note);
    return o;
}

Outcome mgf_supermartingale() {
    Outcome o;
    ScenarioSpec s = find_scenario("mart_mgf");
    s.params["T"] = 1.0;
    s.params["lemma_form"] = 0.0;
    s.R_grid = {-0.5, -0.25, 0.25, 0.5};
    const ScenarioReport r = run(s);
    for (const ScenarioRow& row : r.rows) {
        const double lambda = row.R;
        const double oracle = std::exp(-lambda * lambda / 6.0);
        o.require(row.estimate.ci_low <= 1.0 && row.estimate.point <= oracle * 1.05,
                  fmt::format("lambda={} mean {:.5f} CI [{:.5f},{:.5f}] oracle {:.5f}", lambda, row.estimate.point,
                              row.estimate.ci_low, row.estimate.ci_high, oracle));
    }
    return o;
}

Outcome auxiliary_martingale() {
    Outcome o;
    const ScenarioSpec s = find_scenario("resolvent_mart");
    const double kappa = s.params.at("kappa"), x0 = s.params.at("x0"), c = s.params.at("c"), T = s.params.at("T");
    const double dt = T / 1000.0;
    const ResolventSpec spec = ResolventSpec::ou_linear(kappa, c, T);
    const Observable f = [c](double, std::span<const double> x) { return c * x[0]; };
    const double start[] = {x0};
    const double m0 = c * x0 * (1.0 - std::exp(-kappa * T)) / kappa;
    bool exact_start = true;
    double worst_gap = 0.0;
    std::vector<double> drift;
    for (std::size_t i = 0; i < 100000; ++i) {
        SeedContext ctx = derive_stream(42, i);
        const Trajectory p = ou_path(kappa, start, T, dt, ctx);
        const auto m = auxiliary_martingale_path(p, f, spec);
        exact_start = exact_start && m.front() == m0;
        worst_gap = std::max(worst_gap, std::fabs(m.back() - additive_functional(p, f)));
        drift.push_back(m[p.steps() / 2] - m.front());
    }
    o.require(exact_start, fmt::format("M_0 = {:.12f} on every path", m0));
    const double z = ts::mean(drift) / ts::std_error(drift);
    o.require(std::fabs(z) <= 3.0, fmt::format("drift at T/2 = {:.2e} ({:+.2f} SE)", ts::mean(drift), z));
    o.require(worst_gap <= 1e-10, fmt::format("max |M_T - S_T| = {:.2e} (tol 1e-10)", worst_gap));
    return o;
}

Outcome ldp() {
    Outcome o;
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
        const double R = 1e-3 * std::pow(1e6, i / 99.0);
        const auto [I, J] = ldp_rates(R, 1.0, 1.0);
        ok = ok && J >= I;
    }
    o.require(ok, "J >= I on 100 log-spaced R in [1e-3, 1e3]");
    const auto [I0, J0] = ldp_rates(0.5, 1.0, 1.0);
    o.require(I0 == 0.0 && J0 == 0.0, fmt::format("I(d/2kappa) = {}, J(d/2kappa) = {}", I0, J0));
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome reproducibility() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path();
    std::string out[2];
    const unsigned workers[] = {1, 8};
    for (int k = 0; k < 2; ++k) {
        const auto path = dir / fmt::format("conc_acceptance_{}.csv", workers[k]);
        std::filesystem::remove(path);
        const std::string cmd = fmt::format("\"{}\" run brownian_avg --seed 42 --workers {} --out \"{}\" 2>/dev/null",
                                            CONCVERIFY_PATH, workers[k], path.string());
        const int status = std::system(cmd.c_str());
        o.require(std::filesystem::exists(path), fmt::format("{} worker(s): status {}", workers[k], status));
        out[k] = slurp(path);
    }
    o.require(!out[0].empty() && out[0] == out[1], fmt::format("CSV byte-identical ({} bytes)", out[0].size()));
    return o;
}

}  // namespace

int main() {
    report(1, "special functions", special_functions());
    report(2, "discrete integration by parts", integration_by_parts());
    report(3, "Brownian time average", brownian_average());
    report(4, "Poisson time average", poisson_average());
    report(5, "OU moments", ou_moments());
    report(6, "OU squared bound", ou_squared());
    report(7, "degenerate pair", degenerate_pair());
    report(8, "Polyak-Ruppert", polyak());
    report(9, "MGF supermartingale", mgf_supermartingale());
    report(10, "auxiliary martingale", auxiliary_martingale());
    report(11, "LDP rates", ldp());
    report(12, "reproducibility", reproducibility());
    fmt::print("{} of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
