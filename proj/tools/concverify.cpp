// concverify: run concentration-bound scenarios and evaluate closed-form bounds.
//
// Exit codes: 0 success, 1 usage error, 2 a bound was violated, 3 I/O error,
// 4 scenario aborted (too many non-finite trials).

#include "conc/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

enum Exit { ok = 0, usage = 1, violation = 2, io = 3, aborted = 4 };

int fail(Exit code, const std::string& kind, const std::string& message) {
    std::fprintf(stderr, "error[%s]: %s\n", kind.c_str(), message.c_str());
    return code;
}

std::pair<std::string, double> parse_param(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + text + "'");
    const std::string key = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
        throw std::invalid_argument(fmt::format("{}: '{}' is not a number", key, value));
    return {key, v};
}

int list_scenarios(bool verbose) {
    for (const conc::ScenarioSpec& s : conc::registry()) {
        fmt::print("{:<30} {:<11} {}\n", s.name, conc::to_string(s.normalization), s.summary);
        if (!verbose) continue;
        std::string params;
        for (const auto& [k, v] : s.params) params += fmt::format(" {}={}", k, v);
        std::string grid;
        for (double R : s.R_grid) grid += fmt::format("{}{}", grid.empty() ? "" : ",", R);
        fmt::print("    R_grid={} trials={} seed={}{}\n", grid, s.trials, s.seed, params);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo verification of concentration inequalities for additive functionals"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list registered scenarios");
    bool verbose = false;
    list_cmd->add_flag("--verbose,-v", verbose, "also print default parameters");

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its report");
    std::string scenario;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::string out_path;
    std::string format = "csv";
    std::string config;
    std::vector<std::string> overrides;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    run_cmd->add_option("name", scenario, "scenario name")->required();
    run_cmd->add_option("--trials", trials, "number of Monte Carlo trials");
    run_cmd->add_option("--seed", seed, "master seed");
    run_cmd->add_option("--dt", dt, "time step");
    run_cmd->add_option("--out", out_path, "output file (default: stdout)");
    run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--config", config, "INI file with per-scenario overrides");
    run_cmd->add_option("--set", overrides, "override key=value (parameters, R_grid, level)");
    run_cmd->add_option("--workers", workers, "worker threads; results do not depend on this")
        ->check(CLI::PositiveNumber);

    auto* bound_cmd = app.add_subcommand("bound", "evaluate a closed-form bound and print JSON");
    std::string bound_name;
    std::vector<std::string> bound_params;
    bound_cmd->add_option("name", bound_name, "bound name")->required();
    bound_cmd->add_option("--param", bound_params, "key=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(usage, "usage", e.what());
    }

    if (app.got_subcommand("list")) return list_scenarios(verbose);

    if (app.got_subcommand("bound")) {
        try {
            std::map<std::string, double> params;
            for (const std::string& p : bound_params) {
                const auto [k, v] = parse_param(p);
                if (!params.emplace(k, v).second) throw std::invalid_argument("duplicate parameter '" + k + "'");
            }
            std::cout << conc::evaluate_named_bound(bound_name, params).dump(2) << '\n';
            return ok;
        } catch (const std::invalid_argument& e) {
            return fail(usage, "usage", e.what());
        }
    }

    conc::ScenarioSpec spec;
    try {
        spec = conc::find_scenario(scenario);
        if (!config.empty()) conc::apply_config_file(spec, config);
        for (const std::string& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + o + "'");
            conc::apply_override(spec, o.substr(0, eq), o.substr(eq + 1));
        }
        if (trials) {
            if (*trials == 0) throw std::invalid_argument("--trials must be positive");
            spec.trials = *trials;
        }
        if (seed) spec.seed = *seed;
        if (dt) {
            if (!(*dt > 0.0)) throw std::invalid_argument("--dt must be positive");
            spec.dt = *dt;
        }
    } catch (const conc::ReportIoError& e) {
        return fail(io, "io", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(usage, "usage", e.what());
    }

    conc::ScenarioReport report;
    try {
        report = conc::run(spec, workers);
    } catch (const conc::ScenarioAborted& e) {
        return fail(aborted, "aborted", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(usage, "usage", e.what());
    }
    std::fprintf(stderr, "%s: %zu trials, %zu aborted, %.2f s\n", report.scenario.c_str(), report.trials,
                 report.aborted, report.wall_seconds);

    const auto fmt_kind = format == "json" ? conc::ReportFormat::json : conc::ReportFormat::csv;
    try {
        if (out_path.empty()) {
            if (fmt_kind == conc::ReportFormat::csv)
                std::cout << conc::format_csv(report);
            else
                std::cout << conc::to_json(report).dump(2) << '\n';
            std::cout.flush();
            if (!std::cout) throw conc::ReportIoError("failed writing to stdout");
        } else {
            conc::write_report(report, out_path, fmt_kind);
        }
    } catch (const conc::ReportIoError& e) {
        return fail(io, "io", e.what());
    }

    if (conc::any_violation(report)) {
        for (const conc::ScenarioRow& r : report.rows)
            if (r.status == conc::VerdictStatus::violation)
                std::fprintf(stderr, "violation: %s R=%g empirical CI [%g, %g] above bound %g\n",
                             report.scenario.c_str(), r.R, r.estimate.ci_low, r.estimate.ci_high, r.bound.value);
        return violation;
    }
    return ok;
}
