#include "conc/experiments.hpp"

#include "conc/processes.hpp"
#include "scenario_kernel.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace conc {

namespace {

using nlohmann::json;

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    if (b < e && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e || !std::isfinite(v))
        throw std::invalid_argument(fmt::format("{}: '{}' is not a finite number", key, text));
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e)
        throw std::invalid_argument(fmt::format("{}: '{}' is not a non-negative integer", key, text));
    return v;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find_first_not_of(" \t") == std::string::npos) return grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_double("R_grid", item));
    return grid;
}

BoundFamily family_from_string(const std::string& name) {
    for (BoundFamily f : {BoundFamily::gaussian, BoundFamily::bennett, BoundFamily::bernstein_gamma,
                          BoundFamily::azuma, BoundFamily::selfnorm, BoundFamily::selfnorm_cd,
                          BoundFamily::composite})
        if (to_string(f) == name) return f;
    throw std::invalid_argument("unknown bound family: " + name);
}

json bound_to_json(const BoundValue& b) {
    return json{{"value", b.value}, {"raw", b.raw}, {"family", to_string(b.family)}, {"params", b.params}};
}

BoundValue bound_from_json(const json& j) {
    BoundValue b;
    b.value = j.at("value").get<double>();
    b.raw = j.at("raw").get<double>();
    b.family = family_from_string(j.at("family").get<std::string>());
    b.params = j.at("params").get<std::map<std::string, double>>();
    return b;
}

/// Calls body(i) for i in [0, n) on up to `workers` threads with contiguous chunks.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t lo = n * k / w;
        const std::size_t hi = n * (k + 1) / w;
        threads.emplace_back([&, lo, hi, k] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::raw: return "raw";
        case Normalization::time_avg: return "time_avg";
        case Normalization::t2_avg: return "t2_avg";
        case Normalization::sqrt_t_avg: return "sqrt_t_avg";
        case Normalization::power_avg: return "power_avg";
        case Normalization::lambda: return "lambda";
    }
    return "raw";
}

Normalization normalization_from_string(const std::string& name) {
    for (Normalization n : {Normalization::raw, Normalization::time_avg, Normalization::t2_avg,
                            Normalization::sqrt_t_avg, Normalization::power_avg, Normalization::lambda})
        if (to_string(n) == name) return n;
    throw std::invalid_argument("unknown normalization: " + name);
}

bool ScenarioReport::same_content(const ScenarioReport& o) const {
    return scenario == o.scenario && seed == o.seed && trials == o.trials && aborted == o.aborted && dt == o.dt &&
           level == o.level && normalization == o.normalization && event == o.event &&
           side_condition == o.side_condition && params == o.params && extras == o.extras && rows == o.rows;
}

void apply_override(ScenarioSpec& spec, const std::string& key, const std::string& value) {
    if (key == "trials") {
        const std::uint64_t t = parse_unsigned(key, value);
        if (t == 0) throw std::invalid_argument("trials must be positive");
        spec.trials = static_cast<std::size_t>(t);
    } else if (key == "seed") {
        spec.seed = parse_unsigned(key, value);
    } else if (key == "dt") {
        const double dt = parse_double(key, value);
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        spec.dt = dt;
    } else if (key == "level") {
        const double level = parse_double(key, value);
        if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
        spec.level = level;
    } else if (key == "R_grid") {
        spec.R_grid = parse_grid(value);
    } else {
        auto it = spec.params.find(key);
        if (it == spec.params.end())
            throw std::invalid_argument(fmt::format("{}: unknown parameter '{}'", spec.name, key));
        it->second = parse_double(key, value);
    }
}

void apply_config_file(ScenarioSpec& spec, const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    if (!std::filesystem::exists(path)) throw ReportIoError(fmt::format("config '{}' does not exist", path.string()));
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            // Top-level keys apply to whichever scenario is run.
            apply_override(spec, section, body.data());
            continue;
        }
        if (section == spec.name) {
            for (const auto& [key, value] : body) apply_override(spec, key, value.data());
            continue;
        }
        ScenarioSpec other = find_scenario(section);
        for (const auto& [key, value] : body) apply_override(other, key, value.data());
    }
}

ScenarioReport run(const ScenarioSpec& spec, unsigned workers) {
    if (spec.trials == 0) throw std::invalid_argument("trials must be positive");
    if (!(spec.level > 0.0 && spec.level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
    for (double R : spec.R_grid)
        if (!std::isfinite(R)) throw std::invalid_argument("R_grid entries must be finite");
    const auto kernel = detail::make_kernel(spec);
    const auto start = std::chrono::steady_clock::now();

    std::vector<detail::TrialRecord> records(spec.trials);
    parallel_for(spec.trials, workers, [&](std::size_t i) {
        SeedContext ctx = derive_stream(spec.seed, i);
        detail::TrialRecord& rec = records[i];
        try {
            rec = kernel->simulate(ctx);
        } catch (const TrialAborted&) {
            rec = detail::TrialRecord{};
            rec.aborted = true;
        }
        if (!std::isfinite(rec.deviation)) rec.aborted = true;
    });

    ScenarioReport report;
    report.aborted = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const detail::TrialRecord& r) { return r.aborted; }));
    if (report.aborted * 1000 > spec.trials)
        throw ScenarioAborted(fmt::format("{}: {} of {} trials aborted (limit 0.1%)", spec.name, report.aborted,
                                          spec.trials));
    report.scenario = spec.name;
    report.seed = spec.seed;
    report.trials = spec.trials - report.aborted;
    report.dt = kernel->dt();
    report.level = spec.level;
    report.normalization = spec.normalization;
    report.event = kernel->event();
    report.side_condition = kernel->side_condition();
    report.params = spec.params;

    std::vector<double> grid = spec.R_grid;
    std::sort(grid.begin(), grid.end());
    for (double R : grid) report.rows.push_back(kernel->evaluate(R, records, spec.level));
    kernel->summarize(records, report.extras);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string format_csv(const ScenarioReport& report) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const ScenarioRow& r : report.rows)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", report.scenario, r.R, r.estimate.trials,
                           r.estimate.successes, r.estimate.point, r.estimate.ci_low, r.estimate.ci_high,
                           r.bound.value, to_string(r.status), report.seed, report.dt);
    return out;
}

json to_json(const ScenarioReport& report) {
    json rows = json::array();
    for (const ScenarioRow& r : report.rows)
        rows.push_back({{"R", r.R},
                        {"trials", r.estimate.trials},
                        {"successes", r.estimate.successes},
                        {"marginal_successes", r.marginal_successes},
                        {"joint_successes", r.joint_successes},
                        {"empirical", r.estimate.point},
                        {"ci_low", r.estimate.ci_low},
                        {"ci_high", r.estimate.ci_high},
                        {"level", r.estimate.level},
                        {"bound", bound_to_json(r.bound)},
                        {"verdict", to_string(r.status)}});
    return json{{"scenario", report.scenario},
                {"seed", report.seed},
                {"trials", report.trials},
                {"aborted", report.aborted},
                {"dt", report.dt},
                {"level", report.level},
                {"normalization", to_string(report.normalization)},
                {"event", report.event},
                {"side_condition", report.side_condition},
                {"params", report.params},
                {"extras", report.extras},
                {"rows", rows}};
}

ScenarioReport report_from_json(const json& j) {
    ScenarioReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<std::size_t>();
    r.aborted = j.at("aborted").get<std::size_t>();
    r.dt = j.at("dt").get<double>();
    r.level = j.at("level").get<double>();
    r.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    r.event = j.at("event").get<std::string>();
    r.side_condition = j.at("side_condition").get<std::string>();
    r.params = j.at("params").get<std::map<std::string, double>>();
    r.extras = j.at("extras").get<std::map<std::string, double>>();
    for (const json& row : j.at("rows")) {
        ScenarioRow s;
        s.R = row.at("R").get<double>();
        s.estimate.trials = row.at("trials").get<std::size_t>();
        s.estimate.successes = row.at("successes").get<std::size_t>();
        s.estimate.point = row.at("empirical").get<double>();
        s.estimate.ci_low = row.at("ci_low").get<double>();
        s.estimate.ci_high = row.at("ci_high").get<double>();
        s.estimate.level = row.at("level").get<double>();
        s.marginal_successes = row.at("marginal_successes").get<std::size_t>();
        s.joint_successes = row.at("joint_successes").get<std::size_t>();
        s.bound = bound_from_json(row.at("bound"));
        s.status = verdict_from_string(row.at("verdict").get<std::string>());
        r.rows.push_back(std::move(s));
    }
    return r;
}

void write_report(const ScenarioReport& report, const std::filesystem::path& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportIoError(fmt::format("cannot open '{}' for writing: {}", path.string(), std::strerror(errno)));
    if (format == ReportFormat::csv)
        out << format_csv(report);
    else
        out << to_json(report).dump(2) << '\n';
    out.flush();
    if (!out) throw ReportIoError(fmt::format("failed writing '{}'", path.string()));
}

bool any_violation(const ScenarioReport& report) {
    return std::any_of(report.rows.begin(), report.rows.end(),
                       [](const ScenarioRow& r) { return r.status == VerdictStatus::violation; });
}

namespace {

using Args = std::map<std::string, double>;

struct NamedBound {
    std::vector<std::string> keys;
    std::function<json(const Args&)> eval;
};

json value_json(double v) { return json{{"value", v}}; }

const std::map<std::string, NamedBound>& bound_table() {
    static const std::map<std::string, NamedBound> table = {
        {"h", {{"x"}, [](const Args& a) { return value_json(eval_h(a.at("x"))); }}},
        {"h1", {{"x"}, [](const Args& a) { return value_json(eval_h1(a.at("x"))); }}},
        {"phi_a", {{"a", "x"}, [](const Args& a) { return value_json(eval_phi_a(a.at("a"), a.at("x"))); }}},
        {"gaussian_tail", {{"R", "v"}, [](const Args& a) { return bound_to_json(gaussian_tail(a.at("R"), a.at("v"))); }}},
        {"bennett_tail",
         {{"R", "m", "a"},
          [](const Args& a) { return bound_to_json(bennett_tail(a.at("R"), a.at("m"), a.at("a"))); }}},
        {"bernstein_gamma_tail",
         {{"R", "m", "b"},
          [](const Args& a) { return bound_to_json(bernstein_gamma_tail(a.at("R"), a.at("m"), a.at("b"))); }}},
        {"azuma_tail", {{"R", "a2"}, [](const Args& a) { return bound_to_json(azuma_tail(a.at("R"), a.at("a2"))); }}},
        {"selfnorm_tail", {{"R"}, [](const Args& a) { return bound_to_json(selfnorm_tail(a.at("R"))); }}},
        {"selfnorm_cd_tail",
         {{"R", "C", "D"},
          [](const Args& a) { return bound_to_json(selfnorm_cd_tail(a.at("R"), a.at("C"), a.at("D"))); }}},
        {"selfnorm_cstd_tail",
         {{"R", "C", "D", "mean_S", "mean_H0", "rho2"},
          [](const Args& a) {
              return bound_to_json(selfnorm_cstd_tail(a.at("R"), a.at("C"), a.at("D"), a.at("mean_S"),
                                                      a.at("mean_H0"), a.at("rho2")));
          }}},
        {"poly_kernel_bound",
         {{"R", "T", "sigma2", "alpha"},
          [](const Args& a) {
              return bound_to_json(poly_kernel_bound(a.at("R"), a.at("T"), a.at("sigma2"), a.at("alpha")));
          }}},
        {"exp_kernel_bound",
         {{"R", "T"}, [](const Args& a) { return bound_to_json(exp_kernel_bound(a.at("R"), a.at("T"))); }}},
        {"polyak_lambda_max",
         {{"T", "p", "mbar", "Mbar"},
          [](const Args& a) {
              return value_json(polyak_lambda_max(a.at("T"), a.at("p"), a.at("mbar"), a.at("Mbar")));
          }}},
        {"polyak_bound",
         {{"R", "T", "p", "mbar", "G"},
          [](const Args& a) {
              return bound_to_json(polyak_bound(a.at("R"), a.at("T"), a.at("p"), a.at("mbar"), a.at("G")));
          }}},
        {"lipschitz_sde_bound",
         {{"R", "T", "rho", "kappa", "C", "lip"},
          [](const Args& a) {
              return bound_to_json(
                  lipschitz_sde_bound(a.at("R"), a.at("T"), a.at("rho"), a.at("kappa"), a.at("C"), a.at("lip")));
          }}},
        {"lipschitz_sde_mu_shift",
         {{"T", "rho", "kappa", "lip", "w1"},
          [](const Args& a) {
              return value_json(
                  lipschitz_sde_mu_shift(a.at("T"), a.at("rho"), a.at("kappa"), a.at("lip"), a.at("w1")));
          }}},
        {"ou_squared_bound",
         {{"R", "T", "kappa", "d", "x_norm2"},
          [](const Args& a) {
              return bound_to_json(
                  ou_squared_bound(a.at("R"), a.at("T"), a.at("kappa"), a.at("d"), a.at("x_norm2")));
          }}},
        {"ou_squared_lipschitz_instance",
         {{"R", "T", "kappa", "d"},
          [](const Args& a) {
              return bound_to_json(ou_squared_lipschitz_instance(a.at("R"), a.at("T"), a.at("kappa"), a.at("d")));
          }}},
        {"c_kappa",
         {{"kappa", "C", "T"}, [](const Args& a) { return value_json(c_kappa(a.at("kappa"), a.at("C"), a.at("T"))); }}},
        {"d_kappa_c",
         {{"kappa", "C", "D", "T"},
          [](const Args& a) { return value_json(d_kappa_c(a.at("kappa"), a.at("C"), a.at("D"), a.at("T"))); }}},
        {"squared_lipschitz_bound",
         {{"R", "T", "sigma", "kappa", "C", "D", "mean_ST_over_T"},
          [](const Args& a) {
              return bound_to_json(squared_lipschitz_bound(a.at("R"), a.at("T"), a.at("sigma"), a.at("kappa"),
                                                           a.at("C"), a.at("D"), a.at("mean_ST_over_T")));
          }}},
        {"degenerate_bound",
         {{"R", "T", "alpha", "beta"},
          [](const Args& a) {
              return bound_to_json(degenerate_bound(a.at("R"), a.at("T"), a.at("alpha"), a.at("beta")));
          }}},
        {"degenerate_sensitivity",
         {{"alpha", "beta", "t"},
          [](const Args& a) { return value_json(degenerate_sensitivity(a.at("alpha"), a.at("beta"), a.at("t"))); }}},
        {"ldp_rates",
         {{"R", "d", "kappa"},
          [](const Args& a) {
              const auto [I, J] = ldp_rates(a.at("R"), a.at("d"), a.at("kappa"));
              return json{{"I", I}, {"J", J}};
          }}},
        {"mgf_envelope",
         {{"lambda", "deviation", "rho2", "a", "H_a"},
          [](const Args& a) {
              return value_json(
                  mgf_envelope(a.at("lambda"), a.at("deviation"), a.at("rho2"), a.at("a"), a.at("H_a")));
          }}},
    };
    return table;
}

}  // namespace

std::vector<std::string> named_bounds() {
    std::vector<std::string> names;
    for (const auto& [name, entry] : bound_table()) names.push_back(name);
    return names;
}

json evaluate_named_bound(const std::string& name, const std::map<std::string, double>& params) {
    const auto& table = bound_table();
    const auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown bound '" + name + "'");
    const NamedBound& entry = it->second;
    for (const std::string& key : entry.keys)
        if (!params.count(key)) throw std::invalid_argument(fmt::format("{}: missing parameter '{}'", name, key));
    for (const auto& [key, value] : params)
        if (std::find(entry.keys.begin(), entry.keys.end(), key) == entry.keys.end())
            throw std::invalid_argument(fmt::format("{}: unknown parameter '{}'", name, key));
    json out = entry.eval(params);
    out["name"] = name;
    return out;
}

}  // namespace conc
