#pragma once

#include "conc/bounds.hpp"
#include "conc/estimators.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace conc {

class UnknownScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scenario lost more than 0.1% of its trials to non-finite states.
class ScenarioAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReportIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which scale the R grid lives on.
///   raw        S_T - E S_T
///   time_avg   (S_T - E S_T) / T
///   t2_avg     (S_T - E S_T) / T^2
///   sqrt_t_avg (S_T - E S_T) / sqrt(T)
///   power_avg  (S_T - E S_T) / T^{2 + alpha/2}
///   lambda     the grid holds MGF exponents lambda rather than thresholds
enum class Normalization { raw, time_avg, t2_avg, sqrt_t_avg, power_avg, lambda };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& name);

struct ScenarioSpec {
    std::string name;
    std::string summary;
    std::map<std::string, double> params;
    std::vector<double> R_grid;
    std::size_t trials = 100000;
    std::optional<double> dt;  ///< unset: T / 1000 (unit grid for discrete-time scenarios)
    std::uint64_t seed = 42;
    double level = 0.99;
    Normalization normalization = Normalization::raw;
};

struct ScenarioRow {
    double R = 0.0;
    TailEstimate estimate;
    BoundValue bound;
    VerdictStatus status = VerdictStatus::inconclusive;
    /// Exceedances ignoring the side condition.
    std::size_t marginal_successes = 0;
    /// Exceedances on which the realized side condition also held.
    std::size_t joint_successes = 0;

    friend bool operator==(const ScenarioRow&, const ScenarioRow&) = default;
};

struct ScenarioReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t trials = 0;  ///< completed trials
    std::size_t aborted = 0;
    double dt = 0.0;
    double level = 0.99;
    Normalization normalization = Normalization::raw;
    std::string event;
    std::string side_condition;
    std::map<std::string, double> params;
    std::map<std::string, double> extras;
    std::vector<ScenarioRow> rows;
    /// Measured by run(); not serialized, so reports of the same spec are byte-identical.
    double wall_seconds = 0.0;

    bool same_content(const ScenarioReport& other) const;
};

/// Every application as a fully parameterized default scenario.
std::vector<ScenarioSpec> registry();
/// Throws UnknownScenario.
ScenarioSpec find_scenario(const std::string& name);

/// Applies `key = value` overrides. Recognized keys: trials, dt, seed, level,
/// R_grid (comma-separated) and any parameter already present in spec.params.
/// Throws std::invalid_argument on unknown keys or malformed values.
void apply_override(ScenarioSpec& spec, const std::string& key, const std::string& value);

/// Reads an INI file; the section named after the scenario supplies overrides.
/// Sections for other scenarios are validated but otherwise ignored.
void apply_config_file(ScenarioSpec& spec, const std::filesystem::path& path);

/// Runs every trial (in parallel over `workers` threads) and assembles the
/// report. Results depend only on the scenario settings, never on `workers`.
ScenarioReport run(const ScenarioSpec& spec, unsigned workers = 1);

enum class ReportFormat { csv, json };

inline constexpr const char* kCsvHeader = "scenario,R,trials,successes,empirical,ci_low,ci_high,bound,verdict,seed,dt";

std::string format_csv(const ScenarioReport& report);
nlohmann::json to_json(const ScenarioReport& report);
ScenarioReport report_from_json(const nlohmann::json& j);
/// Throws ReportIoError with the path on failure.
void write_report(const ScenarioReport& report, const std::filesystem::path& path, ReportFormat format);

bool any_violation(const ScenarioReport& report);

/// Evaluates a named closed-form bound or special function from key/value
/// parameters (the `bound` CLI subcommand). Throws std::invalid_argument on
/// unknown names, missing or unknown parameters.
nlohmann::json evaluate_named_bound(const std::string& name, const std::map<std::string, double>& params);
std::vector<std::string> named_bounds();

}  // namespace conc
