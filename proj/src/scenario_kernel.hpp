#pragma once

#include "conc/experiments.hpp"
#include "conc/rng.hpp"

#include <map>
#include <memory>
#include <span>
#include <string>

namespace conc::detail {

struct TrialRecord {
    double deviation = 0.0;  ///< already on the scale of the R grid
    bool side_ok = true;
    double aux = 0.0;
    bool aborted = false;
};

class ScenarioKernel {
public:
    virtual ~ScenarioKernel() = default;

    virtual double dt() const = 0;
    virtual TrialRecord simulate(SeedContext& ctx) const = 0;
    virtual BoundValue bound(double R) const = 0;
    /// Exceedance threshold for grid value R.
    virtual double threshold(double R) const { return R; }
    virtual std::string event() const = 0;
    virtual std::string side_condition() const = 0;
    virtual std::string aux_name() const { return "aux"; }

    virtual ScenarioRow evaluate(double R, std::span<const TrialRecord> records, double level) const;
    virtual void summarize(std::span<const TrialRecord> records, std::map<std::string, double>& extras) const;
};

/// Throws std::invalid_argument on invalid parameters and UnknownScenario on an unknown name.
std::unique_ptr<ScenarioKernel> make_kernel(const ScenarioSpec& spec);

}  // namespace conc::detail
