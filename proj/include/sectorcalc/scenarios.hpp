#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sectorcalc/report.hpp"
#include "sectorcalc/types.hpp"

namespace sectorcalc {

/// Malformed scenario input (bad JSON, missing files, invalid fields).
class ScenarioError : public DomainError {
public:
    using DomainError::DomainError;
};

struct RunContext {
    /// Replaces the tolerance of relative/absolute checks when positive.
    double tol_override = 0.0;
    int threads = 1;
    std::uint64_t seed = 42;

    double tol(double fallback) const { return tol_override > 0.0 ? tol_override : fallback; }
};

struct SuiteInfo {
    std::string name;
    std::string description;
    /// Acceptance criterion number, 0 when the suite is auxiliary.
    int criterion = 0;
    /// Name of the parameter a convergence study sweeps; empty if the suite is not sweepable.
    std::string sweep_param;
    std::vector<double> default_sweep;
};

const std::vector<SuiteInfo>& builtin_suites();
const SuiteInfo* find_suite(const std::string& name);

struct Sweep {
    std::string param;
    std::vector<double> values;
};

/// A named run: either a built-in suite or a user-defined calculus check.
struct Scenario {
    std::string name;
    /// Built-in suite name, or "calculus-custom" for a user-defined tuple/region/function.
    std::string suite;
    nlohmann::json inputs;
    std::optional<double> tol;
    std::optional<Sweep> sweep;
    /// Directory against which relative file references are resolved.
    std::string base_dir;
};

/// Parses a scenario document ({"scenarios": [...]} or a single scenario object).
std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& base_dir = ".");
std::vector<Scenario> load_scenarios(const std::string& path);

/// Resolves a --scenario argument: a built-in suite name or a JSON file.
std::vector<Scenario> resolve_scenarios(const std::string& arg);

Report run_builtin(const std::string& suite, const RunContext& ctx);
Report run_scenario(const Scenario& sc, const RunContext& ctx);

/// One row per sweep point with the observed order log2(err_m / err_{m+1}); throws ScenarioError
/// for a scenario without a sweep parameter or with an empty sweep.
Report convergence_study(const Scenario& sc, const RunContext& ctx);

}  // namespace sectorcalc
