#pragma once

#include "driftpac/bounds.hpp"
#include "driftpac/drift_sim.hpp"
#include "driftpac/fit.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace driftpac {

/// Everything a pipeline run needs. Loaded from `key = value` text; see
/// config_keys() for the schema.
struct RunConfig {
    bounds::BoundParams bound{0.01, 1e-6, 1, 0.0078, 0.02, 0.0};
    aeb::AebParams aeb;
    /// Training samples; 0 means "use the m0 bound".
    std::int64_t m = 0;
    std::size_t facets = 4;
    double rho = 1e-6;
    SolverKind solver = SolverKind::Auto;
    bool tie_break = true;
    double time_limit_s = 600.0;
    std::int64_t node_limit = 10'000'000;
    double gap = 0.0;
    double feas_tol = 1e-7;
    double int_tol = 1e-6;
    std::int64_t runs = 500;
    std::int64_t samples_per_run = 5000;
    int bins = 30;
    double exceed_limit = 0.05;
    unsigned threads = 1;
    /// Monte Carlo draws per step for the measured target change; 0 skips it.
    std::int64_t mu_mc = 200;
    std::uint64_t seed = 1;
    /// Root directory for run directories; empty means $DRIFTPAC_RUNS or ./runs.
    std::string out_root;

    /// Enforces every module-level range; throws std::invalid_argument.
    void validate() const;
    FitOptions fit_options() const;

    bool operator==(const RunConfig&) const = default;
};

struct ConfigKey {
    std::string name;
    std::string help;
};

/// Keys in serialization order. Speeds may also be given as
/// `v_mean_kmh` / `v_std_kmh`; these are converted to v^2 in m^2/s^2.
const std::vector<ConfigKey>& config_keys();

/// Applies one assignment; throws std::invalid_argument for unknown keys or
/// unparsable values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines (`#` starts a comment) over the defaults and
/// validates the result. Errors carry the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text: every key, in schema order, 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace driftpac
