#pragma once

#include "driftpac/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftpac {

inline constexpr const char* kToolVersion = "0.3.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

/// A failed pipeline stage; artifacts written before it are left in place.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& what, int exit_code)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

  private:
    std::string stage_;
    int exit_code_;
};

struct StageRecord {
    std::string name;
    std::vector<std::string> artifacts;  // relative to the run directory
    std::string started, finished;       // ISO-8601 UTC
    double seconds = 0.0;
};

struct RunManifest {
    std::filesystem::path dir;
    std::string config_text;
    std::string started, finished;
    std::vector<StageRecord> stages;
    nlohmann::json summary;
};

/// runs/<UTC timestamp>-<seed> under cfg.out_root, else $DRIFTPAC_RUNS, else ./runs.
std::filesystem::path default_run_dir(const RunConfig& cfg);

/// bound -> simulate -> discard -> fit -> validate, writing config.txt,
/// bound.json, trace.jsonl, discard.json, model.lp, solve.json,
/// hypothesis.json, validation.json, histogram.csv and manifest.json into
/// `dir`. Numeric artifacts carry no timestamps or wall times, so a rerun
/// with the same config reproduces them byte for byte.
RunManifest run_pipeline(const RunConfig& cfg, const std::filesystem::path& dir);

nlohmann::json to_json(const RunManifest& m);

/// Checks that every artifact the manifest lists exists and parses.
/// Returns the list of problems (empty when complete).
std::vector<std::string> verify_run_dir(const std::filesystem::path& dir);

std::string utc_timestamp();
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace driftpac
