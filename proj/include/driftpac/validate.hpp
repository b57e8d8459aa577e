#pragma once

#include "driftpac/drift_sim.hpp"
#include "driftpac/polytope.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftpac {

/// Source of fresh targets f_{m+1} and of points from the fixed sampling
/// distribution. Implementations must be usable from several threads, each
/// with its own Rng.
class DriftProcess {
  public:
    virtual ~DriftProcess() = default;
    virtual Labeler next_target(Rng& rng) const = 0;
    virtual std::vector<double> sample_point(Rng& rng) const = 0;
};

/// Braking process continuing from the last training target.
class AebProcess final : public DriftProcess {
  public:
    AebProcess(aeb::AebParams params, aeb::AebTarget last);
    Labeler next_target(Rng& rng) const override;
    std::vector<double> sample_point(Rng& rng) const override;

  private:
    aeb::AebParams params_;
    aeb::AebTarget last_;
};

/// A target that never moves.
class StaticProcess final : public DriftProcess {
  public:
    StaticProcess(Labeler target, PointSampler sampler);
    Labeler next_target(Rng& rng) const override;
    std::vector<double> sample_point(Rng& rng) const override;

  private:
    Labeler target_;
    PointSampler sampler_;
};

struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<std::int64_t> counts;
};

/// Equal-width bins over [min, max] of the values, or over `range` when
/// given (values outside are clamped into the end bins). The last bin is
/// closed. Throws std::invalid_argument on empty input or bins < 1.
Histogram histogram(std::span<const double> values, int bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

std::string histogram_csv(const Histogram& h);

struct ValidationOptions {
    std::int64_t runs = 500;
    std::int64_t samples_per_run = 5000;
    double epsilon = 0.01;
    double mu_max = 0.02;
    int bins = 30;
    /// 5% ceiling on the fraction of runs above the bound.
    double exceed_limit = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ValidationReport {
    std::int64_t runs = 0;
    std::int64_t samples_per_run = 0;
    std::vector<std::int64_t> counts;  // disagreements per run
    std::vector<double> per_run;       // counts / samples_per_run
    double mean = 0.0;                 // from the stored list
    double mean_streaming = 0.0;       // accumulated while runs complete
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    double bound_value = 0.0;  // 4 mu_max + epsilon
    std::int64_t exceed_count = 0;
    double exceed_fraction = 0.0;
    double exceed_limit = 0.0;
    Histogram hist;
    std::uint64_t seed = 0;
    std::string note;

    bool within_limit() const { return exceed_fraction <= exceed_limit; }
};

/// For each run: a fresh target from `process`, samples_per_run fresh
/// points, and the empirical disagreement against `hypothesis`. Run r uses
/// its own substream of the seed, so the report does not depend on the
/// thread count.
ValidationReport monte_carlo_validate(const Polytope& hypothesis, const DriftProcess& process,
                                      const ValidationOptions& opts);

nlohmann::json to_json(const ValidationReport& r);

}  // namespace driftpac
