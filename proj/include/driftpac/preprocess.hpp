#pragma once

#include "driftpac/drift_sim.hpp"
#include "driftpac/polytope.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftpac {

/// t_i = a . x_i for every sample, with labels and original indices.
struct Projection {
    std::int64_t index = 0;
    double t = 0.0;
    std::uint8_t label = 0;
};

std::vector<Projection> project(std::span<const LabeledSample> samples, std::span<const double> direction);

/// Thresholds theta (hypothesis label 1 iff t <= theta) for which every
/// discarded sample is classified correctly. `hi` already accounts for the
/// tolerance rho on the label-0 side. Unbounded ends are +-inf.
struct ThetaWindow {
    double lo = -INFINITY;
    double hi = INFINITY;
};

struct DiscardReport {
    std::int64_t total = 0;
    std::int64_t kept = 0;
    std::int64_t discarded_I1 = 0;
    std::int64_t discarded_I0 = 0;
    double theta_lo = 0.0;  // min over label-0 projections
    double theta_hi = 0.0;  // max over label-1 projections
    ThetaWindow window;
    /// Sample counts after collapsing identical (x, label) pairs.
    std::int64_t distinct_total = 0;
    std::int64_t distinct_discarded = 0;
    bool separable = false;
    std::string warning;
    std::string notice;

    double discarded_fraction() const {
        return total == 0 ? 0.0 : static_cast<double>(discarded_I1 + discarded_I0) / static_cast<double>(total);
    }
};

struct DiscardResult {
    std::vector<LabeledSample> kept;  // original order
    DiscardReport report;
};

/// Removes samples that cannot influence the optimal threshold along a
/// single effective facet direction: label-1 samples strictly below
/// theta_lo and label-0 samples strictly above theta_hi. The extreme
/// witnesses of each class are always kept. With one class only, a single
/// witness survives and a warning is set.
DiscardResult discard_redundant(std::span<const LabeledSample> samples, std::span<const double> direction,
                                double rho = 0.0);

/// Multi-facet front end: one row is treated as the single effective facet;
/// any other shape passes the samples through unchanged with a notice.
DiscardResult discard_redundant(std::span<const LabeledSample> samples, const Matrix& normals, double rho = 0.0);

struct ThresholdInterval {
    double lo = 0.0;  // closed
    double hi = 0.0;  // open (inf when unbounded)
};

struct ThresholdResult {
    std::int64_t count = 0;
    std::vector<ThresholdInterval> optimal;  // ascending, maximal
};

/// Exact minimal disagreement over all thresholds, by a sweep over the
/// sorted projections.
ThresholdResult threshold_oracle(std::span<const Projection> proj);
ThresholdResult threshold_oracle(std::span<const LabeledSample> samples, std::span<const double> direction);

/// Disagreements of the threshold classifier at theta.
std::int64_t threshold_errors(std::span<const Projection> proj, double theta);

nlohmann::json to_json(const DiscardReport& r);

}  // namespace driftpac
