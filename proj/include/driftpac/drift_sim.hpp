#pragma once

#include "driftpac/polytope.hpp"
#include "driftpac/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace driftpac {

struct LabeledSample {
    std::int64_t index = 0;
    std::vector<double> x;
    std::uint8_t label = 0;

    bool operator==(const LabeledSample&) const = default;
};

namespace aeb {

constexpr double kKmhToMs = 1.0 / 3.6;

inline double kmh_to_ms(double v_kmh) { return v_kmh * kKmhToMs; }
/// (v km/h)^2 expressed in m^2/s^2.
inline double kmh2_to_si(double v_kmh) { return kmh_to_ms(v_kmh) * kmh_to_ms(v_kmh); }

enum class MassDrift {
    Independent,  // m_i = omega_m * mass0, a fresh factor each step
    Compound,     // m_{i+1} = omega_m * m_i
};

std::string to_string(MassDrift d);
MassDrift mass_drift_from_string(const std::string& s);

/// Braking example configuration; all quantities SI.
struct AebParams {
    double l_min = 40.0;
    double l_max = 120.0;
    double v2_mean = kmh2_to_si(70.0);
    double v2_std = kmh2_to_si(20.0);
    /// v^2 draws outside [0, v2_mean + v2_cap_sd * v2_std] are redrawn.
    double v2_cap_sd = 10.0;
    double mass0 = 900.0;
    double force0 = 2600.0;
    double omega_f_mean = 1.0 - 3e-7;
    double omega_f_std = 1e-6;
    double omega_m_mean = 1.0;
    double omega_m_std = 1e-3;
    MassDrift mass_drift = MassDrift::Independent;
    std::uint64_t seed = 1;

    void validate() const;
    BoxDomain domain() const;
    /// atan(mass0 / (2 force0)), fixed from the initial parameters.
    double rotation_angle() const;
    /// Normals of the fixed rotated rectangle; row 2 (facet 3) is the one
    /// aligned with the safety boundary.
    Matrix facet_normals() const;
    /// Normal of the effective facet, (-cos t, sin t).
    std::vector<double> effective_direction() const;

    bool operator==(const AebParams&) const = default;
};

nlohmann::json to_json(const AebParams& p);
AebParams aeb_params_from_json(const nlohmann::json& j);

/// Safety labeler for one time step: safe iff 0.5 v^2 m / F <= l.
struct AebTarget {
    double mass = 0.0;
    double force = 0.0;

    double brake_ratio() const { return mass / force; }
    int label(double l, double v2) const;
    int operator()(std::span<const double> x) const { return label(x[0], x[1]); }

    bool operator==(const AebTarget&) const = default;
};

int aeb_label(double l, double v2, double mass, double force);

/// Same as aeb_label with speed given in km/h.
int aeb_label_kmh(double l, double v_kmh, double mass, double force);

/// One drift step from `prev` given the initial parameters.
AebTarget next_target(const AebTarget& prev, const AebParams& p, Rng& rng);

/// A point x = (l, v^2) from the fixed sampling distribution. Increments
/// `rejections` for every redrawn v^2.
std::array<double, 2> draw_point(const AebParams& p, Rng& rng, std::uint64_t* rejections = nullptr);

struct DriftTrace {
    AebParams config;
    std::vector<LabeledSample> samples;
    std::vector<double> brake_ratio;  // m_i / F_i for each sample
    AebTarget last_target;            // f_m
    AebTarget final_target;           // f_{m+1}
    std::uint64_t v2_rejections = 0;

    bool operator==(const DriftTrace&) const = default;
};

DriftTrace generate_trace(const AebParams& params, std::int64_t m);

/// Header line carries the config, seed, and terminal targets; then one
/// {"i","l","v2","label","brake_ratio"} object per line.
void write_trace_jsonl(const DriftTrace& t, std::ostream& os);
std::string trace_jsonl(const DriftTrace& t);
DriftTrace read_trace_jsonl(std::istream& is);
void write_trace_csv(const DriftTrace& t, std::ostream& os);

}  // namespace aeb

using Labeler = std::function<int(std::span<const double>)>;
using PointSampler = std::function<std::vector<double>(Rng&)>;

struct MuEstimate {
    double mu_hat = 0.0;
    std::vector<double> per_step;
};

/// Average over steps of the Monte Carlo estimate of P{f_i(x) != f_final(x)},
/// each step using n_mc fresh draws from its own substream of `seed`.
MuEstimate estimate_mu(std::span<const Labeler> steps, const Labeler& final_target,
                       const PointSampler& sampler, std::int64_t n_mc, std::uint64_t seed);

/// Specialization for braking traces (uses trace.brake_ratio and final_target).
MuEstimate estimate_mu(const aeb::DriftTrace& trace, std::int64_t n_mc, std::uint64_t seed);

}  // namespace driftpac
