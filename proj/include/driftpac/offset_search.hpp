#pragma once

#include "driftpac/branch_and_bound.hpp"
#include "driftpac/milp_model.hpp"

#include <span>
#include <vector>

namespace driftpac {

/// Exact solver for minimal-disagreement models whose facet normals are
/// fixed. Once the offsets b are fixed the program separates per sample, so
/// the search branches on b itself: each b_j ranges over the finite set of
/// breakpoints {-a_j.x_i, rho - a_j.x_i} inside its bounds, and a node (a
/// box of breakpoint ranges) is bounded below by the samples that disagree
/// everywhere in it. The returned assignment covers every model variable.
///
/// The tie-break variant minimizes the model's tie-break objective over
/// offsets whose count is at most `count_limit`.
SolveResult solve_fixed_normals(const MilpModel& model, const SolveLimits& limits = {});
SolveResult solve_fixed_normals_tie_break(const MilpModel& model, double count_limit,
                                          const SolveLimits& limits = {});

/// Minimal disagreement count of the model at offsets b, with the exact
/// semantics of the tolerance-rewritten constraints.
std::int64_t disagreement_at(const MilpModel& model, std::span<const double> offsets);

/// Completes (s, z, v) for fixed offsets so that every constraint holds and
/// sum v equals disagreement_at(model, offsets).
std::vector<double> assignment_for_offsets(const MilpModel& model, std::span<const double> offsets);

}  // namespace driftpac
