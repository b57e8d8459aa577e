#pragma once

#include "driftpac/branch_and_bound.hpp"
#include "driftpac/drift_sim.hpp"
#include "driftpac/milp_model.hpp"
#include "driftpac/preprocess.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace driftpac {

enum class SolverKind {
    Auto,            // offset search for fixed normals, branch-and-bound otherwise
    BranchAndBound,
    OffsetSearch,
};

std::string to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

struct FitOptions {
    SolverKind solver = SolverKind::Auto;
    SolveLimits limits;
    bool tie_break = true;
};

struct FitResult {
    SolveResult stage1;
    std::optional<SolveResult> stage2;
    std::vector<double> x;  // final assignment
    Polytope hypothesis;
    SolutionCheck check;
    std::int64_t violations = 0;           // sum v at the final assignment
    std::optional<double> exact_area;      // 2-D hypotheses that are bounded
    std::vector<std::size_t> small_rows;   // free-normal rows with tiny sup-norm
    std::vector<std::string> warnings;

    bool ok() const { return !x.empty(); }
};

/// Two-stage solve: minimize the disagreement count, then (if the model has
/// a tie-break objective and stage 1 proved optimality) minimize the
/// tie-break objective with the count held at its optimum.
FitResult fit(const MilpModel& model, const FitOptions& opts = {});

/// Model options for the braking example. With facets == 4 the rotated
/// rectangle is used and the three facets other than the effective one are
/// pinned one unit outside the domain; with facets == 1 only the effective
/// facet is kept. A threshold window from the discard step restricts the
/// effective offset.
BuildOptions aeb_build_options(const aeb::AebParams& params, std::size_t facets, double rho,
                               const std::optional<ThetaWindow>& window = std::nullopt);

nlohmann::json to_json(const SolveResult& r, bool include_timing = false);
nlohmann::json to_json(const FitResult& r, bool include_timing = false);

}  // namespace driftpac
