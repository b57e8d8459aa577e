#pragma once

#include "driftpac/lp_simplex.hpp"
#include "driftpac/milp_model.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace driftpac {

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit, TimeLimit, NodeLimit, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolveLimits {
    double time_limit_s = std::numeric_limits<double>::infinity();
    std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
    /// Relative gap (incumbent - bound) / max(1, |incumbent|) at which to stop.
    double gap = 0.0;
    double feas_tol = 1e-7;
    double int_tol = 1e-6;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::infinity();
    double bound = -std::numeric_limits<double>::infinity();
    std::int64_t nodes = 0;
    std::int64_t lp_iterations = 0;
    double seconds = 0.0;
    double feas_tol = 0.0;
    double int_tol = 0.0;
    std::string method;

    bool has_incumbent() const { return !x.empty(); }
};

/// Best-bound branch-and-bound over the binaries with dense-simplex
/// relaxations. Branches on the most fractional binary (lowest index on
/// ties). With an integral objective a node is pruned once its bound exceeds
/// incumbent - 1 + tolerance.
SolveResult branch_and_bound(const MilpModel& model, const SolveLimits& limits = {});

}  // namespace driftpac
