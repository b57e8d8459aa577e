#pragma once

#include "driftpac/milp_model.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace driftpac::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

/// min c.x  s.t.  rows,  lower <= x <= upper. Lower bounds must be finite;
/// upper bounds may be +inf.
struct LpProblem {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Row> rows;

    std::size_t num_vars() const { return cost.size(); }
};

/// LP relaxation of a MilpModel (binaries relaxed to [0,1]) under the model's
/// own objective.
LpProblem relaxation(const MilpModel& model);

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);

struct LpOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-9;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int degeneracy_threshold = 50;
    std::int64_t max_iterations = 0;  // 0 = automatic
};

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> x;
    double value = 0.0;
    std::int64_t iterations = 0;
    bool bland_engaged = false;
    /// Largest row or bound residual of the returned point.
    double max_residual = 0.0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
LpResult solve_lp(const LpProblem& problem, const LpOptions& opts = {});

}  // namespace driftpac::lp
