#pragma once

#include "driftpac/drift_sim.hpp"
#include "driftpac/polytope.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftpac {

enum class VarType { Continuous, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    VarType type = VarType::Continuous;
    double objective = 0.0;

    bool operator==(const Variable&) const = default;
};

struct Term {
    int var = 0;
    double coef = 0.0;

    bool operator==(const Term&) const = default;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;

    bool operator==(const Constraint&) const = default;
};

/// Where each family of variables of the minimal-disagreement program lives.
/// Index -1 marks an absent variable (z for label-1 samples, a in fixed mode).
struct DisagreementLayout {
    std::size_t n = 0;
    std::size_t n_f = 0;
    double rho = 0.0;
    std::vector<std::size_t> I0, I1;
    std::optional<Matrix> fixed_A;
    BigM big_m;
    std::vector<LabeledSample> samples;
    std::vector<std::vector<int>> a_var;  // [j][k]
    std::vector<int> b_var;               // [j]
    std::vector<std::vector<int>> s_var;  // [i][j]
    std::vector<std::vector<int>> z_var;  // [i][j]
    std::vector<int> v_var;               // [i]

    bool operator==(const DisagreementLayout&) const = default;
};

/// Solver-neutral mixed-binary linear program, minimization.
struct MilpModel {
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    /// Secondary objective for the tie-break stage; empty when unused.
    std::vector<double> tie_break;
    std::optional<DisagreementLayout> layout;

    int add_variable(std::string name, double lower, double upper, VarType type, double objective = 0.0);
    void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

    std::size_t num_binaries() const;
    /// True iff only binaries carry objective weight and all weights are integral.
    bool integral_objective() const;
    double objective_value(std::span<const double> x) const;

    bool operator==(const MilpModel&) const = default;
};

enum class TieBreak { None, OffsetSum };

struct BuildOptions {
    std::size_t n_f = 1;
    BoxDomain domain;
    CoeffBox coeffs;
    std::optional<Matrix> fixed_A;
    double rho = 1e-6;
    TieBreak tie_break = TieBreak::OffsetSum;
    double big_m_margin = 1.0;
};

/// Minimal-disagreement program over convex polytopes with n_f facets:
///
///   min sum_i v_i
///   i in I1:  a_j x_i + b_j <= s_ij                      (all j)
///             sum_j s_ij - v_i sum_j M_j <= 0
///   i in I0:  a_j x_i + b_j <= M_j (1 - z_ij)            (all j)
///             a_j x_i + b_j >= rho + (m_j - rho) z_ij - s_ij  (all j)
///             sum_j z_ij <= n_f - 1
///             sum_j s_ij + v_i sum_j (m_j - rho) <= 0
///
/// Rows are emitted sample by sample, facets in order within a sample.
MilpModel build_model(std::span<const LabeledSample> samples, const BuildOptions& opts);

/// Copy of `model` whose objective is the tie-break vector and which keeps the
/// primary objective at most `primary_bound`.
MilpModel tie_break_stage(const MilpModel& model, double primary_bound);

struct Violation {
    std::string what;  // constraint or variable name
    double amount = 0.0;
};

struct SolutionCheck {
    std::vector<Violation> violations;
    double sum_v = 0.0;
    std::int64_t true_disagreements = 0;
    /// Label-0 samples with positive slack whose hypothesis label still agrees.
    std::vector<std::size_t> slack_but_agrees;
    bool feasible() const { return violations.empty(); }
};

/// Verifies bounds, integrality and every row; recounts the decoded
/// polytope's disagreements against the stored samples.
SolutionCheck check_solution(const MilpModel& model, std::span<const double> assignment,
                             double feas_tol = 1e-7, double int_tol = 1e-6);

/// Extracts the hypothesis (A, b); throws if the assignment is infeasible.
Polytope decode_hypothesis(const MilpModel& model, std::span<const double> assignment,
                           double feas_tol = 1e-7, double int_tol = 1e-6);

/// Lowers each offset b_j by at most feas_tol (relative) so that label-1
/// samples with v_i = 0 satisfy a_j . x_i + b_j <= 0 exactly in floating point.
/// Kept only if the decoded polytope's disagreement count does not grow.
void polish_offsets(const MilpModel& model, std::span<double> assignment, double feas_tol = 1e-7);

/// Facets whose normal has sup-norm below `threshold` (free-normal mode only).
std::vector<std::size_t> small_normal_rows(const Polytope& p, double threshold = 0.1);

}  // namespace driftpac
