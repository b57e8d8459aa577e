#include "driftpac/fit.hpp"

#include "driftpac/offset_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driftpac {

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Auto: return "auto";
        case SolverKind::BranchAndBound: return "bnb";
        case SolverKind::OffsetSearch: return "offset";
    }
    return "auto";
}

SolverKind solver_kind_from_string(const std::string& s) {
    if (s == "auto") return SolverKind::Auto;
    if (s == "bnb") return SolverKind::BranchAndBound;
    if (s == "offset") return SolverKind::OffsetSearch;
    throw std::invalid_argument("unknown solver '" + s + "' (expected auto, bnb or offset)");
}

FitResult fit(const MilpModel& model, const FitOptions& opts) {
    const bool fixed = model.layout && model.layout->fixed_A;
    SolverKind kind = opts.solver;
    if (kind == SolverKind::Auto) kind = fixed ? SolverKind::OffsetSearch : SolverKind::BranchAndBound;
    if (kind == SolverKind::OffsetSearch && !fixed)
        throw std::invalid_argument("offset search requires fixed facet normals");

    FitResult out;
    out.stage1 = kind == SolverKind::OffsetSearch ? solve_fixed_normals(model, opts.limits)
                                                  : branch_and_bound(model, opts.limits);
    if (!out.stage1.has_incumbent()) return out;
    out.x = out.stage1.x;

    const bool want_tie = opts.tie_break && model.tie_break.size() == model.variables.size();
    if (want_tie && out.stage1.status == SolveStatus::Optimal) {
        const double limit = std::round(out.stage1.objective);
        SolveResult s2 = kind == SolverKind::OffsetSearch
                             ? solve_fixed_normals_tie_break(model, limit, opts.limits)
                             : branch_and_bound(tie_break_stage(model, limit + 0.5), opts.limits);
        if (s2.has_incumbent() && std::round(model.objective_value(s2.x)) <= limit)
            out.x = s2.x;
        else
            out.warnings.push_back("tie-break stage returned no usable assignment; keeping stage-1 solution");
        out.stage2 = std::move(s2);
    } else if (want_tie) {
        out.warnings.push_back("stage 1 stopped before proving optimality; tie-break stage skipped");
    }

    const auto& tol = opts.limits;
    out.check = check_solution(model, out.x, tol.feas_tol, tol.int_tol);
    out.violations = static_cast<std::int64_t>(std::llround(out.check.sum_v));
    if (!out.check.feasible()) {
        out.warnings.push_back("final assignment violates " + out.check.violations.front().what);
        return out;
    }
    out.hypothesis = decode_hypothesis(model, out.x, tol.feas_tol, tol.int_tol);
    if (out.hypothesis.dim() == 2) {
        try {
            out.exact_area = volume_surrogate(out.hypothesis, VolumeMode::Exact2D);
        } catch (const std::domain_error&) {
        }
    }
    if (!fixed) {
        out.small_rows = small_normal_rows(out.hypothesis);
        if (!out.small_rows.empty())
            out.warnings.push_back("hypothesis has facet normals with sup-norm below 0.1");
    }
    return out;
}

BuildOptions aeb_build_options(const aeb::AebParams& params, std::size_t facets, double rho,
                               const std::optional<ThetaWindow>& window) {
    if (facets != 1 && facets != 4) throw std::invalid_argument("braking model supports 1 or 4 facets");
    BuildOptions o;
    o.domain = params.domain();
    o.rho = rho;
    o.n_f = facets;
    const Matrix all = params.facet_normals();
    constexpr std::size_t kEffective = 2;
    Matrix A = facets == 4 ? all : Matrix::from_rows({{all(kEffective, 0), all(kEffective, 1)}});

    // range of a_j . x over the domain box
    auto span_of = [&](std::span<const double> a) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double p = a[k] * o.domain.lower[k], q = a[k] * o.domain.upper[k];
            lo += std::min(p, q);
            hi += std::max(p, q);
        }
        return std::pair{lo, hi};
    };

    std::vector<double> b_lo(facets), b_hi(facets);
    for (std::size_t j = 0; j < facets; ++j) {
        const auto [lo, hi] = span_of(A.row(j));
        const bool effective = facets == 1 || j == kEffective;
        if (!effective) {
            b_lo[j] = b_hi[j] = -hi - 1.0;
            continue;
        }
        b_lo[j] = -hi - 1.0;
        b_hi[j] = -lo + 1.0;
        if (window) {
            // label 1 iff t <= theta with theta = -b
            if (std::isfinite(window->hi)) b_lo[j] = std::max(b_lo[j], -window->hi);
            if (std::isfinite(window->lo)) b_hi[j] = std::min(b_hi[j], -window->lo);
            if (b_lo[j] > b_hi[j]) throw std::invalid_argument("threshold window lies outside the offset range");
        }
    }
    o.coeffs = CoeffBox::fixed_normals(A, b_lo, b_hi);
    o.fixed_A = std::move(A);
    o.tie_break = TieBreak::OffsetSum;
    return o;
}

nlohmann::json to_json(const SolveResult& r, bool include_timing) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    nlohmann::json j;
    j["status"] = to_string(r.status);
    j["method"] = r.method;
    j["objective"] = num(r.objective);
    j["bound"] = num(r.bound);
    j["nodes"] = r.nodes;
    j["lp_iterations"] = r.lp_iterations;
    j["feas_tol"] = r.feas_tol;
    j["int_tol"] = r.int_tol;
    if (include_timing) j["seconds"] = r.seconds;
    return j;
}

nlohmann::json to_json(const FitResult& r, bool include_timing) {
    nlohmann::json j;
    j["stage1"] = to_json(r.stage1, include_timing);
    j["stage2"] = r.stage2 ? to_json(*r.stage2, include_timing) : nlohmann::json(nullptr);
    j["violations"] = r.violations;
    j["true_disagreements"] = r.check.true_disagreements;
    j["feasible"] = r.check.feasible();
    j["slack_but_agrees"] = r.check.slack_but_agrees.size();
    j["exact_area"] = r.exact_area ? nlohmann::json(*r.exact_area) : nlohmann::json(nullptr);
    j["small_rows"] = r.small_rows;
    j["warnings"] = r.warnings;
    return j;
}

}  // namespace driftpac
