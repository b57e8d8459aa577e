#include "driftpac/milp_model.hpp"

#include <cmath>
#include <stdexcept>

namespace driftpac {

int MilpModel::add_variable(std::string name, double lower, double upper, VarType type, double objective) {
    variables.push_back({std::move(name), lower, upper, type, objective});
    return static_cast<int>(variables.size()) - 1;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    constraints.push_back({std::move(name), std::move(terms), sense, rhs});
}

std::size_t MilpModel::num_binaries() const {
    std::size_t k = 0;
    for (const auto& v : variables) k += v.type == VarType::Binary;
    return k;
}

bool MilpModel::integral_objective() const {
    for (const auto& v : variables) {
        if (v.objective == 0.0) continue;
        if (v.type != VarType::Binary || v.objective != std::round(v.objective)) return false;
    }
    return true;
}

double MilpModel::objective_value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < variables.size(); ++k) s += variables[k].objective * x[k];
    return s;
}

namespace {

std::string idx(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

MilpModel build_model(std::span<const LabeledSample> samples, const BuildOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("build_model: empty sample set");
    if (!(opts.rho >= 0.0)) throw std::invalid_argument("build_model: rho must be >= 0");
    const std::size_t n = opts.domain.dim();
    const std::size_t nf = opts.n_f;
    if (nf < 1) throw std::invalid_argument("build_model: facet budget must be >= 1");
    if (opts.coeffs.facets() != nf) throw std::invalid_argument("build_model: coefficient box must have n_f rows");
    for (std::size_t j = 0; j < nf; ++j) {
        if (opts.coeffs.lower[j].size() != n + 1 || opts.coeffs.upper[j].size() != n + 1)
            throw std::invalid_argument("build_model: coefficient box rows must have length n+1");
        for (std::size_t k = 0; k <= n; ++k)
            if (!(opts.coeffs.lower[j][k] <= opts.coeffs.upper[j][k]))
                throw std::invalid_argument("build_model: coefficient box has lower > upper");
    }
    for (const auto& s : samples) {
        if (s.x.size() != n) throw std::invalid_argument("build_model: sample dimension mismatch");
        if (s.label > 1) throw std::invalid_argument("build_model: labels must be 0 or 1");
        if (!opts.domain.contains(s.x, 1e-9)) throw std::invalid_argument("build_model: sample outside domain");
    }

    CoeffBox box = opts.coeffs;
    const bool fixed = opts.fixed_A.has_value();
    if (fixed) {
        const Matrix& A = *opts.fixed_A;
        if (A.rows != nf || A.cols != n) throw std::invalid_argument("build_model: fixed normals must be n_f x n");
        for (std::size_t j = 0; j < nf; ++j)
            for (std::size_t k = 0; k < n; ++k) box.lower[j][k] = box.upper[j][k] = A(j, k);
    } else {
        if (!box.origin_interior())
            throw std::invalid_argument("build_model: coefficient box must contain the origin in its interior");
        for (std::size_t j = 0; j < nf; ++j) {
            bool scaled = false;
            for (std::size_t k = 0; k < n; ++k)
                scaled |= std::fabs(box.lower[j][k]) >= 1.0 && std::fabs(box.upper[j][k]) >= 1.0;
            if (!scaled)
                throw std::invalid_argument(
                    "build_model: free normals need |lower|,|upper| >= 1 on at least one coordinate per facet");
        }
    }

    MilpModel model;
    DisagreementLayout lay;
    lay.n = n;
    lay.n_f = nf;
    lay.rho = opts.rho;
    lay.fixed_A = opts.fixed_A;
    lay.big_m = big_m_bounds(opts.domain, box, opts.big_m_margin);
    lay.samples.assign(samples.begin(), samples.end());
    const auto& M = lay.big_m.upper;
    const auto& mlo = lay.big_m.lower;
    const double rho = opts.rho;

    lay.a_var.assign(nf, std::vector<int>(n, -1));
    lay.b_var.assign(nf, -1);
    if (!fixed)
        for (std::size_t j = 0; j < nf; ++j)
            for (std::size_t k = 0; k < n; ++k)
                lay.a_var[j][k] = model.add_variable("a_" + idx(j) + "_" + idx(k), box.lower[j][k],
                                                     box.upper[j][k], VarType::Continuous);
    for (std::size_t j = 0; j < nf; ++j)
        lay.b_var[j] = model.add_variable("b_" + idx(j), box.lower[j][n], box.upper[j][n], VarType::Continuous);

    const std::size_t m = samples.size();
    lay.s_var.assign(m, std::vector<int>(nf, -1));
    lay.z_var.assign(m, std::vector<int>(nf, -1));
    lay.v_var.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        const bool one = samples[i].label == 1;
        (one ? lay.I1 : lay.I0).push_back(i);
        for (std::size_t j = 0; j < nf; ++j)
            lay.s_var[i][j] = model.add_variable("s_" + idx(i) + "_" + idx(j), 0.0, one ? M[j] : rho - mlo[j],
                                                 VarType::Continuous);
        if (!one)
            for (std::size_t j = 0; j < nf; ++j)
                lay.z_var[i][j] = model.add_variable("z_" + idx(i) + "_" + idx(j), 0.0, 1.0, VarType::Binary);
        lay.v_var[i] = model.add_variable("v_" + idx(i), 0.0, 1.0, VarType::Binary, 1.0);
    }

    // a_j . x_i + b_j as (terms, constant)
    auto facet_expr = [&](std::size_t i, std::size_t j, std::vector<Term>& terms) -> double {
        const auto& x = samples[i].x;
        double constant = 0.0;
        if (fixed) {
            constant = dot(opts.fixed_A->row(j), x);
        } else {
            for (std::size_t k = 0; k < n; ++k)
                if (x[k] != 0.0) terms.push_back({lay.a_var[j][k], x[k]});
        }
        terms.push_back({lay.b_var[j], 1.0});
        return constant;
    };

    double sumM = 0.0, sum_m_rho = 0.0;
    for (std::size_t j = 0; j < nf; ++j) {
        sumM += M[j];
        sum_m_rho += mlo[j] - rho;
    }

    for (std::size_t i = 0; i < m; ++i) {
        const std::string si = idx(i);
        if (samples[i].label == 1) {
            for (std::size_t j = 0; j < nf; ++j) {
                std::vector<Term> t;
                const double c = facet_expr(i, j, t);
                t.push_back({lay.s_var[i][j], -1.0});
                model.add_constraint("in_" + si + "_" + idx(j), std::move(t), Sense::LessEqual, -c);
            }
            std::vector<Term> t;
            for (std::size_t j = 0; j < nf; ++j) t.push_back({lay.s_var[i][j], 1.0});
            t.push_back({lay.v_var[i], -sumM});
            model.add_constraint("count1_" + si, std::move(t), Sense::LessEqual, 0.0);
        } else {
            for (std::size_t j = 0; j < nf; ++j) {
                std::vector<Term> t;
                const double c = facet_expr(i, j, t);
                t.push_back({lay.z_var[i][j], M[j]});
                model.add_constraint("out_ub_" + si + "_" + idx(j), std::move(t), Sense::LessEqual, M[j] - c);
            }
            for (std::size_t j = 0; j < nf; ++j) {
                std::vector<Term> t;
                const double c = facet_expr(i, j, t);
                t.push_back({lay.z_var[i][j], -(mlo[j] - rho)});
                t.push_back({lay.s_var[i][j], 1.0});
                model.add_constraint("out_lb_" + si + "_" + idx(j), std::move(t), Sense::GreaterEqual, rho - c);
            }
            std::vector<Term> tz;
            for (std::size_t j = 0; j < nf; ++j) tz.push_back({lay.z_var[i][j], 1.0});
            model.add_constraint("zsum_" + si, std::move(tz), Sense::LessEqual, static_cast<double>(nf) - 1.0);
            std::vector<Term> t;
            for (std::size_t j = 0; j < nf; ++j) t.push_back({lay.s_var[i][j], 1.0});
            t.push_back({lay.v_var[i], sum_m_rho});
            model.add_constraint("count0_" + si, std::move(t), Sense::LessEqual, 0.0);
        }
    }

    if (opts.tie_break == TieBreak::OffsetSum) {
        model.tie_break.assign(model.variables.size(), 0.0);
        for (std::size_t j = 0; j < nf; ++j) model.tie_break[static_cast<std::size_t>(lay.b_var[j])] = -1.0;
    }
    model.layout = std::move(lay);
    return model;
}

MilpModel tie_break_stage(const MilpModel& model, double primary_bound) {
    if (model.tie_break.size() != model.variables.size())
        throw std::invalid_argument("tie_break_stage: model has no tie-break objective");
    MilpModel out = model;
    std::vector<Term> cut;
    for (std::size_t k = 0; k < model.variables.size(); ++k) {
        if (model.variables[k].objective != 0.0) cut.push_back({static_cast<int>(k), model.variables[k].objective});
        out.variables[k].objective = model.tie_break[k];
    }
    out.add_constraint("primary_cut", std::move(cut), Sense::LessEqual, primary_bound);
    out.tie_break.clear();
    return out;
}

namespace {

Polytope extract(const DisagreementLayout& lay, std::span<const double> x) {
    Matrix A = lay.fixed_A ? *lay.fixed_A : Matrix(lay.n_f, lay.n);
    if (!lay.fixed_A)
        for (std::size_t j = 0; j < lay.n_f; ++j)
            for (std::size_t k = 0; k < lay.n; ++k) A(j, k) = x[static_cast<std::size_t>(lay.a_var[j][k])];
    std::vector<double> b(lay.n_f);
    for (std::size_t j = 0; j < lay.n_f; ++j) b[j] = x[static_cast<std::size_t>(lay.b_var[j])];
    return Polytope(std::move(A), std::move(b));
}

}  // namespace

SolutionCheck check_solution(const MilpModel& model, std::span<const double> x, double feas_tol, double int_tol) {
    if (x.size() != model.variables.size())
        throw std::invalid_argument("check_solution: assignment does not cover all variables");
    SolutionCheck out;
    for (std::size_t k = 0; k < model.variables.size(); ++k) {
        const auto& v = model.variables[k];
        if (x[k] < v.lower - feas_tol) out.violations.push_back({v.name + ".lower", v.lower - x[k]});
        if (x[k] > v.upper + feas_tol) out.violations.push_back({v.name + ".upper", x[k] - v.upper});
        if (v.type == VarType::Binary && std::fabs(x[k] - std::round(x[k])) > int_tol)
            out.violations.push_back({v.name + ".integrality", std::fabs(x[k] - std::round(x[k]))});
    }
    for (const auto& c : model.constraints) {
        double lhs = 0.0, scale = std::fabs(c.rhs);
        for (const auto& t : c.terms) {
            lhs += t.coef * x[static_cast<std::size_t>(t.var)];
            scale = std::max(scale, std::fabs(t.coef * x[static_cast<std::size_t>(t.var)]));
        }
        const double tol = feas_tol * std::max(1.0, scale);
        double excess = 0.0;
        if (c.sense != Sense::GreaterEqual) excess = std::max(excess, lhs - c.rhs);
        if (c.sense != Sense::LessEqual) excess = std::max(excess, c.rhs - lhs);
        if (excess > tol) out.violations.push_back({c.name, excess});
    }
    if (!model.layout) return out;

    const auto& lay = *model.layout;
    const Polytope p = extract(lay, x);
    for (std::size_t i = 0; i < lay.samples.size(); ++i) {
        const auto& s = lay.samples[i];
        out.sum_v += x[static_cast<std::size_t>(lay.v_var[i])];
        const int h = label(p, s.x);
        if (h != s.label) ++out.true_disagreements;
        if (s.label == 0) {
            double slack = 0.0;
            for (std::size_t j = 0; j < lay.n_f; ++j) slack += x[static_cast<std::size_t>(lay.s_var[i][j])];
            if (slack > feas_tol && h == 0) out.slack_but_agrees.push_back(i);
        }
    }
    return out;
}

void polish_offsets(const MilpModel& model, std::span<double> x, double feas_tol) {
    if (!model.layout) return;
    const auto& lay = *model.layout;
    if (x.size() != model.variables.size())
        throw std::invalid_argument("polish_offsets: assignment does not cover all variables");
    const Polytope before = extract(lay, x);
    auto count = [&](const Polytope& p) {
        std::int64_t c = 0;
        for (const auto& s : lay.samples) c += label(p, s.x) != s.label;
        return c;
    };
    Polytope after = before;
    for (std::size_t j = 0; j < lay.n_f; ++j) {
        const auto bj = static_cast<std::size_t>(lay.b_var[j]);
        double b = after.b[j];
        for (std::size_t i : lay.I1) {
            if (x[static_cast<std::size_t>(lay.v_var[i])] > 0.5) continue;
            const double ax = dot(after.A.row(j), lay.samples[i].x);
            if (ax + after.b[j] > 0.0 && ax + after.b[j] <= feas_tol * std::max(1.0, std::fabs(ax)))
                b = std::min(b, -ax);
        }
        if (b >= model.variables[bj].lower) after.b[j] = b;
    }
    if (after.b == before.b || count(after) > count(before)) return;
    for (std::size_t j = 0; j < lay.n_f; ++j) x[static_cast<std::size_t>(lay.b_var[j])] = after.b[j];
}

Polytope decode_hypothesis(const MilpModel& model, std::span<const double> x, double feas_tol, double int_tol) {
    if (!model.layout) throw std::invalid_argument("decode_hypothesis: model has no disagreement layout");
    const auto check = check_solution(model, x, feas_tol, int_tol);
    if (!check.feasible())
        throw std::invalid_argument("decode_hypothesis: infeasible assignment (" + check.violations.front().what + ")");
    return extract(*model.layout, x);
}

std::vector<std::size_t> small_normal_rows(const Polytope& p, double threshold) {
    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < p.facets(); ++j) {
        double sup = 0.0;
        for (double a : p.A.row(j)) sup = std::max(sup, std::fabs(a));
        if (sup < threshold) rows.push_back(j);
    }
    return rows;
}

}  // namespace driftpac
