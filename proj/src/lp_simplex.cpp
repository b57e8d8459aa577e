#include "driftpac/lp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driftpac::lp {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

LpProblem relaxation(const MilpModel& model) {
    LpProblem p;
    for (const auto& v : model.variables) {
        p.cost.push_back(v.objective);
        p.lower.push_back(v.lower);
        p.upper.push_back(v.upper);
    }
    for (const auto& c : model.constraints) p.rows.push_back({c.terms, c.sense, c.rhs});
    return p;
}

namespace {

// Dense tableau over shifted variables x' = x - lower with columns
// [structural | row slack | artificial]. Nonbasic columns rest at 0 or at
// their upper bound.
class LpTableau {
  public:
    LpTableau(const LpProblem& p, const LpOptions& o) : opts_(o), n_(p.num_vars()), m_(p.rows.size()) {
        cols_ = n_ + 2 * m_;
        width_ = cols_ + 1;
        t_.assign(m_ * width_, 0.0);
        ub_.assign(cols_, kInf);
        at_upper_.assign(cols_, false);
        basis_.assign(m_, 0);
        is_basic_.assign(cols_, false);

        for (std::size_t j = 0; j < n_; ++j) {
            if (!std::isfinite(p.lower[j])) throw std::invalid_argument("solve_lp: lower bounds must be finite");
            ub_[j] = p.upper[j] - p.lower[j];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            const Row& row = p.rows[r];
            double rhs = row.rhs;
            for (const auto& term : row.terms) {
                at(r, static_cast<std::size_t>(term.var)) += term.coef;
                rhs -= term.coef * p.lower[static_cast<std::size_t>(term.var)];
            }
            const std::size_t slack = n_ + r;
            if (row.sense == Sense::LessEqual) at(r, slack) = 1.0;
            if (row.sense == Sense::GreaterEqual) at(r, slack) = -1.0;
            if (row.sense == Sense::Equal) ub_[slack] = 0.0;
            rhs_(r) = rhs;
            if (rhs < 0.0) {
                for (std::size_t j = 0; j < width_; ++j) t_[r * width_ + j] = -t_[r * width_ + j];
            }
            const std::size_t art = n_ + m_ + r;
            if (at(r, slack) == 1.0 && row.sense != Sense::Equal) {
                set_basic(r, slack);
                ub_[art] = 0.0;
            } else {
                at(r, art) = 1.0;
                set_basic(r, art);
            }
        }
    }

    LpResult run(const LpProblem& p) {
        LpResult res;
        const std::int64_t limit = opts_.max_iterations > 0
                                       ? opts_.max_iterations
                                       : static_cast<std::int64_t>(50 * (cols_ + m_) + 1000);

        // Phase 1: minimize the sum of artificials.
        std::vector<double> cost(cols_, 0.0);
        bool any_art = false;
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t art = n_ + m_ + r;
            if (basis_[r] == art) {
                cost[art] = 1.0;
                any_art = true;
            }
        }
        if (any_art) {
            const auto st = optimize(cost, limit, res);
            if (st != LpStatus::Optimal) {
                res.status = st == LpStatus::Unbounded ? LpStatus::NumericalFailure : st;
                return res;
            }
            double infeas = 0.0, scale = 1.0;
            const auto beta = basic_values();
            for (std::size_t r = 0; r < m_; ++r) {
                scale = std::max(scale, std::fabs(rhs_(r)));
                if (basis_[r] >= n_ + m_) infeas += beta[r];
            }
            if (infeas > opts_.feas_tol * scale) {
                res.status = LpStatus::Infeasible;
                return res;
            }
            drive_out_artificials();
        }
        for (std::size_t r = 0; r < m_; ++r) ub_[n_ + m_ + r] = 0.0;

        // Phase 2.
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) cost[j] = p.cost[j];
        const auto st = optimize(cost, limit, res);
        if (st != LpStatus::Optimal) {
            res.status = st;
            return res;
        }

        res.x.assign(n_, 0.0);
        const auto beta = basic_values();
        std::vector<double> shifted(cols_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j)
            if (!is_basic_[j] && at_upper_[j]) shifted[j] = ub_[j];
        for (std::size_t r = 0; r < m_; ++r) shifted[basis_[r]] = beta[r];
        for (std::size_t j = 0; j < n_; ++j) {
            double v = p.lower[j] + shifted[j];
            // snap tiny bound excursions
            if (v < p.lower[j]) v = p.lower[j];
            if (v > p.upper[j]) v = p.upper[j];
            res.x[j] = v;
        }
        res.value = 0.0;
        for (std::size_t j = 0; j < n_; ++j) res.value += p.cost[j] * res.x[j];

        double worst = 0.0;
        for (const auto& row : p.rows) {
            double lhs = 0.0, scale = std::max(1.0, std::fabs(row.rhs));
            for (const auto& term : row.terms) {
                const double v = term.coef * res.x[static_cast<std::size_t>(term.var)];
                lhs += v;
                scale = std::max(scale, std::fabs(v));
            }
            double excess = 0.0;
            if (row.sense != Sense::GreaterEqual) excess = std::max(excess, lhs - row.rhs);
            if (row.sense != Sense::LessEqual) excess = std::max(excess, row.rhs - lhs);
            worst = std::max(worst, excess / scale);
        }
        res.max_residual = worst;
        res.status = worst > 1e3 * opts_.feas_tol ? LpStatus::NumericalFailure : LpStatus::Optimal;
        return res;
    }

  private:
    double& at(std::size_t r, std::size_t j) { return t_[r * width_ + j]; }
    double at(std::size_t r, std::size_t j) const { return t_[r * width_ + j]; }
    double& rhs_(std::size_t r) { return t_[r * width_ + cols_]; }
    double rhs_(std::size_t r) const { return t_[r * width_ + cols_]; }

    void set_basic(std::size_t r, std::size_t j) {
        basis_[r] = j;
        is_basic_[j] = true;
        at_upper_[j] = false;
    }

    std::vector<double> basic_values() const {
        std::vector<double> beta(m_);
        for (std::size_t r = 0; r < m_; ++r) beta[r] = rhs_(r);
        for (std::size_t j = 0; j < cols_; ++j) {
            if (is_basic_[j] || !at_upper_[j]) continue;
            const double u = ub_[j];
            for (std::size_t r = 0; r < m_; ++r) beta[r] -= at(r, j) * u;
        }
        return beta;
    }

    std::vector<double> reduced_costs(const std::vector<double>& cost) const {
        std::vector<double> d(cost);
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * at(r, j);
        }
        return d;
    }

    void pivot(std::size_t r, std::size_t j) {
        const double piv = at(r, j);
        double* prow = &t_[r * width_];
        for (std::size_t k = 0; k < width_; ++k) prow[k] /= piv;
        for (std::size_t q = 0; q < m_; ++q) {
            if (q == r) continue;
            double* row = &t_[q * width_];
            const double f = row[j];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < width_; ++k) row[k] -= f * prow[k];
            row[j] = 0.0;
        }
        is_basic_[basis_[r]] = false;
        set_basic(r, j);
    }

    LpStatus optimize(const std::vector<double>& cost, std::int64_t limit, LpResult& res) {
        std::vector<double> d = reduced_costs(cost);
        bool bland = false;
        int degenerate_run = 0;
        while (true) {
            if (res.iterations >= limit) return LpStatus::IterationLimit;
            if (res.iterations % 100 == 99) d = reduced_costs(cost);

            // pricing
            std::size_t enter = cols_;
            double best = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (is_basic_[j] || ub_[j] == 0.0) continue;
                const double score = at_upper_[j] ? d[j] : -d[j];
                if (score <= opts_.opt_tol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (score > best) {
                    best = score;
                    enter = j;
                }
            }
            if (enter == cols_) return LpStatus::Optimal;
            ++res.iterations;

            const double dir = at_upper_[enter] ? -1.0 : 1.0;
            const auto beta = basic_values();
            double theta = ub_[enter];
            std::size_t leave = m_;
            bool leave_to_upper = false;
            double leave_alpha = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double alpha = dir * at(r, enter);
                double lim;
                bool to_upper;
                if (alpha > opts_.pivot_tol) {
                    lim = std::max(0.0, beta[r]) / alpha;
                    to_upper = false;
                } else if (alpha < -opts_.pivot_tol && std::isfinite(ub_[basis_[r]])) {
                    lim = std::max(0.0, ub_[basis_[r]] - beta[r]) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }
                bool take = false;
                if (lim < theta - 1e-12) {
                    take = true;
                } else if (lim <= theta + 1e-12 && leave < m_) {
                    take = bland ? basis_[r] < basis_[leave] : std::fabs(alpha) > std::fabs(leave_alpha);
                }
                if (take) {
                    theta = lim;
                    leave = r;
                    leave_to_upper = to_upper;
                    leave_alpha = alpha;
                }
            }
            if (!std::isfinite(theta)) return LpStatus::Unbounded;

            if (theta <= 1e-12) {
                if (++degenerate_run >= opts_.degeneracy_threshold && !bland) {
                    bland = true;
                    res.bland_engaged = true;
                }
            } else {
                degenerate_run = 0;
            }

            if (leave == m_) {
                // bound flip
                at_upper_[enter] = !at_upper_[enter];
                continue;
            }
            const std::size_t out = basis_[leave];
            pivot(leave, enter);
            at_upper_[out] = leave_to_upper;
            // update reduced costs from the pivot row
            const double dj = d[enter];
            if (dj != 0.0) {
                for (std::size_t k = 0; k < cols_; ++k) d[k] -= dj * at(leave, k);
                d[enter] = 0.0;
            }
        }
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_ + m_) continue;
            std::size_t best = cols_;
            double mag = opts_.pivot_tol;
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (is_basic_[j]) continue;
                if (std::fabs(at(r, j)) > mag) {
                    mag = std::fabs(at(r, j));
                    best = j;
                }
            }
            if (best == cols_) continue;  // redundant row; artificial stays basic at zero
            pivot(r, best);
        }
    }

    LpOptions opts_;
    std::size_t n_, m_, cols_ = 0, width_ = 0;
    std::vector<double> t_;
    std::vector<double> ub_;
    std::vector<bool> at_upper_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_basic_;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, const LpOptions& opts) {
    if (problem.lower.size() != problem.num_vars() || problem.upper.size() != problem.num_vars())
        throw std::invalid_argument("solve_lp: bound vectors must match the cost vector");
    for (std::size_t j = 0; j < problem.num_vars(); ++j)
        if (problem.lower[j] > problem.upper[j]) {
            LpResult r;
            r.status = LpStatus::Infeasible;
            return r;
        }
    LpTableau tab(problem, opts);
    return tab.run(problem);
}

}  // namespace driftpac::lp
