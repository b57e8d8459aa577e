#include "driftpac/branch_and_bound.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace driftpac {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::GapLimit: return "gap_limit";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::NodeLimit: return "node_limit";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

struct Node {
    std::int64_t id = 0;
    int depth = 0;
    double bound = 0.0;
    std::vector<std::int8_t> fixed;  // per binary: -1 free, 0, 1
    std::vector<double> x;           // relaxation solution
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

class Search {
  public:
    Search(const MilpModel& model, const SolveLimits& limits)
        : model_(model), limits_(limits), base_(lp::relaxation(model)), integral_(model.integral_objective()) {
        for (std::size_t k = 0; k < model.variables.size(); ++k)
            if (model.variables[k].type == VarType::Binary) binaries_.push_back(k);
        lp_opts_.feas_tol = limits.feas_tol;
    }

    SolveResult run() {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        };
        res_.method = "branch_and_bound";
        res_.feas_tol = limits_.feas_tol;
        res_.int_tol = limits_.int_tol;

        Node root;
        root.fixed.assign(binaries_.size(), -1);
        const auto st = relax(root);
        if (st != lp::LpStatus::Optimal) {
            res_.nodes = 1;
            res_.status = st == lp::LpStatus::Infeasible  ? SolveStatus::Infeasible
                          : st == lp::LpStatus::Unbounded ? SolveStatus::Unbounded
                                                          : SolveStatus::NumericalFailure;
            res_.seconds = elapsed();
            return res_;
        }
        rounding_heuristic(root);

        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        open.push(std::move(root));
        std::int64_t next_id = 1;
        SolveStatus stop = SolveStatus::Optimal;

        while (!open.empty()) {
            if (elapsed() > limits_.time_limit_s) {
                stop = SolveStatus::TimeLimit;
                break;
            }
            if (res_.nodes >= limits_.node_limit) {
                stop = SolveStatus::NodeLimit;
                break;
            }
            if (limits_.gap > 0.0 && res_.has_incumbent()) {
                const double g = (res_.objective - open.top().bound) / std::max(1.0, std::fabs(res_.objective));
                if (g <= limits_.gap) {
                    stop = SolveStatus::GapLimit;
                    break;
                }
            }
            Node node = open.top();
            open.pop();
            if (node.id != 0 && prunable(node.bound)) continue;
            ++res_.nodes;

            const std::size_t branch = most_fractional(node.x);
            if (branch == binaries_.size()) {
                consider(node.x);
                continue;
            }
            for (std::int8_t val : {std::int8_t{0}, std::int8_t{1}}) {
                Node child;
                child.id = next_id++;
                child.depth = node.depth + 1;
                child.fixed = node.fixed;
                child.fixed[branch] = val;
                if (relax(child) != lp::LpStatus::Optimal) continue;
                if (child.bound < node.bound) child.bound = node.bound;
                if (prunable(child.bound)) continue;
                if (most_fractional(child.x) == binaries_.size()) {
                    consider(child.x);
                    continue;
                }
                open.push(std::move(child));
            }
        }

        if (stop == SolveStatus::Optimal) {
            res_.status = res_.has_incumbent() ? SolveStatus::Optimal : SolveStatus::Infeasible;
            if (res_.has_incumbent()) res_.bound = res_.objective;
        } else {
            res_.status = stop;
            double b = res_.has_incumbent() ? res_.objective : std::numeric_limits<double>::infinity();
            if (!open.empty()) b = std::min(b, open.top().bound);
            res_.bound = b;
        }
        res_.seconds = elapsed();
        return res_;
    }

  private:
    lp::LpStatus relax(Node& node) {
        lp::LpProblem p = base_;
        for (std::size_t k = 0; k < binaries_.size(); ++k) {
            if (node.fixed[k] < 0) continue;
            p.lower[binaries_[k]] = p.upper[binaries_[k]] = node.fixed[k];
        }
        auto r = lp::solve_lp(p, lp_opts_);
        res_.lp_iterations += r.iterations;
        if (r.status == lp::LpStatus::Optimal) {
            node.bound = r.value;
            node.x = std::move(r.x);
        }
        return r.status;
    }

    bool prunable(double bound) const {
        if (!res_.has_incumbent()) return false;
        if (integral_) return bound > res_.objective - 1.0 + 1e-9;
        return bound >= res_.objective - 1e-9 * std::max(1.0, std::fabs(res_.objective));
    }

    std::size_t most_fractional(const std::vector<double>& x) const {
        std::size_t best = binaries_.size();
        double best_dist = 0.5;
        for (std::size_t k = 0; k < binaries_.size(); ++k) {
            const double v = x[binaries_[k]];
            const double frac = v - std::floor(v);
            if (frac <= limits_.int_tol || frac >= 1.0 - limits_.int_tol) continue;
            const double dist = std::fabs(frac - 0.5);
            if (best == binaries_.size() || dist < best_dist) {
                best = k;
                best_dist = dist;
            }
        }
        return best;
    }

    void consider(std::vector<double> x) {
        for (std::size_t k : binaries_) x[k] = std::round(x[k]);
        const double obj = model_.objective_value(x);
        if (!res_.has_incumbent() || obj < res_.objective - 1e-12) {
            res_.objective = obj;
            res_.x = std::move(x);
        }
    }

    // Round the root relaxation's binaries up and down, re-solve the
    // continuous part for each, keep the best feasible outcome.
    void rounding_heuristic(const Node& root) {
        for (int mode = 0; mode < 2; ++mode) {
            Node trial;
            trial.fixed.assign(binaries_.size(), -1);
            for (std::size_t k = 0; k < binaries_.size(); ++k) {
                const double v = root.x[binaries_[k]];
                trial.fixed[k] = static_cast<std::int8_t>(mode == 0 ? (v > limits_.int_tol ? 1 : 0)
                                                                    : (v >= 0.5 ? 1 : 0));
            }
            if (relax(trial) == lp::LpStatus::Optimal) consider(trial.x);
        }
    }

    const MilpModel& model_;
    SolveLimits limits_;
    lp::LpProblem base_;
    lp::LpOptions lp_opts_;
    bool integral_;
    std::vector<std::size_t> binaries_;
    SolveResult res_;
};

}  // namespace

SolveResult branch_and_bound(const MilpModel& model, const SolveLimits& limits) {
    for (const auto& v : model.variables)
        if (v.type == VarType::Binary && (v.lower < 0.0 || v.upper > 1.0))
            throw std::invalid_argument("branch_and_bound: binary variable " + v.name + " has bounds outside [0,1]");
    Search s(model, limits);
    auto res = s.run();
    if (res.has_incumbent()) polish_offsets(model, res.x, limits.feas_tol);
    return res;
}

}  // namespace driftpac
