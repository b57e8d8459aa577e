#include "driftpac/offset_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace driftpac {

namespace {

struct Instance {
    std::size_t m = 0, nf = 0;
    double rho = 0.0;
    std::vector<double> t;        // m x nf, a_j . x_i
    std::vector<std::uint8_t> y;  // labels
    std::vector<double> lo, hi;   // offset bounds
    std::vector<std::vector<double>> cand;
    std::vector<double> tie;      // tie-break weight per offset

    double val(std::size_t i, std::size_t j, double b) const { return t[i * nf + j] + b; }
    double eps(std::size_t i, std::size_t j) const { return 1e-12 * (1.0 + std::fabs(t[i * nf + j])); }
};

const DisagreementLayout& fixed_layout(const MilpModel& model) {
    if (!model.layout || !model.layout->fixed_A)
        throw std::invalid_argument("offset search requires a model with fixed facet normals");
    return *model.layout;
}

Instance make_instance(const MilpModel& model) {
    const auto& lay = fixed_layout(model);
    Instance in;
    in.m = lay.samples.size();
    in.nf = lay.n_f;
    in.rho = lay.rho;
    in.t.resize(in.m * in.nf);
    for (std::size_t i = 0; i < in.m; ++i) {
        in.y.push_back(lay.samples[i].label);
        for (std::size_t j = 0; j < in.nf; ++j) in.t[i * in.nf + j] = dot(lay.fixed_A->row(j), lay.samples[i].x);
    }
    in.cand.resize(in.nf);
    for (std::size_t j = 0; j < in.nf; ++j) {
        const auto& var = model.variables[static_cast<std::size_t>(lay.b_var[j])];
        in.lo.push_back(var.lower);
        in.hi.push_back(var.upper);
        in.tie.push_back(model.tie_break.empty() ? 0.0 : model.tie_break[static_cast<std::size_t>(lay.b_var[j])]);
        auto& c = in.cand[j];
        c.push_back(var.lower);
        c.push_back(var.upper);
        for (std::size_t i = 0; i < in.m; ++i) {
            const double tij = in.t[i * in.nf + j];
            for (double v : {-tij, in.y[i] == 0 ? in.rho - tij : -tij})
                if (v >= var.lower && v <= var.upper) c.push_back(v);
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return in;
}

// Samples that disagree for every offset vector in [lo, hi]; exact when lo == hi.
std::int64_t forced(const Instance& in, std::span<const double> lo, std::span<const double> hi) {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < in.m; ++i) {
        if (in.y[i] == 1) {
            for (std::size_t j = 0; j < in.nf; ++j)
                if (in.val(i, j, lo[j]) > in.eps(i, j)) {
                    ++count;
                    break;
                }
        } else {
            bool all_below = true, in_gap = false;
            for (std::size_t j = 0; j < in.nf; ++j) {
                const double e = in.eps(i, j);
                const double top = in.val(i, j, hi[j]);
                if (top >= in.rho - e) all_below = false;
                if (in.val(i, j, lo[j]) > e && top < in.rho - e) in_gap = true;
            }
            count += all_below || in_gap;
        }
    }
    return count;
}

struct Box {
    std::int64_t id = 0;
    double key = 0.0;
    std::int64_t count_lb = 0;
    std::vector<std::size_t> l, h;
};

struct BoxOrder {
    bool operator()(const Box& a, const Box& b) const {
        if (a.key != b.key) return a.key > b.key;
        return a.id > b.id;
    }
};

class OffsetSearch {
  public:
    OffsetSearch(const Instance& in, const SolveLimits& limits) : in_(in), limits_(limits) {}

    // Stage 1 (count_limit < 0): minimize the count. Stage 2: minimize the
    // tie-break objective subject to count <= count_limit.
    SolveResult run(double count_limit, std::vector<double>& best_b) {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        };
        const bool stage2 = count_limit >= 0.0;
        SolveResult res;
        res.method = stage2 ? "offset_search_tie_break" : "offset_search";
        res.feas_tol = limits_.feas_tol;
        res.int_tol = limits_.int_tol;
        double incumbent = std::numeric_limits<double>::infinity();

        auto point = [&](const std::vector<std::size_t>& idx) {
            std::vector<double> b(in_.nf);
            for (std::size_t j = 0; j < in_.nf; ++j) b[j] = in_.cand[j][idx[j]];
            return b;
        };
        auto tie_value = [&](const std::vector<double>& b) {
            double s = 0.0;
            for (std::size_t j = 0; j < in_.nf; ++j) s += in_.tie[j] * b[j];
            return s;
        };
        auto offer = [&](const std::vector<std::size_t>& idx) {
            const auto b = point(idx);
            const double c = static_cast<double>(forced(in_, b, b));
            double score = c;
            if (stage2) {
                if (c > count_limit + 1e-9) return;
                score = tie_value(b);
            }
            if (score < incumbent) {
                incumbent = score;
                best_b = b;
            }
        };
        auto key_of = [&](const Box& box, std::int64_t& count_lb) {
            const auto lo = point(box.l), hi = point(box.h);
            count_lb = forced(in_, lo, hi);
            if (!stage2) return static_cast<double>(count_lb);
            double k = 0.0;
            for (std::size_t j = 0; j < in_.nf; ++j) k += std::min(in_.tie[j] * lo[j], in_.tie[j] * hi[j]);
            return k;
        };
        auto prunable = [&](double key, std::int64_t count_lb) {
            if (stage2 && count_lb > count_limit + 1e-9) return true;
            if (!std::isfinite(incumbent)) return false;
            if (!stage2) return key > incumbent - 1.0 + 1e-9;
            return key >= incumbent - 1e-12 * std::max(1.0, std::fabs(incumbent));
        };
        // Best corner for the tie-break objective, then the box midpoint.
        auto probe = [&](const Box& box) {
            if (stage2) {
                std::vector<std::size_t> c(in_.nf);
                for (std::size_t j = 0; j < in_.nf; ++j) c[j] = in_.tie[j] < 0.0 ? box.h[j] : box.l[j];
                offer(c);
            }
            std::vector<std::size_t> mid(in_.nf);
            for (std::size_t j = 0; j < in_.nf; ++j) mid[j] = (box.l[j] + box.h[j]) / 2;
            offer(mid);
        };

        Box root;
        for (std::size_t j = 0; j < in_.nf; ++j) {
            if (in_.cand[j].empty()) {
                res.status = SolveStatus::Infeasible;
                return res;
            }
            root.l.push_back(0);
            root.h.push_back(in_.cand[j].size() - 1);
        }
        root.key = key_of(root, root.count_lb);
        if (stage2 && root.count_lb > count_limit + 1e-9) {
            res.status = SolveStatus::Infeasible;
            res.nodes = 1;
            return res;
        }
        std::priority_queue<Box, std::vector<Box>, BoxOrder> open;
        open.push(root);
        std::int64_t next_id = 1;
        SolveStatus stop = SolveStatus::Optimal;
        while (!open.empty()) {
            if (elapsed() > limits_.time_limit_s) {
                stop = SolveStatus::TimeLimit;
                break;
            }
            if (res.nodes >= limits_.node_limit) {
                stop = SolveStatus::NodeLimit;
                break;
            }
            Box box = open.top();
            open.pop();
            if (box.id != 0 && prunable(box.key, box.count_lb)) continue;
            ++res.nodes;
            probe(box);

            std::size_t split = in_.nf;
            std::size_t widest = 0;
            for (std::size_t j = 0; j < in_.nf; ++j) {
                const std::size_t w = box.h[j] - box.l[j];
                if (w > widest) {
                    widest = w;
                    split = j;
                }
            }
            if (split == in_.nf) {
                offer(box.l);
                continue;
            }
            const std::size_t mid = (box.l[split] + box.h[split]) / 2;
            for (int side = 0; side < 2; ++side) {
                Box child = box;
                child.id = next_id++;
                if (side == 0)
                    child.h[split] = mid;
                else
                    child.l[split] = mid + 1;
                child.key = key_of(child, child.count_lb);
                if (prunable(child.key, child.count_lb)) continue;
                open.push(std::move(child));
            }
        }
        double bound = open.empty() ? incumbent : std::min(incumbent, open.top().key);
        if (stop == SolveStatus::Optimal) {
            res.status = std::isfinite(incumbent) ? SolveStatus::Optimal : SolveStatus::Infeasible;
            bound = incumbent;
        } else {
            res.status = stop;
        }
        res.objective = incumbent;
        res.bound = bound;
        res.seconds = elapsed();
        return res;
    }

  private:
    const Instance& in_;
    SolveLimits limits_;
};

SolveResult finish(const MilpModel& model, SolveResult res, const std::vector<double>& b) {
    if (!b.empty()) {
        res.x = assignment_for_offsets(model, b);
        if (res.method == "offset_search") res.objective = model.objective_value(res.x);
    }
    return res;
}

}  // namespace

std::int64_t disagreement_at(const MilpModel& model, std::span<const double> offsets) {
    const auto in = make_instance(model);
    if (offsets.size() != in.nf) throw std::invalid_argument("disagreement_at: one offset per facet required");
    return forced(in, offsets, offsets);
}

std::vector<double> assignment_for_offsets(const MilpModel& model, std::span<const double> b) {
    const auto& lay = fixed_layout(model);
    const auto in = make_instance(model);
    if (b.size() != in.nf) throw std::invalid_argument("assignment_for_offsets: one offset per facet required");
    std::vector<double> x(model.variables.size(), 0.0);
    for (std::size_t j = 0; j < in.nf; ++j) x[static_cast<std::size_t>(lay.b_var[j])] = b[j];
    for (std::size_t i = 0; i < in.m; ++i) {
        const auto sv = [&](std::size_t j) -> double& { return x[static_cast<std::size_t>(lay.s_var[i][j])]; };
        if (in.y[i] == 1) {
            bool bad = false;
            for (std::size_t j = 0; j < in.nf; ++j) {
                const double v = in.val(i, j, b[j]);
                if (v > in.eps(i, j)) {
                    sv(j) = v;
                    bad = true;
                }
            }
            x[static_cast<std::size_t>(lay.v_var[i])] = bad ? 1.0 : 0.0;
            continue;
        }
        bool separated = false, in_gap = false;
        for (std::size_t j = 0; j < in.nf; ++j) {
            const double v = in.val(i, j, b[j]);
            const double e = in.eps(i, j);
            if (v >= in.rho - e) separated = true;
            else if (v > e) in_gap = true;
        }
        const bool agree = separated && !in_gap;
        x[static_cast<std::size_t>(lay.v_var[i])] = agree ? 0.0 : 1.0;
        for (std::size_t j = 0; j < in.nf; ++j) {
            const double v = in.val(i, j, b[j]);
            auto& z = x[static_cast<std::size_t>(lay.z_var[i][j])];
            if (agree) {
                z = v >= in.rho - in.eps(i, j) ? 0.0 : 1.0;
            } else {
                z = 0.0;
                sv(j) = std::max(0.0, in.rho - v);
            }
        }
    }
    return x;
}

SolveResult solve_fixed_normals(const MilpModel& model, const SolveLimits& limits) {
    const auto in = make_instance(model);
    OffsetSearch search(in, limits);
    std::vector<double> b;
    auto res = search.run(-1.0, b);
    return finish(model, std::move(res), b);
}

SolveResult solve_fixed_normals_tie_break(const MilpModel& model, double count_limit, const SolveLimits& limits) {
    if (count_limit < 0.0) throw std::invalid_argument("tie-break stage needs a nonnegative count limit");
    const auto in = make_instance(model);
    OffsetSearch search(in, limits);
    std::vector<double> b;
    auto res = search.run(count_limit, b);
    return finish(model, std::move(res), b);
}

}  // namespace driftpac
