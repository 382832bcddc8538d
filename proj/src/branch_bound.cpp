#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "tpes/error.hpp"
#include "tpes/milp.hpp"

// Best-first branch-and-bound over the binary variables. Nodes carry only
// the bound fixings; the LP relaxation is re-solved from scratch per node,
// which is fine at the problem sizes the embedded solver is meant for.

namespace tpes {
namespace {

struct Node {
    double bound;
    long seq;
    std::vector<std::pair<int, int>> fixes;  // (binary var id, 0 or 1)
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.seq > b.seq;
    }
};

}  // namespace

Solution solve_milp(const MilpModel& model, const SolveLimits& limits) {
    std::vector<int> binaries;
    for (std::size_t j = 0; j < model.n_vars(); ++j)
        if (model.vars()[j].kind == VarKind::binary) binaries.push_back(static_cast<int>(j));

    if (binaries.empty()) return solve_lp(model, limits);
    if (static_cast<int>(binaries.size()) > limits.max_binaries)
        throw solver_error("model has " + std::to_string(binaries.size()) + " binaries, above the embedded cap of " +
                           std::to_string(limits.max_binaries) +
                           "; export the model as MPS and solve it with an external solver");

    MilpModel work = model;  // bounds are mutated per node, rows never change
    std::vector<std::pair<double, double>> original_bounds;
    for (int b : binaries) original_bounds.emplace_back(model.vars()[b].lb, model.vars()[b].ub);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInf, 0, {}});
    long seq = 1;

    Solution incumbent;
    bool have_incumbent = false;
    double incumbent_obj = kInf;
    long nodes = 0;
    long iterations = 0;
    bool hit_limit = false;
    double open_bound = kInf;  // tightest pruned/open lower bound for reporting

    SolveLimits node_limits = limits;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= incumbent_obj - tol::milp_gap) continue;

        // restore the model's own bounds, then intersect with the fixings
        for (std::size_t k = 0; k < binaries.size(); ++k)
            work.set_var_bounds(binaries[k], original_bounds[k].first, original_bounds[k].second);
        bool empty_node = false;
        for (auto& [b, v] : node.fixes) {
            double lb = std::max(work.vars()[b].lb, static_cast<double>(v));
            double ub = std::min(work.vars()[b].ub, static_cast<double>(v));
            if (lb > ub) {
                empty_node = true;
                break;
            }
            work.set_var_bounds(b, lb, ub);
        }
        if (empty_node) continue;

        node_limits.max_iterations = limits.max_iterations - iterations;
        if (node_limits.max_iterations <= 0) {
            hit_limit = true;
            break;
        }
        Solution lp = solve_lp(work, node_limits);
        ++nodes;
        iterations += lp.iterations;

        if (lp.status == SolveStatus::iteration_limit) {
            hit_limit = true;
            break;
        }
        if (lp.status == SolveStatus::unbounded) {
            if (node.fixes.empty()) {
                lp.nodes = nodes;
                return lp;  // relaxation unbounded at the root
            }
            throw solver_error("LP relaxation unbounded below a bounded parent node");
        }
        if (lp.status == SolveStatus::infeasible) continue;
        if (have_incumbent && lp.objective >= incumbent_obj - tol::milp_gap) continue;

        // pick the most fractional binary, lowest index on ties
        int branch_var = -1;
        double best_score = -1.0;
        for (int b : binaries) {
            double v = lp.values[b];
            if (std::min(std::abs(v), std::abs(1.0 - v)) <= tol::integrality) continue;
            double score = 0.5 - std::abs(v - 0.5);
            if (score > best_score + 1e-15) {
                best_score = score;
                branch_var = b;
            }
        }

        if (branch_var < 0) {
            // integral: new incumbent
            incumbent = lp;
            incumbent_obj = lp.objective;
            have_incumbent = true;
            continue;
        }

        for (int v : {0, 1}) {
            Node child;
            child.bound = lp.objective;
            child.seq = seq++;
            child.fixes = node.fixes;
            child.fixes.emplace_back(branch_var, v);
            open.push(child);
        }
    }

    while (!open.empty()) {
        open_bound = std::min(open_bound, open.top().bound);
        open.pop();
    }

    Solution out;
    if (have_incumbent) {
        out = incumbent;
        out.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::optimal;
        out.best_bound = hit_limit ? std::min(open_bound, incumbent_obj) : incumbent_obj;
    } else {
        out.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::infeasible;
        out.best_bound = open_bound;
    }
    out.nodes = nodes;
    out.iterations = iterations;
    return out;
}

}  // namespace tpes
