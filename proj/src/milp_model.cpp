#include "tpes/milp.hpp"

#include <algorithm>
#include <cmath>

#include "tpes/error.hpp"

namespace tpes {

int MilpModel::add_var(const std::string& name, double lb, double ub, VarKind kind) {
    if (var_index_.count(name)) throw input_error("duplicate variable name '" + name + "'");
    if (std::isnan(lb) || std::isnan(ub) || lb > ub)
        throw input_error("invalid bounds for variable '" + name + "'");
    if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0))
        throw input_error("binary variable '" + name + "' must be bounded within [0,1]");
    Var v{name, lb, ub, kind};
    vars_.push_back(std::move(v));
    var_index_[name] = static_cast<int>(vars_.size()) - 1;
    return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_binary(const std::string& name) { return add_var(name, 0.0, 1.0, VarKind::binary); }

int MilpModel::add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
    if (row_index_.count(name)) throw input_error("duplicate row name '" + name + "'");
    // merge duplicate columns, drop zeros
    std::sort(coeffs.begin(), coeffs.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (auto& [col, val] : coeffs) {
        if (col < 0 || col >= static_cast<int>(vars_.size()))
            throw input_error("row '" + name + "' references unknown variable id " + std::to_string(col));
        if (!std::isfinite(val)) throw input_error("row '" + name + "' has a non-finite coefficient");
        if (!merged.empty() && merged.back().first == col)
            merged.back().second += val;
        else
            merged.emplace_back(col, val);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](auto& p) { return p.second == 0.0; }), merged.end());
    rows_.push_back(Row{name, std::move(merged), sense, rhs});
    row_index_[name] = static_cast<int>(rows_.size()) - 1;
    return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::add_objective_term(int var, double coeff) {
    if (var < 0 || var >= static_cast<int>(vars_.size())) throw input_error("objective references unknown variable");
    if (coeff == 0.0) return;
    for (auto& [v, c] : objective_)
        if (v == var) {
            c += coeff;
            return;
        }
    objective_.emplace_back(var, coeff);
}

int MilpModel::var_id(const std::string& name) const {
    auto it = var_index_.find(name);
    return it == var_index_.end() ? -1 : it->second;
}

int MilpModel::row_id(const std::string& name) const {
    auto it = row_index_.find(name);
    return it == row_index_.end() ? -1 : it->second;
}

double MilpModel::objective_coeff(int var) const {
    for (auto& [v, c] : objective_)
        if (v == var) return c;
    return 0.0;
}

std::size_t MilpModel::n_binaries() const {
    std::size_t n = 0;
    for (const auto& v : vars_)
        if (v.kind == VarKind::binary) ++n;
    return n;
}

void MilpModel::set_var_bounds(int var, double lb, double ub) {
    if (var < 0 || var >= static_cast<int>(vars_.size())) throw input_error("unknown variable id");
    if (std::isnan(lb) || std::isnan(ub) || lb > ub) throw input_error("invalid bounds");
    vars_[var].lb = lb;
    vars_[var].ub = ub;
}

double MilpModel::eval_objective(const std::vector<double>& x) const {
    double v = objective_offset;
    for (auto& [var, c] : objective_) v += c * x[var];
    return v;
}

std::vector<double> MilpModel::row_activities(const std::vector<double>& x) const {
    std::vector<double> act(rows_.size(), 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (auto& [col, val] : rows_[r].coeffs) act[r] += val * x[col];
    return act;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& row : rows_) {
        double act = 0.0, scale = 1.0;
        for (auto& [col, val] : row.coeffs) {
            act += val * x[col];
            scale = std::max(scale, std::abs(val * x[col]));
        }
        scale = std::max(scale, std::abs(row.rhs));
        double viol = 0.0;
        if (row.sense == Sense::le) viol = act - row.rhs;
        else if (row.sense == Sense::ge) viol = row.rhs - act;
        else viol = std::abs(act - row.rhs);
        worst = std::max(worst, viol / scale);
    }
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        double scale = std::max(1.0, std::abs(x[j]));
        if (std::isfinite(vars_[j].lb)) worst = std::max(worst, (vars_[j].lb - x[j]) / scale);
        if (std::isfinite(vars_[j].ub)) worst = std::max(worst, (x[j] - vars_[j].ub) / scale);
    }
    return worst;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

double Solution::value(const MilpModel& m, const std::string& var_name) const {
    int id = m.var_id(var_name);
    if (id < 0) throw input_error("unknown variable '" + var_name + "'");
    return values[id];
}

}  // namespace tpes
