#ifndef TPES_MILP_HPP
#define TPES_MILP_HPP

#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tpes {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Centralized numerical tolerances.
namespace tol {
constexpr double feasibility = 1e-7;   // scaled constraint violation
constexpr double integrality = 1e-6;   // distance of a binary from {0,1}
constexpr double milp_gap = 1e-6;      // absolute branch-and-bound gap
}  // namespace tol

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };

// Sparse MILP in row form. Variable and row names are unique; insertion
// order is the deterministic export order.
class MilpModel {
  public:
    struct Var {
        std::string name;
        double lb = 0.0;
        double ub = kInf;
        VarKind kind = VarKind::continuous;
    };
    struct Row {
        std::string name;
        std::vector<std::pair<int, double>> coeffs;  // (variable id, coefficient)
        Sense sense = Sense::le;
        double rhs = 0.0;
    };

    std::string name = "model";
    bool minimize = true;
    double objective_offset = 0.0;

    int add_var(const std::string& name, double lb, double ub, VarKind kind = VarKind::continuous);
    int add_binary(const std::string& name);
    int add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);
    void add_objective_term(int var, double coeff);  // accumulates

    int var_id(const std::string& name) const;   // -1 if missing
    int row_id(const std::string& name) const;   // -1 if missing
    const std::vector<Var>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<std::pair<int, double>>& objective() const { return objective_; }
    double objective_coeff(int var) const;
    std::size_t n_vars() const { return vars_.size(); }
    std::size_t n_rows() const { return rows_.size(); }
    std::size_t n_binaries() const;

    void set_var_bounds(int var, double lb, double ub);

    double eval_objective(const std::vector<double>& x) const;
    std::vector<double> row_activities(const std::vector<double>& x) const;
    // largest scaled violation over rows and variable bounds
    double max_violation(const std::vector<double>& x) const;

  private:
    std::vector<Var> vars_;
    std::vector<Row> rows_;
    std::vector<std::pair<int, double>> objective_;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> row_index_;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::iteration_limit;
    double objective = 0.0;
    std::vector<double> values;        // per variable
    std::vector<double> row_activity;  // per row
    long iterations = 0;
    double best_bound = 0.0;  // for iteration_limit results
    long nodes = 0;           // branch-and-bound nodes

    double value(const MilpModel& m, const std::string& var_name) const;
};

struct SolveLimits {
    long max_iterations = 2'000'000;  // simplex iterations (cumulative for MILP)
    int max_binaries = 32;            // embedded branch-and-bound cap
};

// Primal revised simplex over the LP relaxation (binaries treated as
// continuous in [lb,ub]).
Solution solve_lp(const MilpModel& model, const SolveLimits& limits = {});

// Best-first branch-and-bound on the binaries, most-fractional branching.
Solution solve_milp(const MilpModel& model, const SolveLimits& limits = {});

}  // namespace tpes

#endif
