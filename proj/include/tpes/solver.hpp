#ifndef TPES_SOLVER_HPP
#define TPES_SOLVER_HPP

#include <string>

#include "tpes/milp.hpp"

namespace tpes {

// How to solve a model: the embedded simplex/branch-and-bound, or an
// external process. The command template must contain {mps} and {sol};
// the external solver is expected to write `<variable name> <value>` lines
// to the {sol} path and exit with 0 (optimal), 3 (infeasible/unbounded) or
// anything else for failure.
struct SolverChoice {
    bool external = false;
    std::string command_template;
    SolveLimits limits;
    std::string work_dir;  // scratch dir for external files; empty = system temp
    bool keep_files = false;
};

SolverChoice parse_solver_choice(const std::string& s);  // "embedded" or "cmd:<template>"

Solution solve_external(const MilpModel& model, const SolverChoice& choice);

// dispatch on choice.external; always solves as a MILP (binaries respected)
Solution solve_model(const MilpModel& model, const SolverChoice& choice);

}  // namespace tpes

#endif
