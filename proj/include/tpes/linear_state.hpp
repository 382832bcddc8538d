#ifndef TPES_LINEAR_STATE_HPP
#define TPES_LINEAR_STATE_HPP

#include <vector>

namespace tpes {

// Generic linear state recursion x_{t+1} = A_t x_t + f_t with box bounds,
// the building block behind the two-layer storage formulation. Matrices are
// dim x dim row-major; dim == 1 takes a scalar fast path throughout.
struct LinearStateSystem {
    int dim = 1;
    std::vector<std::vector<double>> step_matrices;  // A_t, chronological
    std::vector<std::vector<double>> forcing;        // B_t u_t, chronological
    std::vector<double> x_lb, x_ub;                  // per state component

    int n_steps() const { return static_cast<int>(step_matrices.size()); }
};

// Chronological product A_{N} * ... * A_2 * A_1 (applied right to left), the
// one-period transition of the inter-period recursion.
std::vector<double> inter_transition(const std::vector<std::vector<double>>& step_matrices, int dim);
double inter_transition_scalar(const std::vector<double>& step_factors);

// Propagate x_{t+1} = A_t x_t + f_t from x0; returns n_steps+1 states.
std::vector<std::vector<double>> propagate(const LinearStateSystem& sys, const std::vector<double>& x0);

}  // namespace tpes

#endif
