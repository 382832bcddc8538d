#include "tpes/linear_state.hpp"

#include <cmath>

#include "tpes/error.hpp"

namespace tpes {

namespace {

std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b, int dim) {
    std::vector<double> out(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            double aik = a[static_cast<std::size_t>(i) * dim + k];
            if (aik == 0.0) continue;
            for (int j = 0; j < dim; ++j)
                out[static_cast<std::size_t>(i) * dim + j] += aik * b[static_cast<std::size_t>(k) * dim + j];
        }
    return out;
}

}  // namespace

std::vector<double> inter_transition(const std::vector<std::vector<double>>& step_matrices, int dim) {
    if (dim < 1) throw input_error("state dimension must be at least 1");
    std::vector<double> acc(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) acc[static_cast<std::size_t>(i) * dim + i] = 1.0;
    for (const auto& a : step_matrices) {
        if (a.size() != static_cast<std::size_t>(dim) * dim)
            throw input_error("step matrix dimension mismatch");
        for (double v : a)
            if (!std::isfinite(v)) throw input_error("step matrix has a non-finite entry");
        acc = mat_mul(a, acc, dim);  // later steps multiply from the left
    }
    return acc;
}

double inter_transition_scalar(const std::vector<double>& step_factors) {
    double acc = 1.0;
    for (double a : step_factors) {
        if (!std::isfinite(a)) throw input_error("step factor is not finite");
        acc *= a;
    }
    return acc;
}

std::vector<std::vector<double>> propagate(const LinearStateSystem& sys, const std::vector<double>& x0) {
    if (static_cast<int>(x0.size()) != sys.dim) throw input_error("initial state dimension mismatch");
    if (sys.forcing.size() != sys.step_matrices.size()) throw input_error("forcing/step count mismatch");
    std::vector<std::vector<double>> traj;
    traj.reserve(sys.step_matrices.size() + 1);
    traj.push_back(x0);
    for (std::size_t t = 0; t < sys.step_matrices.size(); ++t) {
        const auto& a = sys.step_matrices[t];
        const auto& f = sys.forcing[t];
        std::vector<double> next(sys.dim, 0.0);
        for (int i = 0; i < sys.dim; ++i) {
            for (int j = 0; j < sys.dim; ++j)
                next[i] += a[static_cast<std::size_t>(i) * sys.dim + j] * traj.back()[j];
            next[i] += f[i];
        }
        traj.push_back(std::move(next));
    }
    return traj;
}

}  // namespace tpes
