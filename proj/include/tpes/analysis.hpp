#ifndef TPES_ANALYSIS_HPP
#define TPES_ANALYSIS_HPP

#include <map>
#include <string>
#include <vector>

#include "tpes/formulation.hpp"
#include "tpes/solver.hpp"

namespace tpes {

// Annualized cost per device, split into the fixed part (existence + scale)
// and the variable part attributed to flows leaving the device.
struct CostBreakdown {
    struct Entry {
        std::string device;
        double fixed = 0.0;
        double variable = 0.0;
        double total() const { return fixed + variable; }
    };
    std::vector<Entry> entries;
    double total() const;
    const Entry* find(const std::string& device) const;
};

CostBreakdown cost_breakdown(const ModelArtifacts& art, const Solution& sol);

// e = sum_d |cost_hat_d - cost_d| / sum_d cost_d over the union of devices
double cost_share_error(const CostBreakdown& reference, const CostBreakdown& test);

struct SweepRow {
    std::string kind;  // "full" for the reference row
    int n_typical = 0;
    double objective = 0.0;
    double error = 0.0;          // cost share error vs reference
    double solve_seconds = 0.0;  // solver time only
    std::map<std::string, double> capacities;
    std::string status = "ok";
};

struct ComparisonReport {
    std::vector<std::string> device_order;  // column order for capacities
    std::vector<SweepRow> rows;

    std::string to_csv() const;
    std::string to_json() const;
};

struct SweepConfig {
    std::vector<int> n_days;
    std::vector<FormulationKind> kinds{FormulationKind::independent, FormulationKind::linked};
    bool simplified_bounds = false;
    ClusterMode cluster_mode = ClusterMode::pam;
    int steps_per_period = 24;
    SolverChoice solver;
    int jobs = 1;
};

// Reference (full) solve plus one row per (kind, N_k); rows that fail keep
// their error message in `status` and the sweep continues.
ComparisonReport run_sweep(const SystemSpec& spec, const ProfileSet& profiles, const SweepConfig& cfg);

// CSV matrix, steps rows x periods columns, plus a JSON sidecar with the
// capacity and the inter/intra decomposition.
void export_soc_heatmap(const SocTrajectory& traj, const std::string& csv_path);

// timed solve used by sweep rows and the solve command
Solution timed_solve(const MilpModel& model, const SolverChoice& solver, double* seconds);

}  // namespace tpes

#endif
