#ifndef TPES_RUN_HPP
#define TPES_RUN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tpes/aggregation.hpp"
#include "tpes/formulation.hpp"
#include "tpes/solver.hpp"
#include "tpes/timeseries.hpp"

namespace tpes {

// Everything a command needs, parsed from one JSON document. All randomness
// flows from `seed`; outputs land in a run-stamped subdirectory of out_dir.
struct RunConfig {
    std::string system_path;
    std::string profiles_csv;
    std::string synthetic_recipe;  // inline JSON
    std::string synthetic_file;    // or a recipe file
    std::vector<std::string> profile_names;  // csv ingest order; empty = all referenced by the system

    int steps_per_period = 24;
    int n_typical_days = 12;
    std::vector<int> days_list;
    FormulationKind kind = FormulationKind::linked;
    std::vector<FormulationKind> kinds{FormulationKind::independent, FormulationKind::linked};
    bool simplified_bounds = false;
    ClusterMode cluster_mode = ClusterMode::pam;
    SolverChoice solver;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    bool export_mps = false;
    bool export_soc = false;

    std::string raw_json;  // resolved config echoed into the run directory
};

RunConfig parse_run_config(const std::string& json_text);

struct RunOutcome {
    int exit_code = 0;         // 0 ok, 2 input, 3 infeasible, 4 solver
    std::string result_json;   // machine-readable outcome
    std::string run_dir;
};

// build the profile set described by the config (CSV or synthetic)
ProfileSet load_profiles(const RunConfig& cfg, const std::vector<std::string>& required_names);

// profile names referenced by a system spec (bounds and efficiency profiles)
std::vector<std::string> referenced_profiles(const SystemSpec& spec);

RunOutcome cmd_aggregate(const RunConfig& cfg);
RunOutcome cmd_solve(const RunConfig& cfg);
RunOutcome cmd_sweep(const RunConfig& cfg);
RunOutcome cmd_validate(const RunConfig& cfg);

// exit-code mapping used by every entry point
int exit_code_for(const std::exception& e);

}  // namespace tpes

#endif
