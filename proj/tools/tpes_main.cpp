// tpes command line: aggregate / solve / sweep / validate on top of the
// shared-library C API. All heavy lifting happens behind tpes.h; this file
// only turns flags into a JSON config and prints the result.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tpes.h"

using nlohmann::json;

namespace {

struct CommonArgs {
    std::string system;
    std::string profiles_csv;
    std::string synthetic;
    std::vector<std::string> profile_names;
    int steps_per_period = 24;
    int days = 12;
    std::vector<int> days_list;
    std::string kind = "linked";
    std::vector<std::string> kinds;
    bool simplified_bounds = false;
    std::string cluster_mode = "pam";
    std::string solver = "embedded";
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    bool export_mps = false;
    bool export_soc = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--system", a.system, "system configuration file (JSON)");
    cmd->add_option("--profiles", a.profiles_csv, "profiles CSV (header row names the attributes)");
    cmd->add_option("--synthetic", a.synthetic, "synthetic recipe: inline JSON or a file path");
    cmd->add_option("--names", a.profile_names, "profile columns to ingest from the CSV");
    cmd->add_option("--steps-per-period", a.steps_per_period, "time steps per candidate period")->capture_default_str();
    cmd->add_option("--days", a.days, "number of typical periods")->capture_default_str();
    cmd->add_option("--kind", a.kind, "formulation: full | independent | linked")->capture_default_str();
    cmd->add_flag("--simplified-bounds", a.simplified_bounds, "use the relaxed min/max state bounds");
    cmd->add_option("--cluster-mode", a.cluster_mode, "k-medoids mode: pam | exact")->capture_default_str();
    cmd->add_option("--solver", a.solver, "embedded | cmd:<template with {mps} and {sol}>")->capture_default_str();
    cmd->add_option("--seed", a.seed, "seed for every random choice")->capture_default_str();
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--jobs", a.jobs, "parallel sweep workers")->capture_default_str();
}

bool looks_like_inline_json(const std::string& s) {
    for (char c : s) {
        if (c == '{') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return false;
}

json build_config(const CommonArgs& a) {
    json cfg;
    if (!a.system.empty()) cfg["system"] = a.system;
    json prof = json::object();
    if (!a.profiles_csv.empty()) prof["csv"] = a.profiles_csv;
    if (!a.profile_names.empty()) prof["names"] = a.profile_names;
    if (!a.synthetic.empty()) {
        if (looks_like_inline_json(a.synthetic)) prof["synthetic"] = json::parse(a.synthetic);
        else prof["synthetic_file"] = a.synthetic;
    }
    if (!prof.empty()) cfg["profiles"] = prof;
    cfg["steps_per_period"] = a.steps_per_period;
    cfg["n_typical_days"] = a.days;
    if (!a.days_list.empty()) cfg["days_list"] = a.days_list;
    cfg["kind"] = a.kind;
    if (!a.kinds.empty()) cfg["kinds"] = a.kinds;
    cfg["simplified_bounds"] = a.simplified_bounds;
    cfg["cluster_mode"] = a.cluster_mode;
    cfg["solver"] = a.solver;
    cfg["seed"] = a.seed;
    cfg["out_dir"] = a.out_dir;
    cfg["jobs"] = a.jobs;
    if (a.export_mps) cfg["export_mps"] = true;
    if (a.export_soc) cfg["export_soc"] = true;
    return cfg;
}

int run(tpes_status (*fn)(const char*, char**), const json& cfg) {
    char* result = nullptr;
    tpes_status rc = fn(cfg.dump().c_str(), &result);
    if (result) {
        std::printf("%s\n", result);
        tpes_string_free(result);
    }
    if (rc != TPES_OK) std::fprintf(stderr, "error: %s\n", tpes_last_error());
    return static_cast<int>(rc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy system design on aggregated typical periods"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tpes_version()));

    CommonArgs agg_args, solve_args, sweep_args, val_args;

    CLI::App* agg = app.add_subcommand("aggregate", "cluster candidate periods into typical periods");
    add_common_flags(agg, agg_args);

    CLI::App* solve = app.add_subcommand("solve", "build and solve one design optimization");
    add_common_flags(solve, solve_args);
    solve->add_flag("--export-mps", solve_args.export_mps, "write the model as MPS instead of solving");
    solve->add_flag("--export-soc", solve_args.export_soc, "write state-of-charge heatmap CSVs");

    CLI::App* sweep = app.add_subcommand("sweep", "compare formulations over several typical-day counts");
    add_common_flags(sweep, sweep_args);
    sweep->add_option("--days-list", sweep_args.days_list, "typical-day counts, e.g. --days-list 6 12 24")
        ->delimiter(',');
    sweep->add_option("--kinds", sweep_args.kinds, "formulations to sweep (default independent linked)")
        ->delimiter(',');

    CLI::App* validate = app.add_subcommand("validate", "check a system configuration");
    add_common_flags(validate, val_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage problems are input errors
    }

    try {
        if (agg->parsed()) return run(&tpes_cmd_aggregate, build_config(agg_args));
        if (solve->parsed()) return run(&tpes_cmd_solve, build_config(solve_args));
        if (sweep->parsed()) return run(&tpes_cmd_sweep, build_config(sweep_args));
        if (validate->parsed()) return run(&tpes_cmd_validate, build_config(val_args));
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
