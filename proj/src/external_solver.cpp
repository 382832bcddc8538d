#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpes/error.hpp"
#include "tpes/mps.hpp"
#include "tpes/solver.hpp"

namespace tpes {

namespace fs = std::filesystem;

SolverChoice parse_solver_choice(const std::string& s) {
    SolverChoice c;
    if (s == "embedded" || s.empty()) return c;
    if (s.rfind("cmd:", 0) == 0) {
        c.external = true;
        c.command_template = s.substr(4);
        if (c.command_template.empty()) throw input_error("empty external solver command");
        return c;
    }
    throw input_error("unknown solver '" + s + "' (expected embedded or cmd:<template>)");
}

namespace {

std::string substitute(const std::string& tmpl, const std::string& key, const std::string& value) {
    std::string out = tmpl;
    std::size_t pos;
    while ((pos = out.find(key)) != std::string::npos) out.replace(pos, key.size(), value);
    return out;
}

std::atomic<unsigned> g_run_counter{0};

}  // namespace

Solution solve_external(const MilpModel& model, const SolverChoice& choice) {
    if (choice.command_template.find("{mps}") == std::string::npos ||
        choice.command_template.find("{sol}") == std::string::npos)
        throw input_error("external solver template must contain {mps} and {sol} placeholders");

    fs::path dir = choice.work_dir.empty() ? fs::temp_directory_path() : fs::path(choice.work_dir);
    fs::create_directories(dir);
    unsigned run = g_run_counter++;
    std::string stem = "tpes_" + std::to_string(static_cast<unsigned long>(::getpid())) + "_" + std::to_string(run);
    fs::path mps_path = dir / (stem + ".mps");
    fs::path sol_path = dir / (stem + ".sol");
    fs::path log_path = dir / (stem + ".log");

    write_mps(model, mps_path.string());

    std::string cmd = substitute(choice.command_template, "{mps}", mps_path.string());
    cmd = substitute(cmd, "{sol}", sol_path.string());
    cmd += " > " + log_path.string() + " 2>&1";

    int rc = std::system(cmd.c_str());
    int exit_code = -1;
    if (rc != -1) exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;

    auto read_log = [&]() {
        std::ifstream lf(log_path);
        std::stringstream ss;
        ss << lf.rdbuf();
        std::string s = ss.str();
        if (s.size() > 4000) s = s.substr(s.size() - 4000);
        return s;
    };

    auto cleanup = [&]() {
        if (choice.keep_files) return;
        std::error_code ec;
        fs::remove(mps_path, ec);
        fs::remove(sol_path, ec);
        fs::remove(log_path, ec);
    };

    Solution sol;
    if (exit_code == 3) {
        cleanup();
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    if (exit_code != 0) {
        std::string log = read_log();
        cleanup();
        throw solver_error("external solver exited with code " + std::to_string(exit_code) +
                           " for command: " + cmd + "\n" + log);
    }

    std::ifstream sf(sol_path);
    if (!sf) {
        cleanup();
        throw solver_error("external solver wrote no solution file: " + sol_path.string());
    }
    sol.values.assign(model.n_vars(), 0.0);
    std::vector<bool> seen(model.n_vars(), false);
    std::string name;
    double value;
    std::string linebuf;
    int lineno = 0;
    while (std::getline(sf, linebuf)) {
        ++lineno;
        std::istringstream ls(linebuf);
        if (!(ls >> name)) continue;
        if (name[0] == '#') continue;
        if (!(ls >> value)) {
            cleanup();
            throw solver_error("solution file line " + std::to_string(lineno) + " is not '<name> <value>': " + linebuf);
        }
        int j = model.var_id(name);
        if (j < 0) {
            cleanup();
            throw solver_error("solution file names unknown variable '" + name + "'");
        }
        sol.values[j] = value;
        seen[j] = true;
    }
    // variables the solver omitted default to the bound closest to zero
    for (std::size_t j = 0; j < model.n_vars(); ++j) {
        if (seen[j]) continue;
        const auto& v = model.vars()[j];
        sol.values[j] = (v.lb <= 0 && v.ub >= 0) ? 0.0 : (std::isfinite(v.lb) && v.lb > 0 ? v.lb : v.ub);
    }
    cleanup();

    sol.status = SolveStatus::optimal;
    sol.objective = model.eval_objective(sol.values);
    sol.row_activity = model.row_activities(sol.values);
    double viol = model.max_violation(sol.values);
    if (viol > 1e-5)
        throw solver_error("external solution violates constraints by " + std::to_string(viol));
    return sol;
}

Solution solve_model(const MilpModel& model, const SolverChoice& choice) {
    if (choice.external) return solve_external(model, choice);
    return solve_milp(model, choice.limits);
}

}  // namespace tpes
