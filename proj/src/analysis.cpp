#include "tpes/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tpes/error.hpp"

namespace tpes {

using nlohmann::json;

double CostBreakdown::total() const {
    double t = 0;
    for (const auto& e : entries) t += e.total();
    return t;
}

const CostBreakdown::Entry* CostBreakdown::find(const std::string& device) const {
    for (const auto& e : entries)
        if (e.device == device) return &e;
    return nullptr;
}

CostBreakdown cost_breakdown(const ModelArtifacts& art, const Solution& sol) {
    if (sol.status != SolveStatus::optimal) throw input_error("cost breakdown needs an optimal solution");
    CostBreakdown bd;
    for (std::size_t d = 0; d < art.spec.devices.size(); ++d) {
        CostBreakdown::Entry e;
        e.device = art.spec.devices[d].name;
        const auto& terms = art.device_costs[d];
        e.fixed = terms.fixed_constant;
        for (auto& [v, c] : terms.fixed) e.fixed += c * sol.values[v];
        for (auto& [v, c] : terms.variable) e.variable += c * sol.values[v];
        bd.entries.push_back(std::move(e));
    }
    return bd;
}

double cost_share_error(const CostBreakdown& reference, const CostBreakdown& test) {
    double denom = reference.total();
    if (denom <= 0) throw input_error("cost share error needs a positive reference total");
    std::vector<std::string> keys;
    for (const auto& e : reference.entries) keys.push_back(e.device);
    for (const auto& e : test.entries)
        if (!reference.find(e.device)) keys.push_back(e.device);
    double num = 0;
    for (const auto& k : keys) {
        const auto* r = reference.find(k);
        const auto* t = test.find(k);
        num += std::abs((t ? t->total() : 0.0) - (r ? r->total() : 0.0));
    }
    return num / denom;
}

Solution timed_solve(const MilpModel& model, const SolverChoice& solver, double* seconds) {
    auto t0 = std::chrono::steady_clock::now();
    Solution sol = solve_model(model, solver);
    auto t1 = std::chrono::steady_clock::now();
    if (seconds) *seconds = std::chrono::duration<double>(t1 - t0).count();
    return sol;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::string ComparisonReport::to_csv() const {
    std::ostringstream os;
    os << "kind,n_typical_days,objective,cost_share_error,solve_seconds";
    for (const auto& d : device_order) os << ",cap_" << d;
    os << ",status\n";
    for (const auto& r : rows) {
        os << r.kind << "," << r.n_typical << "," << fmt(r.objective) << "," << fmt(r.error) << ","
           << fmt(r.solve_seconds);
        for (const auto& d : device_order) {
            auto it = r.capacities.find(d);
            os << "," << (it == r.capacities.end() ? "" : fmt(it->second));
        }
        os << "," << r.status << "\n";
    }
    return os.str();
}

std::string ComparisonReport::to_json() const {
    json j;
    j["devices"] = device_order;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json rj;
        rj["kind"] = r.kind;
        rj["n_typical_days"] = r.n_typical;
        if (!std::isnan(r.objective)) rj["objective"] = r.objective;
        if (!std::isnan(r.error)) rj["cost_share_error"] = r.error;
        rj["solve_seconds"] = r.solve_seconds;
        rj["status"] = r.status;
        json caps = json::object();
        for (auto& [k, v] : r.capacities)
            if (!std::isnan(v)) caps[k] = v;
        rj["capacities"] = caps;
        j["rows"].push_back(rj);
    }
    return j.dump(2) + "\n";
}

namespace {

std::map<std::string, double> capacities_of(const ModelArtifacts& art, const Solution& sol) {
    std::map<std::string, double> caps;
    for (std::size_t d = 0; d < art.spec.devices.size(); ++d) {
        double v = art.capacity_of(static_cast<int>(d), sol);
        if (!std::isnan(v)) caps[art.spec.devices[d].name] = v;
    }
    return caps;
}

}  // namespace

ComparisonReport run_sweep(const SystemSpec& spec, const ProfileSet& profiles, const SweepConfig& cfg) {
    ComparisonReport report;
    for (const auto& d : spec.devices) report.device_order.push_back(d.name);

    // reference: the full-horizon model
    SweepRow ref;
    ref.kind = "full";
    ref.n_typical = static_cast<int>(profiles.length()) / cfg.steps_per_period;
    CostBreakdown ref_bd;
    {
        ModelArtifacts art = build_full_model(spec, profiles);
        Solution sol = timed_solve(art.model, cfg.solver, &ref.solve_seconds);
        if (sol.status != SolveStatus::optimal)
            throw solver_error("reference (full) model did not solve: " + to_string(sol.status));
        ref.objective = sol.objective;
        ref.error = 0.0;
        ref.capacities = capacities_of(art, sol);
        ref_bd = cost_breakdown(art, sol);
    }
    report.rows.push_back(ref);

    // aggregations are shared between kinds per N_k
    auto [norm, records] = normalize_attributes(profiles);
    CandidateMatrix candidates = build_candidates(norm, cfg.steps_per_period);

    struct Task {
        FormulationKind kind;
        int n_days;
        std::size_t row;
    };
    std::vector<Task> tasks;
    std::map<int, TypicalPeriodSet> typicals;
    std::map<int, std::string> typical_errors;
    for (int nd : cfg.n_days) {
        if (typicals.count(nd) || typical_errors.count(nd)) continue;
        try {
            typicals.emplace(nd, cluster_kmedoids(candidates, nd, cfg.cluster_mode));
        } catch (const std::exception& e) {
            typical_errors[nd] = e.what();
        }
    }
    for (FormulationKind kind : cfg.kinds)
        for (int nd : cfg.n_days) {
            SweepRow row;
            row.kind = to_string(kind);
            row.n_typical = nd;
            tasks.push_back({kind, nd, report.rows.size()});
            report.rows.push_back(row);
        }

    auto run_task = [&](const Task& t) {
        SweepRow& row = report.rows[t.row];
        try {
            if (typical_errors.count(t.n_days)) throw input_error(typical_errors.at(t.n_days));
            const TypicalPeriodSet& typ = typicals.at(t.n_days);
            ModelArtifacts art = t.kind == FormulationKind::independent
                                     ? build_independent_model(spec, typ, profiles)
                                     : build_linked_model(spec, typ, profiles, cfg.simplified_bounds);
            Solution sol = timed_solve(art.model, cfg.solver, &row.solve_seconds);
            if (sol.status != SolveStatus::optimal) {
                row.status = to_string(sol.status);
                row.objective = std::nan("");
                row.error = std::nan("");
                return;
            }
            row.objective = sol.objective;
            row.capacities = capacities_of(art, sol);
            row.error = cost_share_error(ref_bd, cost_breakdown(art, sol));
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
            row.objective = std::nan("");
            row.error = std::nan("");
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (const auto& t : tasks) run_task(t);
    } else {
        std::mutex mu;
        std::size_t next = 0;
        auto worker = [&]() {
            while (true) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= tasks.size()) return;
                    mine = next++;
                }
                run_task(tasks[mine]);
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // stable order: reference first, then by (kind, N_k)
    std::stable_sort(report.rows.begin() + 1, report.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.n_typical < b.n_typical;
    });
    return report;
}

void export_soc_heatmap(const SocTrajectory& traj, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw io_error("cannot write heatmap '" + csv_path + "'");
    out.precision(12);
    // rows = steps within a period, columns = periods
    for (int g = 0; g < traj.steps; ++g) {
        for (int i = 0; i < traj.n_periods; ++i) {
            if (i) out << ",";
            out << traj.soc_at(i, g);
        }
        out << "\n";
    }
    if (!out) throw io_error("error while writing heatmap '" + csv_path + "'");

    json side;
    side["device"] = traj.device;
    side["kind"] = to_string(traj.kind);
    side["capacity"] = traj.capacity;
    side["eta_self"] = traj.eta_self;
    side["step_hours"] = traj.dt;
    side["n_periods"] = traj.n_periods;
    side["steps_per_period"] = traj.steps;
    side["assignment"] = traj.assignment;
    side["inter"] = traj.inter;
    side["intra"] = traj.intra;
    std::string side_path = csv_path + ".meta.json";
    std::ofstream sf(side_path);
    if (!sf) throw io_error("cannot write heatmap sidecar '" + side_path + "'");
    sf << side.dump(2) << "\n";
}

}  // namespace tpes
