#include "tpes/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tpes/analysis.hpp"
#include "tpes/error.hpp"
#include "tpes/mps.hpp"

namespace tpes {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex8(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(8, '0');
    for (int i = 7; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw io_error("error writing '" + path.string() + "'");
}

fs::path make_run_dir(const RunConfig& cfg, const std::string& command) {
    fs::path dir = fs::path(cfg.out_dir) / (command + "-" + hex8(fnv1a64(command + "\n" + cfg.raw_json)));
    fs::create_directories(dir);
    write_text(dir / "config.json", cfg.raw_json + "\n");
    return dir;
}

SynthParams parse_synth_params(const json& j) {
    SynthParams p;
    p.amplitude = j.value("amplitude", p.amplitude);
    p.offset = j.value("offset", p.offset);
    p.phase = j.value("phase", p.phase);
    p.cycles = j.value("cycles", p.cycles);
    p.period_steps = j.value("period_steps", p.period_steps);
    p.value = j.value("value", p.value);
    p.seasonal_weight = j.value("seasonal_weight", p.seasonal_weight);
    p.daily_weight = j.value("daily_weight", p.daily_weight);
    p.noise_weight = j.value("noise_weight", p.noise_weight);
    return p;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw input_error(std::string("run config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    cfg.system_path = j.value("system", "");
    if (j.contains("profiles")) {
        const auto& pj = j["profiles"];
        if (pj.is_string()) {
            cfg.profiles_csv = pj.get<std::string>();
        } else {
            cfg.profiles_csv = pj.value("csv", "");
            cfg.synthetic_file = pj.value("synthetic_file", "");
            if (pj.contains("synthetic")) cfg.synthetic_recipe = pj["synthetic"].dump();
            if (pj.contains("names")) cfg.profile_names = pj["names"].get<std::vector<std::string>>();
        }
    }
    cfg.steps_per_period = j.value("steps_per_period", 24);
    cfg.n_typical_days = j.value("n_typical_days", 12);
    if (j.contains("days_list")) cfg.days_list = j["days_list"].get<std::vector<int>>();
    if (j.contains("kind")) cfg.kind = parse_formulation_kind(j["kind"].get<std::string>());
    if (j.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : j["kinds"]) cfg.kinds.push_back(parse_formulation_kind(k.get<std::string>()));
    }
    cfg.simplified_bounds = j.value("simplified_bounds", false);
    if (j.contains("cluster_mode")) cfg.cluster_mode = parse_cluster_mode(j["cluster_mode"].get<std::string>());
    cfg.solver = parse_solver_choice(j.value("solver", "embedded"));
    cfg.seed = j.value("seed", 1ull);
    cfg.out_dir = j.value("out_dir", "out");
    cfg.jobs = j.value("jobs", 1);
    cfg.export_mps = j.value("export_mps", false);
    cfg.export_soc = j.value("export_soc", false);
    if (cfg.steps_per_period <= 0) throw input_error("steps_per_period must be positive");
    if (cfg.n_typical_days < 1) throw input_error("n_typical_days must be at least 1");
    if (cfg.jobs < 1) throw input_error("jobs must be at least 1");
    cfg.raw_json = j.dump(2);
    return cfg;
}

ProfileSet load_profiles(const RunConfig& cfg, const std::vector<std::string>& required_names) {
    if (!cfg.profiles_csv.empty()) {
        std::vector<std::string> names = cfg.profile_names.empty() ? required_names : cfg.profile_names;
        if (names.empty()) throw input_error("no profile names requested for CSV ingest");
        return ingest_profiles(cfg.profiles_csv, names);
    }
    std::string recipe_text = cfg.synthetic_recipe;
    if (recipe_text.empty() && !cfg.synthetic_file.empty()) {
        std::ifstream in(cfg.synthetic_file);
        if (!in) throw io_error("cannot open synthetic recipe '" + cfg.synthetic_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        recipe_text = ss.str();
    }
    if (recipe_text.empty()) throw input_error("config needs profiles.csv, profiles.synthetic or profiles.synthetic_file");

    json rj;
    try {
        rj = json::parse(recipe_text);
    } catch (const json::exception& e) {
        throw input_error(std::string("synthetic recipe is not valid JSON: ") + e.what());
    }
    const std::size_t length = rj.at("length").get<std::size_t>();
    const double step_hours = rj.value("step_hours", 1.0);
    if (!rj.contains("profiles") || !rj["profiles"].is_object())
        throw input_error("synthetic recipe needs a profiles object");

    ProfileSet set;
    for (const auto& [name, pj] : rj["profiles"].items()) {
        SynthKind kind = parse_synth_kind(pj.at("kind").get<std::string>());
        SynthParams params = parse_synth_params(pj);
        std::uint64_t seed = cfg.seed ^ fnv1a64(name);
        Profile p = synth_profile(kind, seed, length, params);
        p.name = name;
        p.step_hours = step_hours;
        set.add(std::move(p));
    }
    for (const auto& need : required_names)
        if (!set.find(need)) throw input_error("synthetic recipe does not define profile '" + need + "'");
    return set;
}

std::vector<std::string> referenced_profiles(const SystemSpec& spec) {
    std::vector<std::string> names;
    auto add = [&](const std::string& n) {
        if (!n.empty() && std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    };
    for (const auto& d : spec.devices) {
        if (d.source_sink) {
            add(d.source_sink->lb.profile);
            add(d.source_sink->ub.profile);
        }
        if (d.transformer)
            for (const auto& cv : d.transformer->conversions) add(cv.efficiency_profile);
    }
    return names;
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::invalid_input: return 2;
            case ErrorKind::io: return 2;
            case ErrorKind::infeasible: return 3;
            case ErrorKind::solver: return 4;
        }
    }
    return 4;
}

RunOutcome cmd_aggregate(const RunConfig& cfg) {
    RunOutcome out;
    fs::path dir = make_run_dir(cfg, "aggregate");
    out.run_dir = dir.string();

    ProfileSet raw = load_profiles(cfg, {});
    auto [norm, records] = normalize_attributes(raw);
    CandidateMatrix candidates = build_candidates(norm, cfg.steps_per_period);
    TypicalPeriodSet typ = cluster_kmedoids(candidates, cfg.n_typical_days, cfg.cluster_mode);
    double rep_err = representation_error(candidates, typ);

    write_text(dir / "typical_periods.json", typical_set_to_json(typ, raw));

    json res;
    res["run_dir"] = out.run_dir;
    res["n_typical_days"] = typ.n_typical;
    res["n_candidates"] = typ.n_candidates();
    res["representation_error"] = rep_err;
    res["files"] = {{"typical_periods", (dir / "typical_periods.json").string()}};
    out.result_json = res.dump(2);
    write_text(dir / "result.json", out.result_json + "\n");
    return out;
}

namespace {

json breakdown_json(const CostBreakdown& bd) {
    json j = json::array();
    for (const auto& e : bd.entries)
        j.push_back({{"device", e.device}, {"fixed", e.fixed}, {"variable", e.variable}, {"total", e.total()}});
    return j;
}

}  // namespace

RunOutcome cmd_solve(const RunConfig& cfg) {
    RunOutcome out;
    fs::path dir = make_run_dir(cfg, "solve");
    out.run_dir = dir.string();

    if (cfg.system_path.empty()) throw input_error("solve needs a system config (--system)");
    SystemSpec spec = load_system_file(cfg.system_path);
    ProfileSet profiles = load_profiles(cfg, referenced_profiles(spec));

    ModelArtifacts art = [&]() {
        if (cfg.kind == FormulationKind::full) return build_full_model(spec, profiles);
        auto [norm, records] = normalize_attributes(profiles);
        CandidateMatrix candidates = build_candidates(norm, cfg.steps_per_period);
        TypicalPeriodSet typ = cluster_kmedoids(candidates, cfg.n_typical_days, cfg.cluster_mode);
        if (cfg.kind == FormulationKind::independent) return build_independent_model(spec, typ, profiles);
        return build_linked_model(spec, typ, profiles, cfg.simplified_bounds);
    }();

    json res;
    res["run_dir"] = out.run_dir;
    res["kind"] = to_string(cfg.kind);
    res["n_vars"] = art.model.n_vars();
    res["n_rows"] = art.model.n_rows();

    if (cfg.export_mps) {
        fs::path mps = dir / (art.model.name + ".mps");
        write_mps(art.model, mps.string());
        res["status"] = "exported";
        res["files"] = {{"mps", mps.string()}};
        out.result_json = res.dump(2);
        write_text(dir / "result.json", out.result_json + "\n");
        return out;
    }

    double seconds = 0.0;
    Solution sol = timed_solve(art.model, cfg.solver, &seconds);
    res["status"] = to_string(sol.status);
    res["solve_seconds"] = seconds;
    if (sol.status != SolveStatus::optimal) {
        out.exit_code = sol.status == SolveStatus::infeasible || sol.status == SolveStatus::unbounded ? 3 : 4;
        out.result_json = res.dump(2);
        write_text(dir / "result.json", out.result_json + "\n");
        return out;
    }

    res["objective"] = sol.objective;
    json caps = json::object(), deltas = json::object();
    for (std::size_t d = 0; d < spec.devices.size(); ++d) {
        double c = art.capacity_of(static_cast<int>(d), sol);
        if (!std::isnan(c)) caps[spec.devices[d].name] = c;
        if (art.delta_var[d] >= 0) deltas[spec.devices[d].name] = std::round(sol.values[art.delta_var[d]]);
    }
    res["capacities"] = caps;
    res["existence"] = deltas;
    res["cost_breakdown"] = breakdown_json(cost_breakdown(art, sol));

    json files = json::object();
    if (cfg.export_soc && !art.storages.empty()) {
        auto trajs = decode_storage_trajectories(art, sol, cfg.steps_per_period);
        for (const auto& traj : trajs) {
            fs::path csv = dir / ("soc_" + traj.device + ".csv");
            export_soc_heatmap(traj, csv.string());
            files["soc_" + traj.device] = csv.string();
        }
    }
    res["files"] = files;
    out.result_json = res.dump(2);
    write_text(dir / "result.json", out.result_json + "\n");
    return out;
}

RunOutcome cmd_sweep(const RunConfig& cfg) {
    RunOutcome out;
    fs::path dir = make_run_dir(cfg, "sweep");
    out.run_dir = dir.string();

    if (cfg.system_path.empty()) throw input_error("sweep needs a system config (--system)");
    if (cfg.days_list.empty()) throw input_error("sweep needs a non-empty days list (--days)");
    SystemSpec spec = load_system_file(cfg.system_path);
    ProfileSet profiles = load_profiles(cfg, referenced_profiles(spec));

    SweepConfig sw;
    sw.n_days = cfg.days_list;
    sw.kinds = cfg.kinds;
    sw.simplified_bounds = cfg.simplified_bounds;
    sw.cluster_mode = cfg.cluster_mode;
    sw.steps_per_period = cfg.steps_per_period;
    sw.solver = cfg.solver;
    sw.jobs = cfg.jobs;

    ComparisonReport report = run_sweep(spec, profiles, sw);
    write_text(dir / "report.csv", report.to_csv());
    write_text(dir / "report.json", report.to_json());

    int failed = 0;
    for (const auto& r : report.rows)
        if (r.status != "ok") ++failed;

    json res;
    res["run_dir"] = out.run_dir;
    res["rows"] = report.rows.size();
    res["failed_rows"] = failed;
    res["files"] = {{"csv", (dir / "report.csv").string()}, {"json", (dir / "report.json").string()}};
    out.result_json = res.dump(2);
    write_text(dir / "result.json", out.result_json + "\n");
    return out;
}

RunOutcome cmd_validate(const RunConfig& cfg) {
    RunOutcome out;
    if (cfg.system_path.empty()) throw input_error("validate needs a system config (--system)");
    SystemSpec spec = load_system_file(cfg.system_path);
    auto issues = validate_system(spec);

    json res;
    res["system"] = spec.name;
    res["devices"] = spec.devices.size();
    res["connections"] = spec.connections.size();
    json list = json::array();
    for (const auto& i : issues) list.push_back({{"where", i.where}, {"message", i.message}});
    res["issues"] = list;
    res["valid"] = issues.empty();
    out.result_json = res.dump(2);
    out.exit_code = issues.empty() ? 0 : 2;
    return out;
}

}  // namespace tpes
