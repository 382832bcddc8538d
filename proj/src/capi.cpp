#include "tpes.h"

#include <cmath>
#include <cstring>
#include <string>

#include "tpes/aggregation.hpp"
#include "tpes/energy_system.hpp"
#include "tpes/error.hpp"
#include "tpes/run.hpp"

#include <nlohmann/json.hpp>

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tpes_status status_of(const std::exception& e) {
    g_last_error = e.what();
    return static_cast<tpes_status>(tpes::exit_code_for(e));
}

template <typename F>
tpes_status guarded(F&& f) {
    try {
        f();
        return TPES_OK;
    } catch (const std::exception& e) {
        return status_of(e);
    } catch (...) {
        g_last_error = "unknown error";
        return TPES_ERR_SOLVER;
    }
}

tpes_status run_command(const char* config_json, char** result_json, tpes::RunOutcome (*fn)(const tpes::RunConfig&)) {
    if (!config_json || !result_json) {
        g_last_error = "null argument";
        return TPES_ERR_INPUT;
    }
    try {
        tpes::RunConfig cfg = tpes::parse_run_config(config_json);
        tpes::RunOutcome out = fn(cfg);
        *result_json = dup_string(out.result_json);
        if (out.exit_code != 0) g_last_error = "command finished with status " + std::to_string(out.exit_code);
        return static_cast<tpes_status>(out.exit_code);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        nlohmann::json j;
        j["error"] = e.what();
        *result_json = dup_string(j.dump(2));
        return static_cast<tpes_status>(tpes::exit_code_for(e));
    }
}

}  // namespace

struct tpes_profiles {
    tpes::ProfileSet set;
};
struct tpes_typical {
    tpes::TypicalPeriodSet set;
};
struct tpes_system {
    tpes::SystemSpec spec;
};

extern "C" {

const char* tpes_version(void) { return "0.1.0"; }

const char* tpes_last_error(void) { return g_last_error.c_str(); }

void tpes_string_free(char* s) { delete[] s; }

tpes_status tpes_profiles_read_csv(const char* path, const char* const* names, int n_names, tpes_profiles** out) {
    return guarded([&] {
        if (!path || !out || (n_names > 0 && !names)) throw tpes::input_error("null argument");
        std::vector<std::string> want;
        for (int i = 0; i < n_names; ++i) want.emplace_back(names[i]);
        auto* p = new tpes_profiles{tpes::ingest_profiles(path, want)};
        *out = p;
    });
}

tpes_status tpes_profiles_synth(const char* recipe_json, uint64_t seed, tpes_profiles** out) {
    return guarded([&] {
        if (!recipe_json || !out) throw tpes::input_error("null argument");
        tpes::RunConfig cfg;
        cfg.synthetic_recipe = recipe_json;
        cfg.seed = seed;
        auto* p = new tpes_profiles{tpes::load_profiles(cfg, {})};
        *out = p;
    });
}

int tpes_profiles_count(const tpes_profiles* p) { return p ? static_cast<int>(p->set.profiles.size()) : 0; }

long tpes_profiles_length(const tpes_profiles* p) { return p ? static_cast<long>(p->set.length()) : 0; }

tpes_status tpes_profiles_values(const tpes_profiles* p, const char* name, double* buffer, long buffer_len) {
    return guarded([&] {
        if (!p || !name || !buffer) throw tpes::input_error("null argument");
        const tpes::Profile& prof = p->set.require(name);
        if (buffer_len < static_cast<long>(prof.length()))
            throw tpes::input_error("buffer too small for profile '" + std::string(name) + "'");
        std::memcpy(buffer, prof.values.data(), prof.length() * sizeof(double));
    });
}

void tpes_profiles_free(tpes_profiles* p) { delete p; }

tpes_status tpes_aggregate(const tpes_profiles* profiles, int steps_per_period, int n_typical, const char* mode,
                           tpes_typical** out) {
    return guarded([&] {
        if (!profiles || !out) throw tpes::input_error("null argument");
        auto [norm, records] = tpes::normalize_attributes(profiles->set);
        tpes::CandidateMatrix cm = tpes::build_candidates(norm, steps_per_period);
        tpes::ClusterMode m = tpes::parse_cluster_mode(mode ? mode : "pam");
        *out = new tpes_typical{tpes::cluster_kmedoids(cm, n_typical, m)};
    });
}

int tpes_typical_count(const tpes_typical* t) { return t ? t->set.n_typical : 0; }

tpes_status tpes_typical_to_json(const tpes_typical* t, const tpes_profiles* profiles, char** json_out) {
    return guarded([&] {
        if (!t || !profiles || !json_out) throw tpes::input_error("null argument");
        *json_out = dup_string(tpes::typical_set_to_json(t->set, profiles->set));
    });
}

tpes_status tpes_typical_representation_error(const tpes_typical* t, const tpes_profiles* profiles, double* out) {
    return guarded([&] {
        if (!t || !profiles || !out) throw tpes::input_error("null argument");
        auto [norm, records] = tpes::normalize_attributes(profiles->set);
        tpes::CandidateMatrix cm = tpes::build_candidates(norm, t->set.steps_per_period);
        *out = tpes::representation_error(cm, t->set);
    });
}

void tpes_typical_free(tpes_typical* t) { delete t; }

tpes_status tpes_system_load_file(const char* path, tpes_system** out) {
    return guarded([&] {
        if (!path || !out) throw tpes::input_error("null argument");
        *out = new tpes_system{tpes::load_system_file(path)};
    });
}

tpes_status tpes_system_load_json(const char* json_text, tpes_system** out) {
    return guarded([&] {
        if (!json_text || !out) throw tpes::input_error("null argument");
        *out = new tpes_system{tpes::load_system_json(json_text)};
    });
}

tpes_status tpes_system_validate(const tpes_system* s, char** report_json) {
    return guarded([&] {
        if (!s || !report_json) throw tpes::input_error("null argument");
        auto issues = tpes::validate_system(s->spec);
        nlohmann::json j;
        j["valid"] = issues.empty();
        nlohmann::json list = nlohmann::json::array();
        for (const auto& i : issues) list.push_back({{"where", i.where}, {"message", i.message}});
        j["issues"] = list;
        *report_json = dup_string(j.dump(2));
    });
}

void tpes_system_free(tpes_system* s) { delete s; }

double tpes_crf(double wacc, double lifetime_years) {
    try {
        return tpes::crf(wacc, lifetime_years);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return std::nan("");
    }
}

tpes_status tpes_cmd_aggregate(const char* config_json, char** result_json) {
    return run_command(config_json, result_json, &tpes::cmd_aggregate);
}

tpes_status tpes_cmd_solve(const char* config_json, char** result_json) {
    return run_command(config_json, result_json, &tpes::cmd_solve);
}

tpes_status tpes_cmd_sweep(const char* config_json, char** result_json) {
    return run_command(config_json, result_json, &tpes::cmd_sweep);
}

tpes_status tpes_cmd_validate(const char* config_json, char** result_json) {
    return run_command(config_json, result_json, &tpes::cmd_validate);
}

}  // extern "C"
