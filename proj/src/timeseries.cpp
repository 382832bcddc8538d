#include "tpes/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "tpes/error.hpp"

namespace tpes {

const Profile* ProfileSet::find(const std::string& name) const {
    for (const auto& p : profiles)
        if (p.name == name) return &p;
    return nullptr;
}

const Profile& ProfileSet::require(const std::string& name) const {
    const Profile* p = find(name);
    if (!p) throw input_error("profile '" + name + "' not found in profile set");
    return *p;
}

void ProfileSet::add(Profile p) {
    if (!profiles.empty()) {
        if (p.length() != length())
            throw input_error("profile '" + p.name + "' has length " + std::to_string(p.length()) +
                              ", expected " + std::to_string(length()));
        if (p.step_hours != step_hours())
            throw input_error("profile '" + p.name + "' has a different step length");
    }
    if (find(p.name)) throw input_error("duplicate profile name '" + p.name + "'");
    profiles.push_back(std::move(p));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

ProfileSet ingest_profiles(const std::string& path, const std::vector<std::string>& expected_names) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open profile file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw input_error("profile file '" + path + "' is empty");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::vector<int> col_of;
    for (const auto& want : expected_names) {
        auto it = std::find(header.begin(), header.end(), want);
        if (it == header.end())
            throw input_error("column '" + want + "' not found in '" + path + "'");
        col_of.push_back(static_cast<int>(it - header.begin()));
    }

    std::vector<std::vector<double>> columns(expected_names.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw input_error("row " + std::to_string(row) + " of '" + path + "' has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        for (std::size_t k = 0; k < col_of.size(); ++k) {
            const std::string cell = trim(cells[col_of[k]]);
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
                throw input_error("non-numeric value '" + cell + "' at row " + std::to_string(row) +
                                  ", column '" + expected_names[k] + "' of '" + path + "'");
            columns[k].push_back(v);
        }
    }
    if (row == 0) throw input_error("profile file '" + path + "' has no data rows");

    ProfileSet set;
    for (std::size_t k = 0; k < expected_names.size(); ++k) {
        Profile p;
        p.name = expected_names[k];
        p.values = std::move(columns[k]);
        set.add(std::move(p));
    }
    return set;
}

PeriodMatrix reshape_to_periods(const Profile& profile, int steps_per_period) {
    if (steps_per_period <= 0) throw input_error("steps_per_period must be positive");
    const std::size_t n = profile.length();
    if (n == 0) throw input_error("profile '" + profile.name + "' is empty");
    if (n % static_cast<std::size_t>(steps_per_period) != 0)
        throw input_error("profile '" + profile.name + "' length " + std::to_string(n) +
                          " not divisible by period length " + std::to_string(steps_per_period));
    PeriodMatrix m;
    m.steps_per_period = steps_per_period;
    m.n_periods = static_cast<int>(n / steps_per_period);
    m.data = profile.values;
    return m;
}

std::vector<double> flatten(const PeriodMatrix& m) { return m.data; }

std::pair<ProfileSet, std::vector<ScalingRecord>> normalize_attributes(const ProfileSet& set) {
    ProfileSet out;
    std::vector<ScalingRecord> records;
    for (const auto& p : set.profiles) {
        auto [mn_it, mx_it] = std::minmax_element(p.values.begin(), p.values.end());
        ScalingRecord rec{p.name, *mn_it, *mx_it - *mn_it};
        Profile q = p;
        if (rec.span > 0) {
            for (auto& v : q.values) v = (v - rec.min) / rec.span;
        } else {
            // constant profile normalizes to zero
            std::fill(q.values.begin(), q.values.end(), 0.0);
        }
        out.add(std::move(q));
        records.push_back(rec);
    }
    return {std::move(out), std::move(records)};
}

Profile denormalize(const Profile& normalized, const ScalingRecord& rec) {
    Profile p = normalized;
    for (auto& v : p.values) v = v * rec.span + rec.min;
    return p;
}

SynthKind parse_synth_kind(const std::string& s) {
    if (s == "seasonal_sine") return SynthKind::seasonal_sine;
    if (s == "daily_sine") return SynthKind::daily_sine;
    if (s == "flat") return SynthKind::flat;
    if (s == "noisy_mix") return SynthKind::noisy_mix;
    throw input_error("unknown synthetic profile kind '" + s + "'");
}

namespace {

// Uniform double in [0,1) from raw engine output; std::uniform_real_distribution
// is not bit-stable across standard library implementations.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Profile synth_profile(SynthKind kind, std::uint64_t seed, std::size_t length, const SynthParams& params) {
    if (length == 0) throw input_error("synthetic profile length must be positive");
    Profile p;
    p.unit = "cf";
    p.values.resize(length);

    switch (kind) {
        case SynthKind::flat:
            p.name = "flat";
            std::fill(p.values.begin(), p.values.end(), params.value);
            break;
        case SynthKind::seasonal_sine:
            p.name = "seasonal_sine";
            for (std::size_t t = 0; t < length; ++t) {
                double arg = kTwoPi * params.cycles * static_cast<double>(t) / static_cast<double>(length) + params.phase;
                p.values[t] = params.offset + params.amplitude * std::sin(arg);
            }
            break;
        case SynthKind::daily_sine:
            p.name = "daily_sine";
            for (std::size_t t = 0; t < length; ++t) {
                double arg = kTwoPi * static_cast<double>(t % params.period_steps) / params.period_steps + params.phase;
                p.values[t] = params.offset + params.amplitude * std::sin(arg);
            }
            break;
        case SynthKind::noisy_mix: {
            p.name = "noisy_mix";
            std::mt19937_64 rng(seed);
            double ws = params.seasonal_weight, wd = params.daily_weight, wn = params.noise_weight;
            double wsum = ws + wd + wn;
            if (wsum <= 0) throw input_error("noisy_mix weights must not all be zero");
            ws /= wsum;
            wd /= wsum;
            wn /= wsum;
            for (std::size_t t = 0; t < length; ++t) {
                double seas = 0.5 + 0.5 * std::sin(kTwoPi * params.cycles * static_cast<double>(t) / static_cast<double>(length) + params.phase);
                double daily = 0.5 + 0.5 * std::sin(kTwoPi * static_cast<double>(t % params.period_steps) / params.period_steps);
                double noise = uniform01(rng);
                double v = ws * seas + wd * daily + wn * noise;
                p.values[t] = std::clamp(v, 0.0, 1.0);
            }
            break;
        }
    }
    for (double v : p.values)
        if (!std::isfinite(v)) throw input_error("synthetic profile produced a non-finite value");
    return p;
}

}  // namespace tpes
