#ifndef TPES_TIMESERIES_HPP
#define TPES_TIMESERIES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tpes {

// One named attribute series, hourly by default. Values are either kW or a
// dimensionless capacity factor in [0,1]; the unit string tells which.
struct Profile {
    std::string name;
    std::string unit = "kW";
    std::vector<double> values;
    double step_hours = 1.0;

    std::size_t length() const { return values.size(); }
};

// A profile reshaped into n_periods rows of steps_per_period values each,
// row-major, preserving the original chronology.
struct PeriodMatrix {
    int n_periods = 0;
    int steps_per_period = 0;
    std::vector<double> data;  // n_periods * steps_per_period

    double at(int period, int step) const { return data[static_cast<std::size_t>(period) * steps_per_period + step]; }
    const double* row(int period) const { return data.data() + static_cast<std::size_t>(period) * steps_per_period; }
};

struct ProfileSet {
    std::vector<Profile> profiles;

    std::size_t length() const { return profiles.empty() ? 0 : profiles.front().length(); }
    double step_hours() const { return profiles.empty() ? 1.0 : profiles.front().step_hours; }
    const Profile* find(const std::string& name) const;
    const Profile& require(const std::string& name) const;
    void add(Profile p);
};

// Min-max scaling record, span == 0 marks a constant profile.
struct ScalingRecord {
    std::string name;
    double min = 0.0;
    double span = 0.0;
};

enum class SynthKind { seasonal_sine, daily_sine, flat, noisy_mix };

SynthKind parse_synth_kind(const std::string& s);

// Optional shape parameters for the synthetic generator; the defaults give
// profiles in [0,1] suitable as capacity factors.
struct SynthParams {
    double amplitude = 0.5;
    double offset = 0.5;
    double phase = 0.0;        // radians
    double cycles = 1.0;       // seasonal cycles over the horizon
    int period_steps = 24;     // daily_sine / noisy_mix day length
    double value = 1.0;        // flat level
    // noisy_mix blend weights, renormalised internally
    double seasonal_weight = 0.5;
    double daily_weight = 0.35;
    double noise_weight = 0.15;
};

// CSV ingest: header row of attribute names, one row per time step, comma
// separated, decimal point. Fails on missing columns, non-numeric cells and
// ragged rows.
ProfileSet ingest_profiles(const std::string& path, const std::vector<std::string>& expected_names);

PeriodMatrix reshape_to_periods(const Profile& profile, int steps_per_period);
std::vector<double> flatten(const PeriodMatrix& m);

std::pair<ProfileSet, std::vector<ScalingRecord>> normalize_attributes(const ProfileSet& set);
Profile denormalize(const Profile& normalized, const ScalingRecord& rec);

Profile synth_profile(SynthKind kind, std::uint64_t seed, std::size_t length, const SynthParams& params = {});

}  // namespace tpes

#endif
