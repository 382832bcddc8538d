#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tpes/error.hpp"
#include "tpes/timeseries.hpp"

using namespace tpes;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("csv ingest reads the requested columns") {
    std::string body = "load,pv\n";
    for (int i = 0; i < 48; ++i) body += std::to_string(i) + "," + std::to_string(i * 0.5) + "\n";
    auto path = write_temp_csv("tpes_ingest_ok.csv", body);
    ProfileSet set = ingest_profiles(path, {"load", "pv"});
    CHECK(set.profiles.size() == 2);
    CHECK(set.length() == 48);
    CHECK(set.require("load").values[3] == doctest::Approx(3.0));
    CHECK(set.require("pv").values[4] == doctest::Approx(2.0));
}

TEST_CASE("csv ingest reports a missing column by name") {
    auto path = write_temp_csv("tpes_ingest_missing.csv", "load,pv\n1,2\n");
    CHECK_THROWS_WITH_AS(ingest_profiles(path, {"wind"}), doctest::Contains("wind"), Error);
}

TEST_CASE("csv ingest reports a bad cell with its row") {
    auto path = write_temp_csv("tpes_ingest_nan.csv", "load\n1\n2\n3\n4\n5\n6\nNaN\n8\n");
    CHECK_THROWS_WITH_AS(ingest_profiles(path, {"load"}), doctest::Contains("row 7"), Error);
}

TEST_CASE("csv ingest rejects ragged rows") {
    auto path = write_temp_csv("tpes_ingest_ragged.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(ingest_profiles(path, {"a"}), Error);
}

TEST_CASE("reshape splits a profile into periods and round-trips") {
    Profile p;
    p.name = "x";
    for (int i = 0; i < 48; ++i) p.values.push_back(i);
    PeriodMatrix m = reshape_to_periods(p, 24);
    CHECK(m.n_periods == 2);
    CHECK(m.steps_per_period == 24);
    CHECK(m.at(0, 23) == 23);
    CHECK(m.at(1, 0) == 24);
    CHECK(flatten(m) == p.values);

    Profile bad = p;
    bad.values.resize(50);
    CHECK_THROWS_WITH_AS(reshape_to_periods(bad, 24), doctest::Contains("not divisible"), Error);
}

TEST_CASE("reshape arithmetic for a year of hours") {
    Profile p;
    p.values.assign(8760, 1.0);
    PeriodMatrix m = reshape_to_periods(p, 24);
    CHECK(m.n_periods == 365);
}

TEST_CASE("min-max normalization and its inverse") {
    ProfileSet set;
    Profile p;
    p.name = "a";
    p.values = {2, 4, 6};
    set.add(p);
    Profile c;
    c.name = "b";
    c.values = {5, 5, 5};
    set.add(c);

    auto [norm, recs] = normalize_attributes(set);
    CHECK(norm.require("a").values == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(norm.require("b").values == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(recs[1].min == 5.0);
    CHECK(recs[1].span == 0.0);

    Profile back = denormalize(norm.require("a"), recs[0]);
    for (std::size_t i = 0; i < back.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(set.require("a").values[i]).epsilon(1e-12));

    // argmax is preserved
    CHECK(std::distance(norm.require("a").values.begin(),
                        std::max_element(norm.require("a").values.begin(), norm.require("a").values.end())) == 2);
}

TEST_CASE("synthetic profiles are deterministic and bounded") {
    Profile flat = synth_profile(SynthKind::flat, 7, 24);
    for (double v : flat.values) CHECK(v == 1.0);

    Profile a = synth_profile(SynthKind::seasonal_sine, 1, 8760);
    Profile b = synth_profile(SynthKind::seasonal_sine, 1, 8760);
    CHECK(a.values == b.values);

    Profile n1 = synth_profile(SynthKind::noisy_mix, 1, 8760);
    Profile n2 = synth_profile(SynthKind::noisy_mix, 2, 8760);
    CHECK(n1.values != n2.values);
    for (double v : n1.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    CHECK_THROWS_AS(parse_synth_kind("wobble"), Error);
}
