#include <doctest.h>

#include <fstream>
#include <sstream>

#include "tpes/energy_system.hpp"
#include "tpes/error.hpp"

using namespace tpes;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kConfigDir = std::string(TPES_SOURCE_DIR) + "/configs/";

}  // namespace

TEST_CASE("crf: annuity values") {
    CHECK(crf(0.08, 20) == doctest::Approx(0.101852).epsilon(1e-5));
    CHECK(crf(0.08, 15) == doctest::Approx(0.116830).epsilon(1e-5));
    CHECK(crf(0.05, 1) == doctest::Approx(1.05));
    CHECK(crf(0.12, 1) == doctest::Approx(1.12));
    // wacc -> 0 limit tends to 1/tau
    CHECK(crf(1e-9, 10) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK_THROWS_AS(crf(0.0, 10), Error);
    CHECK_THROWS_AS(crf(0.08, 0.0), Error);
}

TEST_CASE("crf: monotone in both arguments") {
    double prev = 0;
    for (double w = 0.01; w <= 0.2; w += 0.01) {
        double v = crf(w, 20);
        CHECK(v > prev);
        prev = v;
    }
    prev = 1e9;
    for (double tau = 1; tau <= 40; tau += 1) {
        double v = crf(0.08, tau);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("annualized device costs: gas boiler") {
    DeviceSpec d;
    d.name = "boiler";
    d.kind = DeviceKind::transformer;
    d.econ.wacc = 0.08;
    d.econ.lifetime_years = 20;
    d.econ.capex_exist = 5000;
    d.econ.capex_spec = 50;
    d.econ.opex_fix_share = 0.015;
    AnnualizedCost c = annualized_device_costs(d);
    CHECK(c.exist_per_year == doctest::Approx(584.26).epsilon(1e-4));
    CHECK(c.spec_per_unit_year == doctest::Approx(5.84).epsilon(1e-3));
}

TEST_CASE("annualized device costs: battery and zero-capex import") {
    DeviceSpec bat;
    bat.name = "battery";
    bat.kind = DeviceKind::storage;
    bat.econ.wacc = 0.08;
    bat.econ.lifetime_years = 15;
    bat.econ.capex_spec = 300;
    bat.econ.opex_fix_share = 0.01;
    AnnualizedCost c = annualized_device_costs(bat);
    CHECK(c.spec_per_unit_year == doctest::Approx(300 * (0.116830 + 0.01)).epsilon(1e-5));

    DeviceSpec grid;
    grid.name = "grid";
    grid.kind = DeviceKind::source_sink;
    grid.econ.opex_fix_abs = 140.0;
    AnnualizedCost g = annualized_device_costs(grid);
    CHECK(g.exist_per_year == doctest::Approx(140.0));
    CHECK(g.spec_per_unit_year == 0.0);
}

TEST_CASE("annualized costs scale linearly in specific capex") {
    DeviceSpec d;
    d.econ.wacc = 0.08;
    d.econ.lifetime_years = 18;
    d.econ.capex_spec = 100;
    d.econ.opex_fix_share = 0.02;
    double one = annualized_device_costs(d).spec_per_unit_year;
    d.econ.capex_spec = 200;
    CHECK(annualized_device_costs(d).spec_per_unit_year == doctest::Approx(2 * one));
}

TEST_CASE("bundled case systems validate cleanly") {
    for (const char* name : {"chp.json", "residential.json", "island.json"}) {
        SystemSpec spec = load_system_file(kConfigDir + name);
        auto issues = validate_system(spec);
        for (const auto& i : issues) MESSAGE(name, ": ", i.where, ": ", i.message);
        CHECK(issues.empty());
    }
}

TEST_CASE("bundled configs carry the published storage parameters") {
    SystemSpec chp = load_system_file(kConfigDir + "chp.json");
    const DeviceSpec* hs = chp.find_device("heat_storage");
    REQUIRE(hs);
    CHECK(hs->storage->eta_self == doctest::Approx(1e-3));
    CHECK(hs->econ.capex_spec == 90.0);
    CHECK(hs->econ.lifetime_years == 25.0);

    SystemSpec island = load_system_file(kConfigDir + "island.json");
    const DeviceSpec* bat = island.find_device("battery");
    REQUIRE(bat);
    CHECK(bat->storage->eta_self == doctest::Approx(5e-4));
    CHECK(bat->econ.capex_spec == 300.0);
    const DeviceSpec* h2 = island.find_device("h2_storage");
    REQUIRE(h2);
    CHECK(h2->storage->eta_self == 0.0);
    CHECK(h2->econ.capex_spec == 15.0);
    CHECK(h2->storage->eta_charge == doctest::Approx(0.9));
    CHECK(h2->storage->eta_discharge == doctest::Approx(1.0));

    // the 10% backup cap is wired as a share constraint
    REQUIRE(island.share_caps.size() == 1);
    CHECK(island.share_caps[0].share == doctest::Approx(0.10));
    CHECK(island.share_caps[0].device == "backup_plant");
}

TEST_CASE("single-defect mutations are rejected") {
    std::string text = read_file(kConfigDir + "chp.json");

    SUBCASE("connection to an unknown device") {
        SystemSpec spec = load_system_json(text);
        spec.connections.push_back({"gas_bus", "foo", "gas"});
        auto issues = validate_system(spec);
        REQUIRE(!issues.empty());
        bool named = false;
        for (const auto& i : issues)
            if (i.message.find("foo") != std::string::npos) named = true;
        CHECK(named);
    }
    SUBCASE("transformer without a matching outbound energy type") {
        SystemSpec spec = load_system_json(text);
        // retarget the boiler's heat output so the conversion dangles
        for (auto& c : spec.connections)
            if (c.from == "gas_boiler") c.energy_type = "steam";
        auto issues = validate_system(spec);
        CHECK(!issues.empty());
    }
    SUBCASE("storage without a discharge path") {
        SystemSpec spec = load_system_json(text);
        spec.connections.erase(std::remove_if(spec.connections.begin(), spec.connections.end(),
                                              [](const Connection& c) { return c.from == "heat_storage"; }),
                               spec.connections.end());
        auto issues = validate_system(spec);
        bool found = false;
        for (const auto& i : issues)
            if (i.message.find("discharge") != std::string::npos) found = true;
        CHECK(found);
    }
    SUBCASE("bad storage efficiency") {
        SystemSpec spec = load_system_json(text);
        for (auto& d : spec.devices)
            if (d.storage) d.storage->eta_charge = 1.5;
        CHECK(!validate_system(spec).empty());
    }
    SUBCASE("bad wacc") {
        SystemSpec spec = load_system_json(text);
        spec.devices[0].econ.wacc = 1.5;
        CHECK(!validate_system(spec).empty());
    }
}

TEST_CASE("config parse errors are reported as input errors") {
    CHECK_THROWS_AS(load_system_json("{not json"), Error);
    CHECK_THROWS_AS(load_system_json("{\"name\":\"x\"}"), Error);  // no devices
    CHECK_THROWS_WITH_AS(load_system_json(R"({"devices":[{"name":"a","kind":"widget"}]})"),
                         doctest::Contains("widget"), Error);
    CHECK_THROWS_AS(load_system_file("/nonexistent/path.json"), Error);
}

TEST_CASE("heat pump COP above one is accepted for transformers") {
    // transformer efficiencies may exceed 1 (coefficient of performance);
    // storage efficiencies may not
    std::string text = read_file(kConfigDir + "residential.json");
    SystemSpec spec = load_system_json(text);
    for (auto& d : spec.devices)
        if (d.transformer)
            for (auto& cv : d.transformer->conversions)
                if (cv.efficiency_profile.empty() && d.name == "electric_heater") cv.efficiency = 3.4;
    CHECK(validate_system(spec).empty());
}
