#include "tpes/energy_system.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tpes/error.hpp"

namespace tpes {

using nlohmann::json;

std::string to_string(DeviceKind k) {
    switch (k) {
        case DeviceKind::source_sink: return "source_sink";
        case DeviceKind::collector: return "collector";
        case DeviceKind::transformer: return "transformer";
        case DeviceKind::storage: return "storage";
    }
    return "?";
}

const DeviceSpec* SystemSpec::find_device(const std::string& n) const {
    for (const auto& d : devices)
        if (d.name == n) return &d;
    return nullptr;
}

int SystemSpec::device_index(const std::string& n) const {
    for (std::size_t i = 0; i < devices.size(); ++i)
        if (devices[i].name == n) return static_cast<int>(i);
    return -1;
}

double crf(double wacc, double lifetime_years) {
    if (!(wacc > 0.0) || !(lifetime_years > 0.0))
        throw input_error("crf requires wacc > 0 and lifetime > 0");
    double q = std::pow(1.0 + wacc, lifetime_years);
    return wacc * q / (q - 1.0);
}

AnnualizedCost annualized_device_costs(const DeviceSpec& d) {
    AnnualizedCost c;
    double factor = 0.0;
    if (d.econ.capex_exist > 0.0 || d.econ.capex_spec > 0.0)
        factor = crf(d.econ.wacc, d.econ.lifetime_years) + d.econ.opex_fix_share;
    c.exist_per_year = d.econ.capex_exist * factor + d.econ.opex_fix_abs;
    c.spec_per_unit_year = d.econ.capex_spec * factor;
    return c;
}

std::vector<ValidationIssue> validate_system(const SystemSpec& spec) {
    std::vector<ValidationIssue> issues;
    auto flag = [&](const std::string& where, const std::string& msg) { issues.push_back({where, msg}); };

    std::set<std::string> names;
    for (const auto& d : spec.devices) {
        if (!names.insert(d.name).second) flag(d.name, "duplicate device name");
        if (d.econ.wacc <= 0.0 || d.econ.wacc >= 1.0) flag(d.name, "wacc must lie in (0,1)");
        if (d.econ.lifetime_years <= 0.0) flag(d.name, "lifetime must be positive");
        if (d.econ.capex_exist < 0 || d.econ.capex_spec < 0 || d.econ.opex_fix_share < 0 ||
            d.econ.opex_fix_abs < 0 || d.econ.opex_var < 0)
            flag(d.name, "costs must be non-negative");
        switch (d.kind) {
            case DeviceKind::source_sink:
                if (!d.source_sink) flag(d.name, "source_sink device without bounds payload");
                else if (d.source_sink->per_unit && d.capacity.mode == CapacitySpec::Mode::none)
                    flag(d.name, "per-unit bounds need a capacity (fixed or sized)");
                break;
            case DeviceKind::transformer:
                if (!d.transformer || d.transformer->conversions.empty())
                    flag(d.name, "transformer without conversions");
                else
                    for (const auto& cv : d.transformer->conversions)
                        if (cv.efficiency_profile.empty() && cv.efficiency <= 0)
                            flag(d.name, "conversion efficiency must be positive");
                break;
            case DeviceKind::storage:
                if (!d.storage) {
                    flag(d.name, "storage device without storage payload");
                } else {
                    const auto& s = *d.storage;
                    if (s.eta_charge <= 0 || s.eta_charge > 1 || s.eta_discharge <= 0 || s.eta_discharge > 1)
                        flag(d.name, "charge/discharge efficiencies must lie in (0,1]");
                    if (s.eta_self < 0 || s.eta_self >= 1) flag(d.name, "self-discharge must lie in [0,1)");
                    if (s.capacity_factor <= 0) flag(d.name, "capacity factor must be positive");
                }
                break;
            case DeviceKind::collector:
                break;
        }
        if (d.capacity.mode == CapacitySpec::Mode::sized && d.capacity.value <= 0)
            flag(d.name, "sized device needs a positive capacity bound (big-M)");
        if (d.capacity.mode == CapacitySpec::Mode::fixed && d.capacity.value < 0)
            flag(d.name, "fixed capacity must be non-negative");
        if (d.capacity.mode == CapacitySpec::Mode::none && d.econ.capex_spec > 0)
            flag(d.name, "specific capex without a capacity makes no cost term");
    }

    std::set<std::tuple<std::string, std::string, std::string>> conn_seen;
    for (const auto& c : spec.connections) {
        const std::string where = c.from + "->" + c.to;
        if (!spec.find_device(c.from)) flag(where, "connection from unknown device '" + c.from + "'");
        if (!spec.find_device(c.to)) flag(where, "connection to unknown device '" + c.to + "'");
        if (c.energy_type.empty()) flag(where, "connection without an energy type");
        if (!conn_seen.insert({c.from, c.to, c.energy_type}).second)
            flag(where, "duplicate connection for energy type '" + c.energy_type + "'");
    }

    // transformer conversions must see a matching inbound and outbound flow
    for (const auto& d : spec.devices) {
        if (d.kind != DeviceKind::transformer || !d.transformer) continue;
        for (const auto& cv : d.transformer->conversions) {
            bool has_in = false, has_out = false;
            for (const auto& c : spec.connections) {
                if (c.to == d.name && c.energy_type == cv.energy_in) has_in = true;
                if (c.from == d.name && c.energy_type == cv.energy_out) has_out = true;
            }
            if (!has_in) flag(d.name, "no inbound connection of type '" + cv.energy_in + "'");
            if (!has_out) flag(d.name, "no outbound connection of type '" + cv.energy_out + "'");
        }
    }

    // storages need both a charge and a discharge path
    for (const auto& d : spec.devices) {
        if (d.kind != DeviceKind::storage) continue;
        bool has_in = false, has_out = false;
        for (const auto& c : spec.connections) {
            if (c.to == d.name) has_in = true;
            if (c.from == d.name) has_out = true;
        }
        if (!has_in) flag(d.name, "storage has no charge path");
        if (!has_out) flag(d.name, "storage has no discharge path");
    }

    // collectors should not be dead ends
    for (const auto& d : spec.devices) {
        if (d.kind != DeviceKind::collector) continue;
        bool has_in = false, has_out = false;
        for (const auto& c : spec.connections) {
            if (c.to == d.name) has_in = true;
            if (c.from == d.name) has_out = true;
        }
        if (!has_in || !has_out) flag(d.name, "collector must have inbound and outbound connections");
    }

    for (const auto& cap : spec.share_caps) {
        if (!spec.find_device(cap.device)) flag(cap.name, "share cap on unknown device '" + cap.device + "'");
        if (!spec.find_device(cap.reference_device))
            flag(cap.name, "share cap references unknown device '" + cap.reference_device + "'");
        if (cap.share < 0) flag(cap.name, "share must be non-negative");
    }
    return issues;
}

namespace {

BoundSpec parse_bound(const json& j) {
    if (j.is_number()) return BoundSpec::of(j.get<double>());
    if (j.is_object() && j.contains("profile")) return BoundSpec::of_profile(j.at("profile").get<std::string>());
    if (j.is_string()) return BoundSpec::of_profile(j.get<std::string>());
    throw input_error("bound must be a number or {\"profile\": name}");
}

EconomicParams parse_econ(const json& j, double default_wacc) {
    EconomicParams e;
    e.wacc = j.value("wacc", default_wacc);
    e.lifetime_years = j.value("lifetime_years", 20.0);
    e.capex_exist = j.value("capex_exist", 0.0);
    e.capex_spec = j.value("capex_spec", 0.0);
    e.opex_fix_share = j.value("opex_fix_share", 0.0);
    e.opex_fix_abs = j.value("opex_fix_abs", 0.0);
    e.opex_var = j.value("opex_var", 0.0);
    return e;
}

}  // namespace

SystemSpec load_system_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw input_error(std::string("system config is not valid JSON: ") + e.what());
    }

    SystemSpec spec;
    spec.name = j.value("name", "system");
    double default_wacc = 0.08;
    if (j.contains("options")) default_wacc = j["options"].value("wacc", 0.08);

    if (!j.contains("devices") || !j["devices"].is_array()) throw input_error("system config needs a devices array");
    for (const auto& dj : j["devices"]) {
        DeviceSpec d;
        d.name = dj.at("name").get<std::string>();
        const std::string kind = dj.at("kind").get<std::string>();
        d.econ = parse_econ(dj.value("economics", json::object()), default_wacc);

        if (dj.contains("capacity")) {
            const auto& cj = dj["capacity"];
            if (cj.contains("fixed")) d.capacity = CapacitySpec::fixed(cj["fixed"].get<double>());
            else if (cj.contains("max")) d.capacity = CapacitySpec::sized(cj["max"].get<double>());
            else throw input_error("device '" + d.name + "': capacity needs 'fixed' or 'max'");
        }

        if (kind == "source_sink") {
            d.kind = DeviceKind::source_sink;
            SourceSinkSpec ss;
            const json bj = dj.value("bounds", json::object());
            if (bj.contains("lb")) ss.lb = parse_bound(bj["lb"]);
            if (bj.contains("ub")) ss.ub = parse_bound(bj["ub"]);
            ss.per_unit = bj.value("per_unit", true);
            d.source_sink = ss;
        } else if (kind == "collector") {
            d.kind = DeviceKind::collector;
        } else if (kind == "transformer") {
            d.kind = DeviceKind::transformer;
            TransformerSpec tf;
            for (const auto& cj : dj.value("conversions", json::array())) {
                Conversion cv;
                cv.energy_in = cj.at("from").get<std::string>();
                cv.energy_out = cj.at("to").get<std::string>();
                if (cj.contains("efficiency_profile")) cv.efficiency_profile = cj["efficiency_profile"].get<std::string>();
                else cv.efficiency = cj.at("efficiency").get<double>();
                tf.conversions.push_back(cv);
            }
            if (dj.contains("capacity_anchor")) {
                tf.anchor.input_side = dj["capacity_anchor"].value("side", "output") == "input";
                tf.anchor.energy_type = dj["capacity_anchor"].value("energy_type", "");
            } else if (!tf.conversions.empty()) {
                tf.anchor.input_side = false;
                tf.anchor.energy_type = tf.conversions.front().energy_out;
            }
            if (tf.anchor.energy_type.empty() && !tf.conversions.empty())
                tf.anchor.energy_type =
                    tf.anchor.input_side ? tf.conversions.front().energy_in : tf.conversions.front().energy_out;
            d.transformer = tf;
        } else if (kind == "storage") {
            d.kind = DeviceKind::storage;
            StorageSpec st;
            const json sj = dj.value("storage", json::object());
            st.eta_charge = sj.value("eta_charge", 1.0);
            st.eta_discharge = sj.value("eta_discharge", 1.0);
            st.eta_self = sj.value("eta_self", 0.0);
            st.capacity_factor = sj.value("capacity_factor", 1.0);
            d.storage = st;
        } else {
            throw input_error("device '" + d.name + "': unknown kind '" + kind + "'");
        }
        spec.devices.push_back(std::move(d));
    }

    for (const auto& cj : j.value("connections", json::array())) {
        Connection c;
        c.from = cj.at("from").get<std::string>();
        c.to = cj.at("to").get<std::string>();
        c.energy_type = cj.at("energy_type").get<std::string>();
        spec.connections.push_back(std::move(c));
    }

    if (j.contains("options")) {
        for (const auto& cj : j["options"].value("energy_share_caps", json::array())) {
            EnergyShareCap cap;
            cap.name = cj.value("name", "share_cap");
            cap.device = cj.at("device").get<std::string>();
            cap.reference_device = cj.at("reference_device").get<std::string>();
            cap.share = cj.at("share").get<double>();
            spec.share_caps.push_back(std::move(cap));
        }
    }
    return spec;
}

SystemSpec load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open system config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_system_json(ss.str());
}

}  // namespace tpes
