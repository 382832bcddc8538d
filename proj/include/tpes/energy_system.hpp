#ifndef TPES_ENERGY_SYSTEM_HPP
#define TPES_ENERGY_SYSTEM_HPP

#include <optional>
#include <string>
#include <vector>

namespace tpes {

// Annualization parameters of one device. Specific CAPEX is per kW of
// capacity, per kWh for storages.
struct EconomicParams {
    double wacc = 0.08;
    double lifetime_years = 20.0;
    double capex_exist = 0.0;     // currency, paid if the device exists
    double capex_spec = 0.0;      // currency per kW (kWh for storage)
    double opex_fix_share = 0.0;  // fraction of investment per year
    double opex_fix_abs = 0.0;    // currency per year
    double opex_var = 0.0;        // currency per kWh on flows leaving the device
};

enum class DeviceKind { source_sink, collector, transformer, storage };

std::string to_string(DeviceKind k);

// A bound that is either a constant or a named profile; absent means
// unconstrained on that side.
struct BoundSpec {
    bool present = false;
    double constant = 0.0;
    std::string profile;  // non-empty wins over constant

    static BoundSpec absent() { return {}; }
    static BoundSpec of(double c) { return {true, c, ""}; }
    static BoundSpec of_profile(const std::string& p) { return {true, 0.0, p}; }
};

struct SourceSinkSpec {
    BoundSpec lb;         // eta_lb(t)
    BoundSpec ub;         // eta_ub(t)
    bool per_unit = true;  // bounds multiply the device capacity
};

struct Conversion {
    std::string energy_in;
    std::string energy_out;
    double efficiency = 1.0;
    std::string efficiency_profile;  // time-varying efficiency, e.g. a heat pump COP
};

// Which aggregated flow the transformer capacity variable limits.
struct CapacityAnchor {
    bool input_side = false;
    std::string energy_type;
};

struct TransformerSpec {
    std::vector<Conversion> conversions;
    CapacityAnchor anchor;
};

struct StorageSpec {
    double eta_charge = 1.0;
    double eta_discharge = 1.0;
    double eta_self = 0.0;  // per hour
    double capacity_factor = 1.0;
};

struct CapacitySpec {
    enum class Mode { none, fixed, sized } mode = Mode::none;
    double value = 0.0;  // fixed capacity, or the big-M bound when sized

    static CapacitySpec none() { return {}; }
    static CapacitySpec fixed(double v) { return {Mode::fixed, v}; }
    static CapacitySpec sized(double big_m) { return {Mode::sized, big_m}; }
};

struct DeviceSpec {
    std::string name;
    DeviceKind kind = DeviceKind::collector;
    EconomicParams econ;
    CapacitySpec capacity;
    std::optional<SourceSinkSpec> source_sink;
    std::optional<TransformerSpec> transformer;
    std::optional<StorageSpec> storage;
};

struct Connection {
    std::string from;
    std::string to;
    std::string energy_type;
};

// annual energy of `device`'s flows <= share * annual energy of
// `reference_device`'s flows
struct EnergyShareCap {
    std::string name;
    std::string device;
    std::string reference_device;
    double share = 1.0;
};

struct SystemSpec {
    std::string name;
    std::vector<DeviceSpec> devices;
    std::vector<Connection> connections;
    std::vector<EnergyShareCap> share_caps;

    const DeviceSpec* find_device(const std::string& name) const;
    int device_index(const std::string& name) const;  // -1 if missing
};

// capital recovery factor: wacc*(1+wacc)^tau / ((1+wacc)^tau - 1)
double crf(double wacc, double lifetime_years);

struct AnnualizedCost {
    double exist_per_year = 0.0;   // c_exist
    double spec_per_unit_year = 0.0;  // c_spec
};

AnnualizedCost annualized_device_costs(const DeviceSpec& d);

struct ValidationIssue {
    std::string where;
    std::string message;
};

// Structural checks; defects are returned as data, not thrown.
std::vector<ValidationIssue> validate_system(const SystemSpec& spec);

SystemSpec load_system_file(const std::string& path);
SystemSpec load_system_json(const std::string& json_text);

}  // namespace tpes

#endif
