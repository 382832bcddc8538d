#ifndef TPES_FORMULATION_HPP
#define TPES_FORMULATION_HPP

#include <string>
#include <vector>

#include "tpes/aggregation.hpp"
#include "tpes/energy_system.hpp"
#include "tpes/milp.hpp"
#include "tpes/timeseries.hpp"

namespace tpes {

enum class FormulationKind { full, independent, linked };

FormulationKind parse_formulation_kind(const std::string& s);
std::string to_string(FormulationKind k);

// Variable handles of one storage in a built model.
struct StorageArtifacts {
    int device = -1;             // index into SystemSpec::devices
    std::vector<int> soc;        // full: per t; independent: per (k,g); linked: intra per (k,g), g in [0,N_g]
    std::vector<int> inter;      // linked: per original period i
    std::vector<int> intra_max;  // simplified bounds auxiliaries, per k
    std::vector<int> intra_min;
};

// A built model plus every handle needed to read a solution back in energy
// system terms.
struct ModelArtifacts {
    FormulationKind kind = FormulationKind::full;
    bool simplified_bounds = false;
    MilpModel model;
    SystemSpec spec;  // copy, so artifacts stay self-contained

    int n_blocks = 0;        // operational blocks: 1 (full) or N_k
    int steps = 0;           // steps per block: N_t (full) or N_g
    int n_original_periods = 0;  // N_i for typical kinds, 0 for full
    double dt = 1.0;
    std::vector<double> block_weight;  // |C_k|, or {1} for full
    std::vector<int> block_source;     // medoid source period per block
    std::vector<int> assignment;       // f(i), empty for full

    std::vector<std::vector<int>> flow_vars;  // [connection][block*steps + g]
    std::vector<StorageArtifacts> storages;
    std::vector<int> capacity_var;       // per device, -1 if not sized
    std::vector<int> delta_var;          // per device, -1 if none
    std::vector<double> capacity_fixed;  // per device, NaN unless fixed

    struct CostTerms {
        double fixed_constant = 0.0;
        std::vector<std::pair<int, double>> fixed;     // delta/capacity terms
        std::vector<std::pair<int, double>> variable;  // flow terms
    };
    std::vector<CostTerms> device_costs;  // per device

    double capacity_of(int device, const Solution& sol) const;
};

ModelArtifacts build_full_model(const SystemSpec& spec, const ProfileSet& profiles);
ModelArtifacts build_independent_model(const SystemSpec& spec, const TypicalPeriodSet& typ,
                                       const ProfileSet& profiles);
ModelArtifacts build_linked_model(const SystemSpec& spec, const TypicalPeriodSet& typ, const ProfileSet& profiles,
                                  bool simplified_bounds = false);

// Full-horizon state of charge of one storage, reconstructed as the
// superposition soc(i,g) = inter(i) * (1 - eta_self*dt)^g + intra(f(i),g)
// with 0-based step index g.
struct SocTrajectory {
    std::string device;
    FormulationKind kind = FormulationKind::full;
    double capacity = 0.0;
    double eta_self = 0.0;
    double dt = 1.0;
    int n_periods = 0;  // N_i
    int steps = 0;      // N_g
    std::vector<int> assignment;      // f(i)
    std::vector<double> soc;          // N_i * N_g
    std::vector<double> inter;        // N_i
    std::vector<double> intra;        // N_k * N_g
    std::vector<double> net_charge;   // N_k * N_g, dt*(eta_c*char - dis/eta_d)

    double soc_at(int i, int g) const { return soc[static_cast<std::size_t>(i) * steps + g]; }
    // worst Euler-recursion violation along the reconstructed sequence,
    // cyclic; the independent kind chains each period onto itself
    double max_recursion_residual() const;
    double min_soc() const;
    double max_soc() const;
};

// Solved model -> one trajectory per storage. steps_per_period shapes the
// full-model decode (0 keeps the horizon as a single period); typical-period
// models carry their own shape.
std::vector<SocTrajectory> decode_storage_trajectories(const ModelArtifacts& art, const Solution& sol,
                                                       int steps_per_period = 0);

// Flags simultaneous charge/discharge above the tolerance (kW); returns the
// worst overlap found.
double charge_discharge_overlap(const ModelArtifacts& art, const Solution& sol);

}  // namespace tpes

#endif
