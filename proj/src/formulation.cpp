#include "tpes/formulation.hpp"

#include <algorithm>
#include <cmath>

#include "tpes/error.hpp"

namespace tpes {

FormulationKind parse_formulation_kind(const std::string& s) {
    if (s == "full") return FormulationKind::full;
    if (s == "independent") return FormulationKind::independent;
    if (s == "linked") return FormulationKind::linked;
    throw input_error("unknown formulation kind '" + s + "'");
}

std::string to_string(FormulationKind k) {
    switch (k) {
        case FormulationKind::full: return "full";
        case FormulationKind::independent: return "independent";
        case FormulationKind::linked: return "linked";
    }
    return "?";
}

double ModelArtifacts::capacity_of(int device, const Solution& sol) const {
    if (capacity_var[device] >= 0) return sol.values[capacity_var[device]];
    return capacity_fixed[device];
}

namespace {

std::string idx2(const std::string& base, int a, int b) {
    return base + "_" + std::to_string(a) + "_" + std::to_string(b);
}

class Builder {
  public:
    Builder(const SystemSpec& spec, const ProfileSet& profiles, const TypicalPeriodSet* typ, FormulationKind kind,
            bool simplified)
        : spec_(spec), profiles_(profiles), typ_(typ) {
        art_.kind = kind;
        art_.simplified_bounds = simplified;
        art_.spec = spec;
        art_.dt = profiles.step_hours();

        auto issues = validate_system(spec);
        if (!issues.empty()) {
            std::string msg = "system '" + spec.name + "' fails validation:";
            for (const auto& i : issues) msg += "\n  " + i.where + ": " + i.message;
            throw input_error(msg);
        }

        if (typ_) {
            art_.n_blocks = typ_->n_typical;
            art_.steps = typ_->steps_per_period;
            art_.n_original_periods = typ_->n_candidates();
            art_.assignment = typ_->assignment;
            art_.block_weight.assign(typ_->cardinalities.begin(), typ_->cardinalities.end());
            art_.block_source = typ_->medoid_source_indices;
            const std::size_t need = static_cast<std::size_t>(typ_->n_candidates()) * typ_->steps_per_period;
            if (profiles_.length() != need)
                throw input_error("profiles cover " + std::to_string(profiles_.length()) +
                                  " steps but the aggregation describes " + std::to_string(need));
        } else {
            art_.n_blocks = 1;
            art_.steps = static_cast<int>(profiles_.length());
            art_.n_original_periods = 0;
            art_.block_weight = {1.0};
            art_.block_source = {0};
        }
        if (profiles_.length() == 0) throw input_error("profile set is empty");
        art_.model.name = spec.name + "_" + to_string(kind);
    }

    ModelArtifacts build() {
        add_device_vars();
        add_flow_vars();
        add_collector_balances();
        add_transformer_rows();
        add_source_sink_rows();
        add_storage_rows();
        add_share_caps();
        return std::move(art_);
    }

  private:
    const SystemSpec& spec_;
    const ProfileSet& profiles_;
    const TypicalPeriodSet* typ_;
    ModelArtifacts art_;

    int nb() const { return art_.n_blocks; }
    int ns() const { return art_.steps; }

    double pvalue(const std::string& name, int b, int g) const {
        const Profile& p = profiles_.require(name);
        std::size_t idx = typ_ ? static_cast<std::size_t>(art_.block_source[b]) * ns() + g : static_cast<std::size_t>(g);
        return p.values[idx];
    }

    double bound_value(const BoundSpec& bs, int b, int g) const {
        if (!bs.profile.empty()) return pvalue(bs.profile, b, g);
        return bs.constant;
    }

    // device capacity/binary variables plus the fixed part of the objective
    void add_device_vars() {
        const auto n = spec_.devices.size();
        art_.capacity_var.assign(n, -1);
        art_.delta_var.assign(n, -1);
        art_.capacity_fixed.assign(n, std::nan(""));
        art_.device_costs.resize(n);

        for (std::size_t d = 0; d < n; ++d) {
            const DeviceSpec& dev = spec_.devices[d];
            AnnualizedCost ac = annualized_device_costs(dev);
            auto& terms = art_.device_costs[d];

            switch (dev.capacity.mode) {
                case CapacitySpec::Mode::none:
                    terms.fixed_constant += dev.econ.opex_fix_abs;
                    art_.model.objective_offset += dev.econ.opex_fix_abs;
                    break;
                case CapacitySpec::Mode::fixed: {
                    art_.capacity_fixed[d] = dev.capacity.value;
                    if (dev.capacity.value > 0) {
                        double c = ac.exist_per_year + ac.spec_per_unit_year * dev.capacity.value;
                        terms.fixed_constant += c;
                        art_.model.objective_offset += c;
                    }
                    break;
                }
                case CapacitySpec::Mode::sized: {
                    int cap = art_.model.add_var("D_" + dev.name, 0.0, dev.capacity.value);
                    art_.capacity_var[d] = cap;
                    if (ac.spec_per_unit_year != 0.0) {
                        art_.model.add_objective_term(cap, ac.spec_per_unit_year);
                        terms.fixed.emplace_back(cap, ac.spec_per_unit_year);
                    }
                    if (dev.econ.capex_exist > 0.0) {
                        int delta = art_.model.add_binary("delta_" + dev.name);
                        art_.delta_var[d] = delta;
                        art_.model.add_objective_term(delta, ac.exist_per_year);
                        terms.fixed.emplace_back(delta, ac.exist_per_year);
                        // big-M coupling M*delta >= D
                        art_.model.add_row("bigm_" + dev.name, {{cap, 1.0}, {delta, -dev.capacity.value}}, Sense::le,
                                           0.0);
                    } else if (dev.econ.opex_fix_abs != 0.0) {
                        terms.fixed_constant += dev.econ.opex_fix_abs;
                        art_.model.objective_offset += dev.econ.opex_fix_abs;
                    }
                    break;
                }
            }
        }
    }

    void add_flow_vars() {
        art_.flow_vars.resize(spec_.connections.size());
        for (std::size_t c = 0; c < spec_.connections.size(); ++c) {
            const Connection& conn = spec_.connections[c];
            const int src = spec_.device_index(conn.from);
            const double cvar = spec_.devices[src].econ.opex_var;
            art_.flow_vars[c].resize(static_cast<std::size_t>(nb()) * ns());
            for (int b = 0; b < nb(); ++b)
                for (int g = 0; g < ns(); ++g) {
                    std::string name = "F_" + conn.from + "__" + conn.to + "__" + conn.energy_type + "_" +
                                       std::to_string(b) + "_" + std::to_string(g);
                    int v = art_.model.add_var(name, 0.0, kInf);
                    art_.flow_vars[c][static_cast<std::size_t>(b) * ns() + g] = v;
                    if (cvar != 0.0) {
                        double coeff = art_.block_weight[b] * cvar * art_.dt;
                        art_.model.add_objective_term(v, coeff);
                        art_.device_costs[src].variable.emplace_back(v, coeff);
                    }
                }
        }
    }

    int flow(int conn, int b, int g) const { return art_.flow_vars[conn][static_cast<std::size_t>(b) * ns() + g]; }

    std::vector<int> connections_into(const std::string& dev, const std::string& etype = "") const {
        std::vector<int> out;
        for (std::size_t c = 0; c < spec_.connections.size(); ++c)
            if (spec_.connections[c].to == dev && (etype.empty() || spec_.connections[c].energy_type == etype))
                out.push_back(static_cast<int>(c));
        return out;
    }

    std::vector<int> connections_out_of(const std::string& dev, const std::string& etype = "") const {
        std::vector<int> out;
        for (std::size_t c = 0; c < spec_.connections.size(); ++c)
            if (spec_.connections[c].from == dev && (etype.empty() || spec_.connections[c].energy_type == etype))
                out.push_back(static_cast<int>(c));
        return out;
    }

    void add_collector_balances() {
        for (const auto& dev : spec_.devices) {
            if (dev.kind != DeviceKind::collector) continue;
            auto in = connections_into(dev.name), out = connections_out_of(dev.name);
            for (int b = 0; b < nb(); ++b)
                for (int g = 0; g < ns(); ++g) {
                    std::vector<std::pair<int, double>> coeffs;
                    for (int c : in) coeffs.emplace_back(flow(c, b, g), 1.0);
                    for (int c : out) coeffs.emplace_back(flow(c, b, g), -1.0);
                    art_.model.add_row(idx2("bal_" + dev.name, b, g), std::move(coeffs), Sense::eq, 0.0);
                }
        }
    }

    void add_transformer_rows() {
        for (std::size_t d = 0; d < spec_.devices.size(); ++d) {
            const DeviceSpec& dev = spec_.devices[d];
            if (dev.kind != DeviceKind::transformer) continue;
            const TransformerSpec& tf = *dev.transformer;

            for (std::size_t ci = 0; ci < tf.conversions.size(); ++ci) {
                const Conversion& cv = tf.conversions[ci];
                auto in = connections_into(dev.name, cv.energy_in);
                auto out = connections_out_of(dev.name, cv.energy_out);
                for (int b = 0; b < nb(); ++b)
                    for (int g = 0; g < ns(); ++g) {
                        double eff = cv.efficiency_profile.empty() ? cv.efficiency
                                                                   : pvalue(cv.efficiency_profile, b, g);
                        if (!(eff > 0)) throw input_error("non-positive efficiency for '" + dev.name + "'");
                        std::vector<std::pair<int, double>> coeffs;
                        for (int c : in) coeffs.emplace_back(flow(c, b, g), eff);
                        for (int c : out) coeffs.emplace_back(flow(c, b, g), -1.0);
                        art_.model.add_row("conv_" + dev.name + "_" + std::to_string(ci) + "_" + std::to_string(b) +
                                               "_" + std::to_string(g),
                                           std::move(coeffs), Sense::eq, 0.0);
                    }
            }

            if (dev.capacity.mode == CapacitySpec::Mode::none) continue;
            auto anchored = tf.anchor.input_side ? connections_into(dev.name, tf.anchor.energy_type)
                                                 : connections_out_of(dev.name, tf.anchor.energy_type);
            if (anchored.empty())
                throw input_error("transformer '" + dev.name + "' has no flow matching its capacity anchor");
            for (int b = 0; b < nb(); ++b)
                for (int g = 0; g < ns(); ++g) {
                    std::vector<std::pair<int, double>> coeffs;
                    for (int c : anchored) coeffs.emplace_back(flow(c, b, g), 1.0);
                    double rhs = 0.0;
                    if (art_.capacity_var[d] >= 0) coeffs.emplace_back(art_.capacity_var[d], -1.0);
                    else rhs = art_.capacity_fixed[d];
                    art_.model.add_row(idx2("cap_" + dev.name, b, g), std::move(coeffs), Sense::le, rhs);
                }
        }
    }

    void add_source_sink_rows() {
        for (std::size_t d = 0; d < spec_.devices.size(); ++d) {
            const DeviceSpec& dev = spec_.devices[d];
            if (dev.kind != DeviceKind::source_sink) continue;
            const SourceSinkSpec& ss = *dev.source_sink;
            if (!ss.lb.present && !ss.ub.present) continue;

            std::vector<int> adj = connections_out_of(dev.name);
            for (int c : connections_into(dev.name)) adj.push_back(c);
            if (adj.empty()) continue;  // validation already warned about structure

            const bool same_bound = ss.lb.present && ss.ub.present && ss.lb.profile == ss.ub.profile &&
                                    (ss.lb.profile.empty() ? ss.lb.constant == ss.ub.constant : true);

            for (int b = 0; b < nb(); ++b)
                for (int g = 0; g < ns(); ++g) {
                    auto make_row = [&](const char* tag, const BoundSpec& bound, Sense sense) {
                        std::vector<std::pair<int, double>> coeffs;
                        for (int c : adj) coeffs.emplace_back(flow(c, b, g), 1.0);
                        double eta = bound_value(bound, b, g);
                        double rhs = 0.0;
                        if (!ss.per_unit) {
                            rhs = eta;
                        } else if (art_.capacity_var[d] >= 0) {
                            coeffs.emplace_back(art_.capacity_var[d], -eta);
                        } else {
                            rhs = eta * art_.capacity_fixed[d];
                        }
                        art_.model.add_row(idx2(std::string(tag) + dev.name, b, g), std::move(coeffs), sense, rhs);
                    };
                    if (same_bound) {
                        make_row("fix_", ss.lb, Sense::eq);
                    } else {
                        if (ss.lb.present) make_row("lbnd_", ss.lb, Sense::ge);
                        if (ss.ub.present) make_row("ubnd_", ss.ub, Sense::le);
                    }
                }
        }
    }

    void add_storage_rows() {
        for (std::size_t d = 0; d < spec_.devices.size(); ++d) {
            const DeviceSpec& dev = spec_.devices[d];
            if (dev.kind != DeviceKind::storage) continue;
            const StorageSpec& st = *dev.storage;
            const double lam = 1.0 - st.eta_self * art_.dt;
            if (lam <= 0) throw input_error("storage '" + dev.name + "': self-discharge empties within one step");

            auto charge = connections_into(dev.name);
            auto discharge = connections_out_of(dev.name);

            StorageArtifacts sa;
            sa.device = static_cast<int>(d);

            // net charge coefficients of the Euler step
            auto recursion_terms = [&](int b, int g, std::vector<std::pair<int, double>>& coeffs) {
                for (int c : charge) coeffs.emplace_back(flow(c, b, g), -art_.dt * st.eta_charge);
                for (int c : discharge) coeffs.emplace_back(flow(c, b, g), art_.dt / st.eta_discharge);
            };
            auto cap_row = [&](const std::string& name, std::vector<std::pair<int, double>> coeffs, double extra) {
                // coeffs so far hold the SOC expression; append -cf*D <= 0
                double rhs = extra;
                if (art_.capacity_var[d] >= 0) coeffs.emplace_back(art_.capacity_var[d], -st.capacity_factor);
                else rhs += st.capacity_factor * art_.capacity_fixed[d];
                art_.model.add_row(name, std::move(coeffs), Sense::le, rhs);
            };

            if (art_.kind == FormulationKind::full || art_.kind == FormulationKind::independent) {
                // one cyclic chain per block (full = a single block over N_t)
                sa.soc.resize(static_cast<std::size_t>(nb()) * ns());
                for (int b = 0; b < nb(); ++b)
                    for (int g = 0; g < ns(); ++g)
                        sa.soc[static_cast<std::size_t>(b) * ns() + g] =
                            art_.model.add_var(idx2("SOC_" + dev.name, b, g), 0.0, kInf);
                for (int b = 0; b < nb(); ++b)
                    for (int g = 0; g < ns(); ++g) {
                        int cur = sa.soc[static_cast<std::size_t>(b) * ns() + g];
                        int nxt = sa.soc[static_cast<std::size_t>(b) * ns() + (g + 1) % ns()];
                        std::vector<std::pair<int, double>> coeffs{{nxt, 1.0}, {cur, -lam}};
                        if (nxt == cur) coeffs = {{cur, 1.0 - lam}};  // single-step chain
                        recursion_terms(b, g, coeffs);
                        art_.model.add_row(idx2("soc_" + dev.name, b, g), std::move(coeffs), Sense::eq, 0.0);
                        cap_row(idx2("socbnd_hi_" + dev.name, b, g),
                                {{sa.soc[static_cast<std::size_t>(b) * ns() + g], 1.0}}, 0.0);
                    }
            } else {
                // linked: intra states per typical period plus the inter chain
                const int ni = art_.n_original_periods;
                sa.soc.resize(static_cast<std::size_t>(nb()) * (ns() + 1));
                for (int k = 0; k < nb(); ++k)
                    for (int g = 0; g <= ns(); ++g) {
                        double lb = g == 0 ? 0.0 : -kInf;  // intra starts at zero
                        double ub = g == 0 ? 0.0 : kInf;
                        sa.soc[static_cast<std::size_t>(k) * (ns() + 1) + g] =
                            art_.model.add_var(idx2("SOCi_" + dev.name, k, g), lb, ub);
                    }
                sa.inter.resize(ni);
                for (int i = 0; i < ni; ++i)
                    sa.inter[i] = art_.model.add_var("SOCx_" + dev.name + "_" + std::to_string(i), -kInf, kInf);

                for (int k = 0; k < nb(); ++k)
                    for (int g = 0; g < ns(); ++g) {
                        int cur = sa.soc[static_cast<std::size_t>(k) * (ns() + 1) + g];
                        int nxt = sa.soc[static_cast<std::size_t>(k) * (ns() + 1) + g + 1];
                        std::vector<std::pair<int, double>> coeffs{{nxt, 1.0}, {cur, -lam}};
                        recursion_terms(k, g, coeffs);
                        art_.model.add_row(idx2("soc_" + dev.name, k, g), std::move(coeffs), Sense::eq, 0.0);
                    }

                const double lam_period = std::pow(lam, ns());
                for (int i = 0; i < ni; ++i) {
                    int last = sa.soc[static_cast<std::size_t>(art_.assignment[i]) * (ns() + 1) + ns()];
                    art_.model.add_row("socx_" + dev.name + "_" + std::to_string(i),
                                       {{sa.inter[(i + 1) % ni], 1.0}, {sa.inter[i], -lam_period}, {last, -1.0}},
                                       Sense::eq, 0.0);
                }

                if (!art_.simplified_bounds) {
                    for (int i = 0; i < ni; ++i) {
                        const int k = art_.assignment[i];
                        for (int g = 0; g < ns(); ++g) {
                            double decay = std::pow(lam, g);
                            int intra = sa.soc[static_cast<std::size_t>(k) * (ns() + 1) + g];
                            art_.model.add_row(idx2("socbnd_lo_" + dev.name, i, g),
                                               {{sa.inter[i], decay}, {intra, 1.0}}, Sense::ge, 0.0);
                            cap_row(idx2("socbnd_hi_" + dev.name, i, g), {{sa.inter[i], decay}, {intra, 1.0}}, 0.0);
                        }
                    }
                } else {
                    sa.intra_max.resize(nb());
                    sa.intra_min.resize(nb());
                    for (int k = 0; k < nb(); ++k) {
                        sa.intra_max[k] = art_.model.add_var("SOCmax_" + dev.name + "_" + std::to_string(k), -kInf, kInf);
                        sa.intra_min[k] = art_.model.add_var("SOCmin_" + dev.name + "_" + std::to_string(k), -kInf, kInf);
                        for (int g = 0; g < ns(); ++g) {
                            int intra = sa.soc[static_cast<std::size_t>(k) * (ns() + 1) + g];
                            art_.model.add_row(idx2("socaux_hi_" + dev.name, k, g),
                                               {{intra, 1.0}, {sa.intra_max[k], -1.0}}, Sense::le, 0.0);
                            art_.model.add_row(idx2("socaux_lo_" + dev.name, k, g),
                                               {{intra, 1.0}, {sa.intra_min[k], -1.0}}, Sense::ge, 0.0);
                        }
                    }
                    for (int i = 0; i < ni; ++i) {
                        const int k = art_.assignment[i];
                        cap_row("socbnd_hi_" + dev.name + "_" + std::to_string(i),
                                {{sa.inter[i], 1.0}, {sa.intra_max[k], 1.0}}, 0.0);
                        art_.model.add_row("socbnd_lo_" + dev.name + "_" + std::to_string(i),
                                           {{sa.inter[i], lam_period}, {sa.intra_min[k], 1.0}}, Sense::ge, 0.0);
                    }
                }
            }
            art_.storages.push_back(std::move(sa));
        }
    }

    void add_share_caps() {
        for (const auto& cap : spec_.share_caps) {
            std::vector<std::pair<int, double>> coeffs;
            auto side = [&](const std::string& dev, double sign) {
                auto conns = connections_out_of(dev);
                for (int c : connections_into(dev)) conns.push_back(c);
                for (int c : conns)
                    for (int b = 0; b < nb(); ++b)
                        for (int g = 0; g < ns(); ++g)
                            coeffs.emplace_back(flow(c, b, g), sign * art_.block_weight[b] * art_.dt);
            };
            side(cap.device, 1.0);
            side(cap.reference_device, -cap.share);
            art_.model.add_row("share_" + cap.name, std::move(coeffs), Sense::le, 0.0);
        }
    }
};

}  // namespace

ModelArtifacts build_full_model(const SystemSpec& spec, const ProfileSet& profiles) {
    return Builder(spec, profiles, nullptr, FormulationKind::full, false).build();
}

ModelArtifacts build_independent_model(const SystemSpec& spec, const TypicalPeriodSet& typ,
                                       const ProfileSet& profiles) {
    return Builder(spec, profiles, &typ, FormulationKind::independent, false).build();
}

ModelArtifacts build_linked_model(const SystemSpec& spec, const TypicalPeriodSet& typ, const ProfileSet& profiles,
                                  bool simplified_bounds) {
    return Builder(spec, profiles, &typ, FormulationKind::linked, simplified_bounds).build();
}

double SocTrajectory::max_recursion_residual() const {
    const double lam = 1.0 - eta_self * dt;
    double worst = 0.0;
    for (int i = 0; i < n_periods; ++i) {
        const int k = assignment.empty() ? i : assignment[i];
        for (int g = 0; g < steps; ++g) {
            double cur = soc_at(i, g);
            double net = net_charge[static_cast<std::size_t>(k) * steps + g];
            double next;
            if (g + 1 < steps) {
                next = soc_at(i, g + 1);
            } else if (kind == FormulationKind::independent) {
                next = soc_at(i, 0);  // per-period cyclic condition
            } else {
                next = soc_at((i + 1) % n_periods, 0);
            }
            worst = std::max(worst, std::abs(next - (lam * cur + net)));
        }
    }
    return worst;
}

double SocTrajectory::min_soc() const { return soc.empty() ? 0.0 : *std::min_element(soc.begin(), soc.end()); }
double SocTrajectory::max_soc() const { return soc.empty() ? 0.0 : *std::max_element(soc.begin(), soc.end()); }

std::vector<SocTrajectory> decode_storage_trajectories(const ModelArtifacts& art, const Solution& sol,
                                                       int steps_per_period) {
    if (sol.status != SolveStatus::optimal)
        throw input_error("cannot decode storage trajectories from a non-optimal solution");

    std::vector<SocTrajectory> out;
    for (const auto& sa : art.storages) {
        const DeviceSpec& dev = art.spec.devices[sa.device];
        const StorageSpec& st = *dev.storage;
        SocTrajectory traj;
        traj.device = dev.name;
        traj.kind = art.kind;
        traj.capacity = art.capacity_of(sa.device, sol);
        traj.eta_self = st.eta_self;
        traj.dt = art.dt;

        // net charge per (block, step) from the solved flows
        auto net_at = [&](int b, int g) {
            double net = 0.0;
            for (std::size_t c = 0; c < art.spec.connections.size(); ++c) {
                if (art.spec.connections[c].to == dev.name)
                    net += art.dt * st.eta_charge * sol.values[art.flow_vars[c][static_cast<std::size_t>(b) * art.steps + g]];
                if (art.spec.connections[c].from == dev.name)
                    net -= art.dt / st.eta_discharge * sol.values[art.flow_vars[c][static_cast<std::size_t>(b) * art.steps + g]];
            }
            return net;
        };

        if (art.kind == FormulationKind::full) {
            const int nt = art.steps;
            int ng = steps_per_period > 0 ? steps_per_period : nt;
            if (nt % ng != 0) throw input_error("horizon not divisible by the requested period length");
            traj.n_periods = nt / ng;
            traj.steps = ng;
            traj.assignment.resize(traj.n_periods);
            for (int i = 0; i < traj.n_periods; ++i) traj.assignment[i] = i;
            traj.soc.resize(nt);
            for (int t = 0; t < nt; ++t) traj.soc[t] = sol.values[sa.soc[t]];
            traj.net_charge.resize(nt);
            for (int t = 0; t < nt; ++t) traj.net_charge[t] = net_at(0, t);
            const double lam = 1.0 - st.eta_self * art.dt;
            traj.inter.resize(traj.n_periods);
            traj.intra.resize(traj.soc.size());
            for (int i = 0; i < traj.n_periods; ++i) {
                traj.inter[i] = traj.soc_at(i, 0);
                double decay = 1.0;
                for (int g = 0; g < ng; ++g) {
                    traj.intra[static_cast<std::size_t>(i) * ng + g] = traj.soc_at(i, g) - decay * traj.inter[i];
                    decay *= lam;
                }
            }
        } else if (art.kind == FormulationKind::independent) {
            traj.n_periods = art.n_original_periods;
            traj.steps = art.steps;
            traj.assignment = art.assignment;
            traj.intra.resize(static_cast<std::size_t>(art.n_blocks) * art.steps);
            traj.net_charge.resize(traj.intra.size());
            for (int k = 0; k < art.n_blocks; ++k)
                for (int g = 0; g < art.steps; ++g) {
                    traj.intra[static_cast<std::size_t>(k) * art.steps + g] =
                        sol.values[sa.soc[static_cast<std::size_t>(k) * art.steps + g]];
                    traj.net_charge[static_cast<std::size_t>(k) * art.steps + g] = net_at(k, g);
                }
            traj.inter.assign(traj.n_periods, 0.0);
            traj.soc.resize(static_cast<std::size_t>(traj.n_periods) * traj.steps);
            for (int i = 0; i < traj.n_periods; ++i)
                for (int g = 0; g < traj.steps; ++g)
                    traj.soc[static_cast<std::size_t>(i) * traj.steps + g] =
                        traj.intra[static_cast<std::size_t>(art.assignment[i]) * traj.steps + g];
        } else {
            traj.n_periods = art.n_original_periods;
            traj.steps = art.steps;
            traj.assignment = art.assignment;
            traj.inter.resize(traj.n_periods);
            for (int i = 0; i < traj.n_periods; ++i) traj.inter[i] = sol.values[sa.inter[i]];
            traj.intra.resize(static_cast<std::size_t>(art.n_blocks) * art.steps);
            traj.net_charge.resize(traj.intra.size());
            for (int k = 0; k < art.n_blocks; ++k)
                for (int g = 0; g < art.steps; ++g) {
                    traj.intra[static_cast<std::size_t>(k) * art.steps + g] =
                        sol.values[sa.soc[static_cast<std::size_t>(k) * (art.steps + 1) + g]];
                    traj.net_charge[static_cast<std::size_t>(k) * art.steps + g] = net_at(k, g);
                }
            const double lam = 1.0 - st.eta_self * art.dt;
            traj.soc.resize(static_cast<std::size_t>(traj.n_periods) * traj.steps);
            for (int i = 0; i < traj.n_periods; ++i) {
                const int k = art.assignment[i];
                double decay = 1.0;
                for (int g = 0; g < traj.steps; ++g) {
                    traj.soc[static_cast<std::size_t>(i) * traj.steps + g] =
                        traj.inter[i] * decay + traj.intra[static_cast<std::size_t>(k) * traj.steps + g];
                    decay *= lam;
                }
            }
        }
        out.push_back(std::move(traj));
    }
    return out;
}

double charge_discharge_overlap(const ModelArtifacts& art, const Solution& sol) {
    double worst = 0.0;
    for (const auto& sa : art.storages) {
        const std::string& name = art.spec.devices[sa.device].name;
        for (int b = 0; b < art.n_blocks; ++b)
            for (int g = 0; g < art.steps; ++g) {
                double in = 0, out = 0;
                for (std::size_t c = 0; c < art.spec.connections.size(); ++c) {
                    double v = sol.values[art.flow_vars[c][static_cast<std::size_t>(b) * art.steps + g]];
                    if (art.spec.connections[c].to == name) in += v;
                    if (art.spec.connections[c].from == name) out += v;
                }
                worst = std::max(worst, std::min(in, out));
            }
    }
    return worst;
}

}  // namespace tpes
