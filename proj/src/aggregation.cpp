#include "tpes/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <nlohmann/json.hpp>

#include "tpes/error.hpp"

namespace tpes {

ClusterMode parse_cluster_mode(const std::string& s) {
    if (s == "exact") return ClusterMode::exact;
    if (s == "pam") return ClusterMode::pam;
    throw input_error("unknown cluster mode '" + s + "' (expected exact or pam)");
}

CandidateMatrix build_candidates(const ProfileSet& normalized, int steps_per_period) {
    if (normalized.profiles.empty()) throw input_error("cannot build candidates from an empty profile set");
    CandidateMatrix cm;
    cm.steps_per_period = steps_per_period;
    const std::size_t n_t = normalized.length();
    if (steps_per_period <= 0 || n_t % static_cast<std::size_t>(steps_per_period) != 0)
        throw input_error("horizon length " + std::to_string(n_t) + " not divisible by period length " +
                          std::to_string(steps_per_period));
    cm.n_rows = static_cast<int>(n_t / steps_per_period);
    cm.dim = static_cast<int>(normalized.profiles.size()) * steps_per_period;
    for (const auto& p : normalized.profiles) cm.attribute_names.push_back(p.name);
    cm.data.resize(static_cast<std::size_t>(cm.n_rows) * cm.dim);
    for (int i = 0; i < cm.n_rows; ++i) {
        double* out = cm.data.data() + static_cast<std::size_t>(i) * cm.dim;
        for (std::size_t a = 0; a < normalized.profiles.size(); ++a) {
            const double* src = normalized.profiles[a].values.data() + static_cast<std::size_t>(i) * steps_per_period;
            std::memcpy(out + a * steps_per_period, src, sizeof(double) * steps_per_period);
        }
    }
    return cm;
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
    double s = 0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

// full pairwise squared-distance matrix
std::vector<double> distance_matrix(const CandidateMatrix& c) {
    const int n = c.n_rows;
    std::vector<double> dm(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = sq_dist(c.row(i), c.row(j), c.dim);
            dm[static_cast<std::size_t>(i) * n + j] = d;
            dm[static_cast<std::size_t>(j) * n + i] = d;
        }
    return dm;
}

double subset_cost(const std::vector<double>& dm, int n, const std::vector<int>& medoids) {
    double total = 0;
    for (int j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int m : medoids) best = std::min(best, dm[static_cast<std::size_t>(j) * n + m]);
        total += best;
    }
    return total;
}

std::vector<int> exact_medoids(const std::vector<double>& dm, int n, int k) {
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    std::vector<int> best = pick;
    double best_cost = subset_cost(dm, n, pick);
    // lexicographic enumeration of all C(n,k) subsets
    while (true) {
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        double cost = subset_cost(dm, n, pick);
        if (cost < best_cost - 1e-15) {
            best_cost = cost;
            best = pick;
        }
    }
    return best;
}

// SWAP phase: best improving (medoid, candidate) swap per pass, scanned in
// index order so results are reproducible.
void pam_swap(const std::vector<double>& dm, int n, int k, std::vector<int>& medoids) {
    auto D = [&](int a, int b) { return dm[static_cast<std::size_t>(a) * n + b]; };
    std::vector<bool> is_medoid(n, false);
    for (int m : medoids) is_medoid[m] = true;

    auto recompute_near = [&](std::vector<double>& near1, std::vector<double>& near2, std::vector<int>& who1) {
        for (int j = 0; j < n; ++j) {
            double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
            int w1 = -1;
            for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
                double d = D(j, medoids[mi]);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    w1 = static_cast<int>(mi);
                } else if (d < d2) {
                    d2 = d;
                }
            }
            near1[j] = d1;
            near2[j] = d2;
            who1[j] = w1;
        }
    };
    std::vector<double> near1(n), near2(n);
    std::vector<int> who1(n);
    recompute_near(near1, near2, who1);
    bool improved = true;
    while (improved) {
        improved = false;
        double best_delta = -1e-12;
        int best_mi = -1, best_h = -1;
        for (int mi = 0; mi < k; ++mi) {
            for (int h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                double delta = 0;
                for (int j = 0; j < n; ++j) {
                    double dh = D(j, h);
                    double nd = (who1[j] == mi) ? std::min(near2[j], dh) : std::min(near1[j], dh);
                    delta += nd - near1[j];
                }
                if (delta < best_delta - 1e-15) {
                    best_delta = delta;
                    best_mi = mi;
                    best_h = h;
                }
            }
        }
        if (best_mi >= 0) {
            is_medoid[medoids[best_mi]] = false;
            medoids[best_mi] = best_h;
            is_medoid[best_h] = true;
            recompute_near(near1, near2, who1);
            improved = true;
        }
    }
}

std::vector<int> pam_medoids(const std::vector<double>& dm, int n, int k) {
    auto D = [&](int a, int b) { return dm[static_cast<std::size_t>(a) * n + b]; };

    int most_central = 0;
    {
        double best_sum = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += D(i, j);
            if (s < best_sum - 1e-15) {
                best_sum = s;
                most_central = i;
            }
        }
    }

    // BUILD: greedy largest cost reduction, ties to the lowest index
    std::vector<int> build{most_central};
    {
        std::vector<bool> is_medoid(n, false);
        is_medoid[most_central] = true;
        std::vector<double> nearest(n);
        for (int j = 0; j < n; ++j) nearest[j] = D(j, most_central);
        while (static_cast<int>(build.size()) < k) {
            int best_c = -1;
            double best_gain = -1;
            for (int c = 0; c < n; ++c) {
                if (is_medoid[c]) continue;
                double gain = 0;
                for (int j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - D(j, c));
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            build.push_back(best_c);
            is_medoid[best_c] = true;
            for (int j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], D(j, best_c));
        }
    }
    if (k == n) return build;

    // second deterministic seeding: farthest-first from the central point;
    // a single greedy start occasionally lands in a poor local optimum
    std::vector<int> spread{most_central};
    {
        std::vector<bool> is_medoid(n, false);
        is_medoid[most_central] = true;
        std::vector<double> nearest(n);
        for (int j = 0; j < n; ++j) nearest[j] = D(j, most_central);
        while (static_cast<int>(spread.size()) < k) {
            int far = -1;
            double far_d = -1;
            for (int c = 0; c < n; ++c) {
                if (is_medoid[c]) continue;
                if (nearest[c] > far_d + 1e-15) {
                    far_d = nearest[c];
                    far = c;
                }
            }
            spread.push_back(far);
            is_medoid[far] = true;
            for (int j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], D(j, far));
        }
    }

    pam_swap(dm, n, k, build);
    pam_swap(dm, n, k, spread);
    double cost_build = 0, cost_spread = 0;
    for (int j = 0; j < n; ++j) {
        double b = std::numeric_limits<double>::infinity(), s = b;
        for (int m : build) b = std::min(b, D(j, m));
        for (int m : spread) s = std::min(s, D(j, m));
        cost_build += b;
        cost_spread += s;
    }
    return cost_spread < cost_build - 1e-12 ? spread : build;
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> assign_to_medoids(const CandidateMatrix& candidates,
                                                                const std::vector<double>& medoids,
                                                                int n_medoids) {
    if (n_medoids <= 0) throw input_error("need at least one medoid");
    if (medoids.size() != static_cast<std::size_t>(n_medoids) * candidates.dim)
        throw input_error("medoid matrix dimension mismatch");
    std::vector<int> assignment(candidates.n_rows);
    std::vector<int> card(n_medoids, 0);
    for (int i = 0; i < candidates.n_rows; ++i) {
        int best_k = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_medoids; ++k) {
            double d = sq_dist(candidates.row(i), medoids.data() + static_cast<std::size_t>(k) * candidates.dim,
                               candidates.dim);
            if (d < best_d) {  // strict: ties stay at the lowest k
                best_d = d;
                best_k = k;
            }
        }
        assignment[i] = best_k;
        ++card[best_k];
    }
    return {std::move(assignment), std::move(card)};
}

TypicalPeriodSet cluster_kmedoids(const CandidateMatrix& candidates, int n_clusters, ClusterMode mode) {
    const int n = candidates.n_rows;
    if (n_clusters < 1 || n_clusters > n)
        throw input_error("n_clusters " + std::to_string(n_clusters) + " out of range [1," + std::to_string(n) + "]");
    if (mode == ClusterMode::exact && n > 20)
        throw input_error("exact k-medoids is limited to 20 candidate periods, got " + std::to_string(n));

    std::vector<double> dm = distance_matrix(candidates);
    std::vector<int> medoid_rows =
        mode == ClusterMode::exact ? exact_medoids(dm, n, n_clusters) : pam_medoids(dm, n, n_clusters);
    // stable cluster order: by original candidate index
    std::sort(medoid_rows.begin(), medoid_rows.end());

    TypicalPeriodSet set;
    set.n_typical = n_clusters;
    set.dim = candidates.dim;
    set.steps_per_period = candidates.steps_per_period;
    set.attribute_names = candidates.attribute_names;
    set.medoid_source_indices = medoid_rows;
    set.medoids.resize(static_cast<std::size_t>(n_clusters) * candidates.dim);
    for (int k = 0; k < n_clusters; ++k)
        std::memcpy(set.medoids.data() + static_cast<std::size_t>(k) * candidates.dim, candidates.row(medoid_rows[k]),
                    sizeof(double) * candidates.dim);
    auto [assignment, card] = assign_to_medoids(candidates, set.medoids, n_clusters);
    set.assignment = std::move(assignment);
    set.cardinalities = std::move(card);
    return set;
}

double total_within_cluster_distance(const CandidateMatrix& candidates, const TypicalPeriodSet& set) {
    double total = 0;
    for (int i = 0; i < candidates.n_rows; ++i)
        total += sq_dist(candidates.row(i), set.medoid(set.assignment[i]), candidates.dim);
    return total;
}

double representation_error(const CandidateMatrix& candidates, const TypicalPeriodSet& set) {
    if (candidates.dim != set.dim || candidates.n_rows != set.n_candidates())
        throw input_error("candidate/typical-set dimension mismatch");
    double total = total_within_cluster_distance(candidates, set);
    return std::sqrt(total / (static_cast<double>(candidates.n_rows) * candidates.dim));
}

std::map<std::string, PeriodMatrix> medoid_profiles(const ProfileSet& raw, const TypicalPeriodSet& set) {
    std::map<std::string, PeriodMatrix> out;
    const int ng = set.steps_per_period;
    for (const auto& name : set.attribute_names) {
        const Profile& p = raw.require(name);
        if (p.length() < static_cast<std::size_t>(set.n_candidates()) * ng)
            throw input_error("profile '" + name + "' shorter than the aggregated horizon");
        PeriodMatrix m;
        m.n_periods = set.n_typical;
        m.steps_per_period = ng;
        m.data.resize(static_cast<std::size_t>(set.n_typical) * ng);
        for (int k = 0; k < set.n_typical; ++k) {
            const double* src = p.values.data() + static_cast<std::size_t>(set.medoid_source_indices[k]) * ng;
            std::copy(src, src + ng, m.data.begin() + static_cast<std::size_t>(k) * ng);
        }
        out.emplace(name, std::move(m));
    }
    return out;
}

std::string typical_set_to_json(const TypicalPeriodSet& set, const ProfileSet& raw) {
    nlohmann::json j;
    j["n_typical"] = set.n_typical;
    j["n_candidates"] = set.n_candidates();
    j["steps_per_period"] = set.steps_per_period;
    j["attributes"] = set.attribute_names;
    j["assignment"] = set.assignment;
    j["cardinalities"] = set.cardinalities;
    j["medoid_source_indices"] = set.medoid_source_indices;
    nlohmann::json med = nlohmann::json::object();
    for (auto& [name, m] : medoid_profiles(raw, set)) {
        nlohmann::json rows = nlohmann::json::array();
        for (int k = 0; k < m.n_periods; ++k)
            rows.push_back(std::vector<double>(m.row(k), m.row(k) + m.steps_per_period));
        med[name] = rows;
    }
    j["medoids"] = med;
    return j.dump(2) + "\n";
}

}  // namespace tpes
