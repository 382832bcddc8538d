#ifndef TPES_AGGREGATION_HPP
#define TPES_AGGREGATION_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tpes/timeseries.hpp"

namespace tpes {

// Candidate periods as feature vectors: row i is the concatenation of all
// normalized attribute sub-profiles of period i, so dim = n_attributes * N_g.
struct CandidateMatrix {
    int n_rows = 0;
    int dim = 0;
    int steps_per_period = 0;
    std::vector<std::string> attribute_names;
    std::vector<double> data;  // n_rows * dim, row-major

    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
};

struct TypicalPeriodSet {
    int n_typical = 0;
    int dim = 0;
    int steps_per_period = 0;
    std::vector<std::string> attribute_names;
    std::vector<double> medoids;             // n_typical * dim, bit-exact copies of candidate rows
    std::vector<int> medoid_source_indices;  // original candidate index of each medoid
    std::vector<int> assignment;             // candidate i -> cluster index, 0-based
    std::vector<int> cardinalities;          // per cluster

    int n_candidates() const { return static_cast<int>(assignment.size()); }
    const double* medoid(int k) const { return medoids.data() + static_cast<std::size_t>(k) * dim; }
};

enum class ClusterMode { exact, pam };

ClusterMode parse_cluster_mode(const std::string& s);

// Concatenate the normalized attributes of each candidate period into one row.
CandidateMatrix build_candidates(const ProfileSet& normalized, int steps_per_period);

// k-medoids. `exact` enumerates all medoid subsets (N_i <= 20), `pam` is a
// deterministic greedy BUILD followed by best-improvement SWAP passes.
TypicalPeriodSet cluster_kmedoids(const CandidateMatrix& candidates, int n_clusters, ClusterMode mode);

// Nearest-medoid assignment under squared Euclidean distance, ties to the
// lowest cluster index. medoids holds n_medoids rows of candidates.dim values.
std::pair<std::vector<int>, std::vector<int>> assign_to_medoids(const CandidateMatrix& candidates,
                                                                const std::vector<double>& medoids,
                                                                int n_medoids);

double total_within_cluster_distance(const CandidateMatrix& candidates, const TypicalPeriodSet& set);

// RMS deviation between candidates and their representing medoids over all
// N_i * dim entries.
double representation_error(const CandidateMatrix& candidates, const TypicalPeriodSet& set);

// Per-attribute medoid periods in original units, sliced from the raw
// profiles at the medoid source periods (exact, no denormalization noise).
std::map<std::string, PeriodMatrix> medoid_profiles(const ProfileSet& raw, const TypicalPeriodSet& set);

// JSON document with denormalized medoid matrices, assignment, cardinalities
// and source indices. assignment/cluster indices are 0-based.
std::string typical_set_to_json(const TypicalPeriodSet& set, const ProfileSet& raw);

}  // namespace tpes

#endif
