#ifndef MCTSI_SHARED_INFO_HPP
#define MCTSI_SHARED_INFO_HPP

#include <optional>
#include <utility>
#include <vector>

#include "mctsi/mct.hpp"
#include "mctsi/prob.hpp"
#include "mctsi/tree.hpp"

namespace mctsi {

// I(pi) = [sum_u H(X_{pi_u}) - H(X_M)] / (k - 1), equivalently the divergence
// from the product of atom marginals normalized by k - 1.
struct PartitionScore {
    Partition partition;
    int k = 0;
    double score_bits = 0.0;
};

enum class SiMethod { kBruteForce, kMctClosedForm };

struct SiResult {
    double value_bits = 0.0;
    SiMethod method = SiMethod::kBruteForce;
    std::optional<Partition> argmin_partition;  // brute force
    std::optional<Edge> argmin_edge;            // closed form
};

// Score of a single partition (k >= 2) against the dense joint.
PartitionScore partition_score(const JointPmf& p, const Partition& part);

// Minimum partition score over every partition with 2 <= k <= m, in
// enumeration order with ties kept at the earliest partition. A sampled 1%
// of partitions is cross-checked against the divergence form.
SiResult si_brute_force(const JointPmf& p, int guard = PartitionEnumerator::kDefaultGuard);

// Closed form for tree models: minimum pairwise mutual information over
// edges, from exact edge marginals; lexicographic edge tie-break.
SiResult si_mct(const MctModel& model);

// Exact I(X_i ; X_j) per edge, in lexicographic edge order.
std::vector<std::pair<Edge, double>> edge_mutual_informations(const MctModel& model);

// C = sum_i H(X_i) - H(X_M).
double total_correlation(const JointPmf& p);

// D = sum_i H(X_{M \ i}) - (m - 1) H(X_M).
double dual_total_correlation(const JointPmf& p);

// Checks C/(m-1) <= D <= (m-1) C and SI <= C/(m-1), SI <= D.
struct SandwichReport {
    double si = 0.0;
    double total_corr = 0.0;
    double dual_total_corr = 0.0;
    double slack = 0.0;
    bool pass = true;
};
SandwichReport sandwich_check(const JointPmf& p, double slack = 1e-10,
                              int guard = PartitionEnumerator::kDefaultGuard);

// One improvement step toward a partition with connected atoms: for the
// first disconnected atom (canonical order), evaluates the merge candidate
// (atom joined with the neighbor atom across the chosen component's boundary
// vertex) and the split candidate (component separated out), and returns the
// better one. For a joint that is Markov on the tree the returned score
// never exceeds the input score. A fully connected partition is returned
// unchanged with changed = false.
struct RepairStep {
    Partition partition;
    double score_before = 0.0;
    double score_after = 0.0;
    bool changed = false;
};
RepairStep partition_repair_step(const JointPmf& p, const Partition& part, const Tree& tree);

}  // namespace mctsi

#endif
