#ifndef MCTSI_BANDIT_HPP
#define MCTSI_BANDIT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "mctsi/emi.hpp"
#include "mctsi/mct.hpp"
#include "mctsi/shared_info.hpp"
#include "mctsi/tree.hpp"

namespace mctsi {

enum class SamplingMode {
    // N full vectors split into |E| consecutive blocks, one per edge in
    // lexicographic order; blocks use disjoint time instants.
    kBlocks,
    // Independent stream of n vectors per edge; distributionally identical.
    kPerEdge,
};

struct BanditConfig {
    MctModel model;
    long long total_budget = 0;  // N; must be a positive multiple of |E|
    long long trials = 0;
    std::uint64_t master_seed = 0;
    SamplingMode sampling = SamplingMode::kBlocks;
};

// True per-edge mutual informations and the identification gaps.
struct GapProfile {
    std::vector<std::pair<Edge, double>> true_edge_mi;  // lexicographic order
    Edge best_edge{0, 0};
    double best_mi = 0.0;
    // Gap of each edge against the best; aligned with true_edge_mi.
    std::vector<double> delta_per_edge;
    // Second-lowest MI minus lowest; +infinity when there is a single edge.
    double delta_1 = 0.0;
    bool unique_min = true;
};

GapProfile gap_profile(const MctModel& model);

struct TrialOutcome {
    std::vector<std::pair<Edge, double>> emi_per_edge;  // lexicographic order
    Edge chosen_edge{0, 0};
    double si_estimate = 0.0;
    bool correct = false;
};

// One uniform-sampling identification trial with its own RNG stream derived
// from (master_seed, trial_id). The chosen edge is the lexicographically
// smallest EMI minimizer; ties count as errors unless the true minimum is
// itself non-unique, in which case any edge attaining it (within 1e-12)
// counts as correct.
TrialOutcome run_trial(const BanditConfig& cfg, long long trial_id);

// All trials, outcome i computed from stream (master_seed, i); deterministic
// for any thread count.
std::vector<TrialOutcome> run_trials(const BanditConfig& cfg, int threads = 0);

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};
// 95% score interval by default.
WilsonInterval wilson_interval(long long errors, long long trials,
                               double z = 1.959963984540054);

struct McErrorReport {
    long long trials = 0;
    long long errors = 0;
    double error_rate = 0.0;
    WilsonInterval interval;
    double mean_abs_si_error = 0.0;
    double si_true = 0.0;
};

McErrorReport summarize_trials(const BanditConfig& cfg, const std::vector<TrialOutcome>& outcomes);
McErrorReport monte_carlo_error_rate(const BanditConfig& cfg, int threads = 0);

// 2|E| exp(-(N/|E|) delta_1^2 / (648 log2(N/|E|)^2)) with the validity
// threshold N > |E| max{(card^2-1)/(2^(d/3)-1), (card-1)/(2^(d/6)-1)}.
struct IdentificationBound {
    BoundValue bound;
    bool valid = false;       // N strictly exceeds the threshold
    double threshold = 0.0;   // on N
};

IdentificationBound error_probability_bound(const GapProfile& profile, long long total_budget,
                                            int card, int edge_count);
IdentificationBound error_probability_bound(double delta_1, long long total_budget, int card,
                                            int edge_count);

// Ceiling of |E| [ card/eps + L log2^2 L + G log2 G + G log2^2 G ] with
// L = ln(1/delta)/eps^2 and G = ln(edge_count/delta)/delta_1^2; an
// order-level guide (constants dropped), natural ln and base-2 log.
long long sample_complexity(double epsilon, double delta, double delta_1, int edge_count,
                            int card);

}  // namespace mctsi

#endif
