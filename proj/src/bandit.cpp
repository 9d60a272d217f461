#include "mctsi/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mctsi/parallel.hpp"
#include "mctsi/rng.hpp"

namespace mctsi {

namespace {

constexpr double kLog2e = 1.4426950408889634;

void validate_config(const BanditConfig& cfg) {
    const long long edges = static_cast<long long>(cfg.model.tree().edges().size());
    if (edges < 1) throw PreconditionError("model has no edges to identify");
    if (cfg.total_budget < edges) {
        throw PreconditionError("budget must be at least one pull per edge");
    }
    if (cfg.total_budget % edges != 0) {
        throw PreconditionError("budget must be a multiple of the edge count");
    }
}

// Draws one full vector by ancestral sampling into `row`.
void draw_vector(const MctModel& model, Rng& rng, std::vector<int>& row) {
    for (int v : model.bfs_order()) {
        if (v == model.root()) {
            row[static_cast<std::size_t>(v) - 1] = rng.next_categorical(model.root_pmf());
        } else {
            const Kernel& k = model.kernel(v);
            const int pv = row[static_cast<std::size_t>(model.parent(v)) - 1];
            row[static_cast<std::size_t>(v) - 1] = rng.next_categorical(
                {&k.v[static_cast<std::size_t>(pv) * k.cols], static_cast<std::size_t>(k.cols)});
        }
    }
}

}  // namespace

GapProfile gap_profile(const MctModel& model) {
    GapProfile p;
    p.true_edge_mi = edge_mutual_informations(model);
    if (p.true_edge_mi.empty()) {
        throw PreconditionError("model has no edges to identify");
    }
    p.best_edge = p.true_edge_mi.front().first;
    p.best_mi = p.true_edge_mi.front().second;
    for (const auto& [edge, mi] : p.true_edge_mi) {
        if (mi < p.best_mi) {
            p.best_mi = mi;
            p.best_edge = edge;
        }
    }
    double second = std::numeric_limits<double>::infinity();
    for (const auto& [edge, mi] : p.true_edge_mi) {
        if (edge != p.best_edge && mi < second) second = mi;
    }
    p.delta_1 = second - p.best_mi;
    p.unique_min = p.delta_1 > 1e-12;
    p.delta_per_edge.reserve(p.true_edge_mi.size());
    for (const auto& [edge, mi] : p.true_edge_mi) {
        p.delta_per_edge.push_back(mi - p.best_mi);
    }
    return p;
}

TrialOutcome run_trial(const BanditConfig& cfg, long long trial_id) {
    validate_config(cfg);
    const auto& edges = cfg.model.tree().edges();
    const long long edge_count = static_cast<long long>(edges.size());
    const long long n = cfg.total_budget / edge_count;
    const int m = cfg.model.vertex_count();

    std::vector<TypeCounts> counts(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
        counts[b].card_x = cfg.model.card(edges[b].first);
        counts[b].card_y = cfg.model.card(edges[b].second);
        counts[b].n = n;
        counts[b].joint.assign(
            static_cast<std::size_t>(counts[b].card_x) * counts[b].card_y, 0);
    }

    std::vector<int> row(static_cast<std::size_t>(m), 0);
    const std::uint64_t trial_seed = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(trial_id));
    if (cfg.sampling == SamplingMode::kBlocks) {
        Rng rng(trial_seed);
        for (std::size_t b = 0; b < edges.size(); ++b) {
            TypeCounts& t = counts[b];
            const int ex = edges[b].first - 1;
            const int ey = edges[b].second - 1;
            for (long long s = 0; s < n; ++s) {
                draw_vector(cfg.model, rng, row);
                ++t.joint[static_cast<std::size_t>(row[ex]) * t.card_y + row[ey]];
            }
        }
    } else {
        for (std::size_t b = 0; b < edges.size(); ++b) {
            Rng rng(Rng::derive(trial_seed, static_cast<std::uint64_t>(b)));
            TypeCounts& t = counts[b];
            const int ex = edges[b].first - 1;
            const int ey = edges[b].second - 1;
            for (long long s = 0; s < n; ++s) {
                draw_vector(cfg.model, rng, row);
                ++t.joint[static_cast<std::size_t>(row[ex]) * t.card_y + row[ey]];
            }
        }
    }

    TrialOutcome out;
    out.emi_per_edge.reserve(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
        out.emi_per_edge.emplace_back(edges[b], empirical_mi(counts[b]));
    }
    out.chosen_edge = out.emi_per_edge.front().first;
    double best = out.emi_per_edge.front().second;
    for (const auto& [edge, emi] : out.emi_per_edge) {
        if (emi < best) {
            best = emi;
            out.chosen_edge = edge;
        }
    }
    out.si_estimate = best;

    const GapProfile profile = gap_profile(cfg.model);
    if (profile.unique_min) {
        out.correct = out.chosen_edge == profile.best_edge;
    } else {
        double chosen_true_mi = 0.0;
        for (const auto& [edge, mi] : profile.true_edge_mi) {
            if (edge == out.chosen_edge) chosen_true_mi = mi;
        }
        out.correct = chosen_true_mi <= profile.best_mi + 1e-12;
    }
    return out;
}

std::vector<TrialOutcome> run_trials(const BanditConfig& cfg, int threads) {
    validate_config(cfg);
    if (cfg.trials < 1) throw PreconditionError("need at least one trial");
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    parallel_for(0, cfg.trials, threads, [&](long long i) {
        outcomes[static_cast<std::size_t>(i)] = run_trial(cfg, i);
    });
    return outcomes;
}

WilsonInterval wilson_interval(long long errors, long long trials, double z) {
    if (trials < 1) throw PreconditionError("interval needs at least one trial");
    if (errors < 0 || errors > trials) throw PreconditionError("error count out of range");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        (z / denom) * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    WilsonInterval w;
    w.low = std::max(0.0, center - half);
    w.high = std::min(1.0, center + half);
    return w;
}

McErrorReport summarize_trials(const BanditConfig& cfg,
                               const std::vector<TrialOutcome>& outcomes) {
    if (outcomes.empty()) throw PreconditionError("need at least one trial outcome");
    McErrorReport rep;
    rep.trials = static_cast<long long>(outcomes.size());
    rep.si_true = si_mct(cfg.model).value_bits;
    NeumaierSum abs_err;
    for (const TrialOutcome& o : outcomes) {
        if (!o.correct) ++rep.errors;
        abs_err.add(std::abs(o.si_estimate - rep.si_true));
    }
    rep.error_rate = static_cast<double>(rep.errors) / static_cast<double>(rep.trials);
    rep.interval = wilson_interval(rep.errors, rep.trials);
    rep.mean_abs_si_error = abs_err.value() / static_cast<double>(rep.trials);
    return rep;
}

McErrorReport monte_carlo_error_rate(const BanditConfig& cfg, int threads) {
    return summarize_trials(cfg, run_trials(cfg, threads));
}

IdentificationBound error_probability_bound(const GapProfile& profile, long long total_budget,
                                            int card, int edge_count) {
    return error_probability_bound(profile.delta_1, total_budget, card, edge_count);
}

IdentificationBound error_probability_bound(double delta_1, long long total_budget, int card,
                                            int edge_count) {
    if (!(delta_1 > 0.0)) {
        throw PreconditionError("identification bound needs a unique minimizing edge");
    }
    if (edge_count < 1) throw PreconditionError("edge count must be positive");
    if (card < 2) throw PreconditionError("alphabet size must be at least 2");
    const double d1 = delta_1;
    const double e = static_cast<double>(edge_count);

    IdentificationBound out;
    const double t1 = (static_cast<double>(card) * card - 1.0) / (std::exp2(d1 / 3.0) - 1.0);
    const double t2 = (card - 1.0) / (std::exp2(d1 / 6.0) - 1.0);
    out.threshold = e * std::max(t1, t2);
    out.valid = static_cast<double>(total_budget) > out.threshold;

    const double n = static_cast<double>(total_budget) / e;
    if (n < 2.0) {
        throw PreconditionError("budget too small to evaluate the bound (n < 2)");
    }
    const double l = std::log(n) * kLog2e;
    const double raw = 2.0 * e * std::exp(-n * d1 * d1 / (648.0 * l * l));
    out.bound.raw = raw;
    out.bound.vacuous = raw >= 1.0;
    out.bound.value = out.bound.vacuous ? 1.0 : (raw < 0.0 ? 0.0 : raw);
    return out;
}

long long sample_complexity(double epsilon, double delta, double delta_1, int edge_count,
                            int card) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw PreconditionError("epsilon must lie in (0, 1/2)");
    }
    if (!(delta > 0.0 && delta < std::exp(-1.0))) {
        throw PreconditionError("delta must lie in (0, 1/e)");
    }
    if (!(delta_1 > 0.0) || !std::isfinite(delta_1)) {
        throw PreconditionError("gap must be positive and finite");
    }
    if (edge_count < 1) throw PreconditionError("edge count must be positive");
    if (card < 2) throw PreconditionError("alphabet size must be at least 2");

    auto log2d = [](double x) { return std::log(x) * kLog2e; };
    const double e = static_cast<double>(edge_count);
    const double t_alphabet = static_cast<double>(card) / epsilon;
    const double big_l = std::log(1.0 / delta) / (epsilon * epsilon);
    const double t_eps = big_l * log2d(big_l) * log2d(big_l);
    const double big_g = std::log(e / delta) / (delta_1 * delta_1);
    const double t_gap_log = big_g * log2d(big_g);
    const double t_gap_log2 = big_g * log2d(big_g) * log2d(big_g);
    const double raw = e * (t_alphabet + t_eps + t_gap_log + t_gap_log2);
    return static_cast<long long>(std::ceil(raw));
}

}  // namespace mctsi
