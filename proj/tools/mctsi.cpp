// Command-line front end: model I/O, exact shared-information values,
// Markov-property verification suites, sampling, estimation experiments,
// and closed-form bound tables.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mctsi/bandit.hpp"
#include "mctsi/emi.hpp"
#include "mctsi/errors.hpp"
#include "mctsi/mct.hpp"
#include "mctsi/model_io.hpp"
#include "mctsi/prob.hpp"
#include "mctsi/report_io.hpp"
#include "mctsi/shared_info.hpp"
#include "mctsi/tree.hpp"

namespace {

using nlohmann::json;
using namespace mctsi;

// Seed of the built-in demo experiment; chosen so the demo exhibits at least
// one misidentification at the smallest budget and none at the largest.
constexpr std::uint64_t kDemoSeed = 413;

struct GlobalOpts {
    bool json = false;
    std::uint64_t seed = 1;
    int threads = 0;
    double tol = 1e-9;
    std::string command;  // argv joined, for manifests
};

// ---------------------------------------------------------------------------
// Small formatting / parsing helpers

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

long long to_ll(const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("'" + s + "' is not an integer");
    }
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("'" + s + "' is not a number");
    }
}

std::vector<long long> ll_list(const std::string& s) {
    std::vector<long long> out;
    for (const std::string& part : split(s, ',')) out.push_back(to_ll(part));
    return out;
}

std::vector<double> d_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : split(s, ',')) out.push_back(to_double(part));
    return out;
}

std::string edge_str(const Edge& e) {
    return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

std::string edge_label(const Edge& e) {
    return std::to_string(e.first) + "-" + std::to_string(e.second);
}

std::string set_str(const VertexSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s.members[i]);
    }
    return out + "}";
}

std::string partition_str(const Partition& p) {
    std::string out;
    for (std::size_t i = 0; i < p.atoms.size(); ++i) {
        if (i) out += "|";
        out += set_str(p.atoms[i]);
    }
    return out;
}

json partition_json(const Partition& p) {
    json out = json::array();
    for (const VertexSet& a : p.atoms) out.push_back(a.members);
    return out;
}

// ---------------------------------------------------------------------------
// Model argument resolution: a JSON file path or a built-in fixture.
//   example2                 balanced binary tree, l=2, p=(0.1,0.2)
//   example2:L:p1,p2,...     balanced binary tree with explicit parameters
//   chain                    3-vertex chain, p=(0.1,0.2)
//   chain:p1,p2,...          chain with explicit flip probabilities
//   counterexample           locally-but-not-globally Markov pmf on a path

struct ModelInput {
    std::optional<MctModel> model;
    std::optional<PmfOnTree> raw;
    std::string label;

    const Tree& tree() const { return model ? model->tree() : raw->tree; }
    JointPmf joint() const { return model ? joint_pmf(*model) : raw->pmf; }
    const MctModel& require_model(const std::string& what) const {
        if (!model) {
            throw PreconditionError(what + " needs a factorized model; the '" + label +
                                    "' fixture is a raw pmf");
        }
        return *model;
    }
};

ModelInput resolve_model_arg(const std::string& arg) {
    if (arg == "counterexample") {
        return ModelInput{std::nullopt, local_not_global_counterexample(), arg};
    }
    if (arg == "example2") {
        return ModelInput{example_binary_tree(2, {0.1, 0.2}), std::nullopt, arg};
    }
    if (arg.rfind("example2:", 0) == 0) {
        const auto parts = split(arg.substr(9), ':');
        if (parts.size() != 2) {
            throw ParseError("fixture syntax: example2:L:p1,p2,... (got '" + arg + "')");
        }
        const long long l = to_ll(parts[0]);
        return ModelInput{example_binary_tree(static_cast<int>(l), d_list(parts[1])),
                          std::nullopt, arg};
    }
    if (arg == "chain") {
        return ModelInput{chain_model({0.1, 0.2}), std::nullopt, arg};
    }
    if (arg.rfind("chain:", 0) == 0) {
        return ModelInput{chain_model(d_list(arg.substr(6))), std::nullopt, arg};
    }
    return ModelInput{load_model(arg), std::nullopt, arg};
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const GlobalOpts& g, const std::string& model_arg) {
    const ModelInput in = resolve_model_arg(model_arg);  // throws with a path on failure
    const MctModel& m = in.require_model("validate");
    const int n = m.vertex_count();
    if (g.json) {
        json j;
        j["valid"] = true;
        j["m"] = n;
        j["cards"] = m.cards();
        j["edges"] = static_cast<int>(m.tree().edges().size());
        j["root"] = m.root();
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "m: " << n << "\n";
    std::cout << "cards:";
    for (int c : m.cards()) std::cout << " " << c;
    std::cout << "\n";
    std::cout << "edges: tree on " << n << " vertices (" << m.tree().edges().size()
              << " edges)\n";
    std::cout << "root: " << m.root() << "\n";
    std::cout << "root_pmf: " << m.root_pmf().size() << " entries, sum within 1e-12\n";
    std::cout << "kernels: " << (n - 1) << " row-stochastic kernels\n";
    std::cout << "model: valid\n";
    return 0;
}

// ---------------------------------------------------------------------------
// si

int cmd_si(const GlobalOpts& g, const std::string& model_arg, const std::string& method,
           int guard) {
    const ModelInput in = resolve_model_arg(model_arg);
    std::optional<SiResult> exact, brute;
    if (method == "exact" || method == "both") {
        exact = si_mct(in.require_model("the closed-form method"));
    }
    if (method == "brute" || method == "both") {
        brute = si_brute_force(in.joint(), guard);
    }

    json j;
    if (exact) {
        j["exact_bits"] = exact->value_bits;
        if (exact->argmin_edge) {
            j["argmin_edge"] = {exact->argmin_edge->first, exact->argmin_edge->second};
        }
    }
    if (brute) {
        j["brute_bits"] = brute->value_bits;
        if (brute->argmin_partition) {
            j["argmin_partition"] = partition_json(*brute->argmin_partition);
        }
    }
    if (exact && brute) j["delta"] = std::abs(exact->value_bits - brute->value_bits);

    if (g.json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (exact) {
        std::cout << "exact: " << format_double(exact->value_bits) << " bits";
        if (exact->argmin_edge) std::cout << ", argmin edge " << edge_str(*exact->argmin_edge);
        std::cout << "\n";
    }
    if (brute) {
        std::cout << "brute: " << format_double(brute->value_bits) << " bits";
        if (brute->argmin_partition) {
            std::cout << ", argmin partition " << partition_str(*brute->argmin_partition);
        }
        std::cout << "\n";
    }
    if (exact && brute) {
        std::cout << "delta: " << format_double(j["delta"].get<double>()) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const GlobalOpts& g, const std::string& model_arg, std::string suite,
               const std::string& mode_str, long long count) {
    const ModelInput in = resolve_model_arg(model_arg);
    const JointPmf pmf = in.joint();
    const Tree& tree = in.tree();

    const bool all = suite == "all";
    bool all_pass = true;
    json out;

    if (all || suite == "edge") {
        const EdgeMarkovReport r = verify_edge_markov(pmf, tree, g.tol);
        all_pass = all_pass && r.pass;
        out["edge"] = {{"pass", r.pass},
                       {"checks", r.checks.size()},
                       {"violations", r.violations.size()},
                       {"max_cmi", r.max_cmi}};
        if (!g.json) {
            if (r.pass) {
                std::cout << "edge: PASS (" << r.checks.size() << " checks, max CMI "
                          << format_double(r.max_cmi) << ")\n";
            } else {
                const EdgeMarkovCheck& w = r.violations.front();
                std::cout << "edge: FAIL (" << r.violations.size() << " of " << r.checks.size()
                          << " checks exceed tol, e.g. I at orientation (" << w.i << "," << w.j
                          << ") = " << format_double(w.cmi) << ")\n";
            }
        }
    }
    if (all || suite == "local") {
        const LocalMarkovReport r = verify_local_markov(pmf, tree, g.tol);
        all_pass = all_pass && r.pass;
        out["local"] = {{"pass", r.pass},
                        {"tested", r.tested},
                        {"violations", r.violations.size()},
                        {"worst_cmi", r.worst_cmi}};
        if (!g.json) {
            std::cout << "local: " << (r.pass ? "PASS" : "FAIL") << " (" << r.tested
                      << " checks, worst CMI " << format_double(r.worst_cmi) << ")\n";
        }
    }
    if (all || suite == "global") {
        const GlobalMarkovMode mode = mode_str == "sampled"
                                          ? GlobalMarkovMode::make_sampled(count, g.seed)
                                          : GlobalMarkovMode::make_exhaustive();
        const GlobalMarkovReport r = verify_global_markov(pmf, tree, g.tol, mode);
        all_pass = all_pass && r.pass;
        out["global"] = {{"pass", r.pass},
                         {"tested", r.tested},
                         {"violations", r.violations.size()},
                         {"worst_cmi", r.worst_cmi},
                         {"worst",
                          {{"a", r.worst.a.members},
                           {"b", r.worst.b.members},
                           {"s", r.worst.s.members}}}};
        if (!g.json) {
            std::cout << "global: " << (r.pass ? "PASS" : "FAIL") << " (" << r.tested
                      << " separated triples, worst I(" << set_str(r.worst.a) << ";"
                      << set_str(r.worst.b) << "|" << set_str(r.worst.s) << ") = "
                      << format_double(r.worst_cmi) << ")\n";
        }
    }
    if (all || suite == "branch") {
        const BranchIdentityReport r = branch_endpoint_identity_check(pmf, tree, g.tol);
        all_pass = all_pass && r.pass;
        out["branch"] = {{"pass", r.pass},
                         {"checks", r.checks.size()},
                         {"max_diff", r.max_diff}};
        if (!g.json) {
            std::cout << "branch: " << (r.pass ? "PASS" : "FAIL") << " (" << r.checks.size()
                      << " edges, max |branch MI - endpoint MI| " << format_double(r.max_diff)
                      << ")\n";
        }
    }
    if (all || suite == "sandwich") {
        const SandwichReport r = sandwich_check(pmf, g.tol);
        all_pass = all_pass && r.pass;
        out["sandwich"] = {{"pass", r.pass},
                           {"si", r.si},
                           {"total_correlation", r.total_corr},
                           {"dual_total_correlation", r.dual_total_corr}};
        if (!g.json) {
            std::cout << "sandwich: " << (r.pass ? "PASS" : "FAIL") << " (SI "
                      << format_double(r.si) << ", TC " << format_double(r.total_corr)
                      << ", DTC " << format_double(r.dual_total_corr) << ")\n";
        }
    }

    out["pass"] = all_pass;
    if (g.json) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << (all_pass ? "verify: PASS" : "verify: FAIL") << "\n";
    }
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sample

int cmd_sample(const GlobalOpts& g, const std::string& model_arg, long long n,
               const std::string& out_path) {
    const ModelInput in = resolve_model_arg(model_arg);
    const MctModel& model = in.require_model("sample");
    const SampleMatrix s = sample(model, n, g.seed);

    std::vector<std::string> header;
    for (int v = 1; v <= s.m; ++v) header.push_back("v" + std::to_string(v));
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(s.n));
    for (long long r = 0; r < s.n; ++r) {
        std::vector<std::string> row;
        row.reserve(static_cast<std::size_t>(s.m));
        for (int v = 1; v <= s.m; ++v) row.push_back(std::to_string(s.at(r, v)));
        rows.push_back(std::move(row));
    }

    if (out_path.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            std::cout << (i ? "," : "") << header[i];
        }
        std::cout << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
            std::cout << "\n";
        }
        return 0;
    }

    write_csv(out_path, header, rows);
    RunManifest man;
    man.command = g.command;
    man.master_seed = g.seed;
    man.config_hash =
        config_hash(json{{"command", "sample"}, {"model", model_to_json(model)}, {"n", n},
                         {"seed", g.seed}});
    man.outputs = {out_path};
    write_manifest(out_path + ".manifest.json", man);
    return 0;
}

// ---------------------------------------------------------------------------
// estimate

ExperimentSpec demo_spec() {
    std::vector<long long> schedule;
    for (int k = 6; k <= 13; ++k) schedule.push_back(2ll << k);  // N = |E| 2^k, |E| = 2
    return ExperimentSpec{example_binary_tree(2, {0.1, 0.3}), std::move(schedule), 500,
                          kDemoSeed, SamplingMode::kBlocks};
}

json experiment_to_json(const ExperimentSpec& spec) {
    return json{{"model", model_to_json(spec.model)},
                {"schedule", spec.schedule},
                {"trials", spec.trials},
                {"seed", spec.seed},
                {"sampling", spec.sampling == SamplingMode::kBlocks ? "blocks" : "per-edge"}};
}

int cmd_estimate(const GlobalOpts& g, const std::string& spec_arg, const std::string& out_dir) {
    const ExperimentSpec spec = spec_arg == "demo" ? demo_spec() : load_experiment(spec_arg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir + ": " + ec.message());

    const auto& edges = spec.model.tree().edges();
    const long long edge_count = static_cast<long long>(edges.size());
    const GapProfile profile = gap_profile(spec.model);
    const double si_true = si_mct(spec.model).value_bits;
    const int max_card = *std::max_element(spec.model.cards().begin(), spec.model.cards().end());

    std::vector<std::string> trial_header = {"N", "trial", "chosen_edge", "si_estimate",
                                             "correct"};
    for (const Edge& e : edges) trial_header.push_back("emi_" + edge_label(e));
    std::vector<std::vector<std::string>> trial_rows;

    const std::vector<std::string> summary_header = {
        "N",          "n_per_edge",       "trials",        "errors",
        "error_rate", "wilson_low",       "wilson_high",   "mean_abs_si_error",
        "si_true",    "bound",            "bound_raw",     "bound_vacuous",
        "bound_valid", "bound_threshold"};
    std::vector<std::vector<std::string>> summary_rows;

    for (long long budget : spec.schedule) {
        BanditConfig cfg{spec.model, budget, spec.trials, spec.seed, spec.sampling};
        const long long n_per_edge = budget / edge_count;

        std::vector<std::string> srow;
        srow.push_back(std::to_string(budget));
        srow.push_back(std::to_string(n_per_edge));
        srow.push_back(std::to_string(spec.trials));
        if (spec.trials > 0) {
            const std::vector<TrialOutcome> outcomes = run_trials(cfg, g.threads);
            for (long long t = 0; t < spec.trials; ++t) {
                const TrialOutcome& o = outcomes[static_cast<std::size_t>(t)];
                std::vector<std::string> row = {std::to_string(budget), std::to_string(t),
                                                edge_label(o.chosen_edge),
                                                format_double(o.si_estimate),
                                                o.correct ? "1" : "0"};
                for (const auto& [e, emi] : o.emi_per_edge) row.push_back(format_double(emi));
                trial_rows.push_back(std::move(row));
            }
            const McErrorReport rep = summarize_trials(cfg, outcomes);
            srow.push_back(std::to_string(rep.errors));
            srow.push_back(format_double(rep.error_rate));
            srow.push_back(format_double(rep.interval.low));
            srow.push_back(format_double(rep.interval.high));
            srow.push_back(format_double(rep.mean_abs_si_error));
        } else {
            srow.insert(srow.end(), {"", "", "", "", ""});
        }
        srow.push_back(format_double(si_true));
        if (profile.unique_min && n_per_edge >= 2) {
            const IdentificationBound b =
                error_probability_bound(profile, budget, max_card, static_cast<int>(edge_count));
            srow.push_back(format_double(b.bound.value));
            srow.push_back(format_double(b.bound.raw));
            srow.push_back(b.bound.vacuous ? "1" : "0");
            srow.push_back(b.valid ? "1" : "0");
            srow.push_back(format_double(b.threshold));
        } else {
            srow.insert(srow.end(), {"", "", "", "0", ""});
        }
        summary_rows.push_back(std::move(srow));
    }

    const std::filesystem::path dir(out_dir);
    const std::string trials_path = (dir / "trials.csv").string();
    const std::string summary_path = (dir / "summary.csv").string();
    const std::string manifest_path = (dir / "manifest.json").string();
    write_csv(trials_path, trial_header, trial_rows);
    write_csv(summary_path, summary_header, summary_rows);

    RunManifest man;
    man.command = g.command;
    man.master_seed = spec.seed;
    man.config_hash = config_hash(experiment_to_json(spec));
    man.outputs = {trials_path, summary_path};
    write_manifest(manifest_path, man);

    if (!g.json) {
        std::cout << "wrote " << trials_path << ", " << summary_path << ", " << manifest_path
                  << "\n";
    } else {
        json j{{"outputs", man.outputs}, {"config_hash", man.config_hash}};
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string note;
};

BoundsTable bounds_table(const std::string& family, const std::vector<long long>& ns,
                         const std::vector<double>& epss, const std::vector<double>& gaps,
                         const std::vector<long long>& budgets, double fail_prob, int card_x,
                         int card_y, int card, int edge_count, std::optional<double> bias_a,
                         std::optional<double> bias_b) {
    BoundsTable t;
    if (family == "bias") {
        t.header = {"card_x", "card_y", "n", "lower", "upper", "width"};
        for (long long n : ns) {
            const BiasBounds b = emi_bias_bounds(card_x, card_y, n);
            t.rows.push_back({std::to_string(card_x), std::to_string(card_y), std::to_string(n),
                              format_double(b.lower), format_double(b.upper),
                              format_double(b.upper - b.lower)});
        }
    } else if (family == "concentration") {
        t.header = {"n", "eps", "value", "raw", "vacuous"};
        for (long long n : ns) {
            for (double eps : epss) {
                const BoundValue b = emi_concentration_bound(n, eps);
                t.rows.push_back({std::to_string(n), format_double(eps),
                                  format_double(b.value), format_double(b.raw),
                                  b.vacuous ? "1" : "0"});
            }
        }
    } else if (family == "ordering") {
        t.header = {"n", "gap", "bias_a", "bias_b", "value", "raw", "vacuous"};
        for (long long n : ns) {
            for (double gap : gaps) {
                const double ba = bias_a ? *bias_a : emi_bias_bounds(card_x, card_y, n).upper;
                const double bb = bias_b ? *bias_b : emi_bias_bounds(card_x, card_y, n).upper;
                const BoundValue b = ordering_error_bound(n, gap, ba, bb);
                t.rows.push_back({std::to_string(n), format_double(gap), format_double(ba),
                                  format_double(bb), format_double(b.value),
                                  format_double(b.raw), b.vacuous ? "1" : "0"});
            }
        }
    } else if (family == "proposition") {
        t.header = {"budget", "edges",   "card", "gap",   "n_per_edge", "value",
                    "raw",    "vacuous", "valid", "threshold"};
        for (long long budget : budgets) {
            for (double gap : gaps) {
                const IdentificationBound b =
                    error_probability_bound(gap, budget, card, edge_count);
                t.rows.push_back({std::to_string(budget), std::to_string(edge_count),
                                  std::to_string(card), format_double(gap),
                                  std::to_string(budget / edge_count),
                                  format_double(b.bound.value), format_double(b.bound.raw),
                                  b.bound.vacuous ? "1" : "0", b.valid ? "1" : "0",
                                  format_double(b.threshold)});
            }
        }
    } else if (family == "complexity") {
        t.header = {"eps", "delta", "gap", "edges", "card", "samples"};
        for (double eps : epss) {
            for (double gap : gaps) {
                const long long s = sample_complexity(eps, fail_prob, gap, edge_count, card);
                t.rows.push_back({format_double(eps), format_double(fail_prob),
                                  format_double(gap), std::to_string(edge_count),
                                  std::to_string(card), std::to_string(s)});
            }
        }
        t.note = "order-level guide: the sample-complexity form drops constant factors";
    } else {
        throw ParseError("unknown bound family '" + family + "'");
    }
    return t;
}

int cmd_bounds(const GlobalOpts& g, const BoundsTable& t, const std::string& csv_path) {
    if (!csv_path.empty()) {
        write_csv(csv_path, t.header, t.rows);
        RunManifest man;
        man.command = g.command;
        man.master_seed = g.seed;
        json cfg{{"command", g.command}};
        if (!t.note.empty()) cfg["note"] = t.note;
        man.config_hash = config_hash(cfg);
        man.outputs = {csv_path};
        if (!t.note.empty()) man.extra = json{{"note", t.note}};
        write_manifest(csv_path + ".manifest.json", man);
    }
    if (g.json) {
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r;
            for (std::size_t i = 0; i < t.header.size(); ++i) r[t.header[i]] = row[i];
            rows.push_back(std::move(r));
        }
        json out{{"rows", std::move(rows)}};
        if (!t.note.empty()) out["note"] = t.note;
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::vector<std::size_t> width(t.header.size());
    for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    auto print_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::cout << (i ? "  " : "") << row[i]
                      << std::string(width[i] - row[i].size(), ' ');
        }
        std::cout << "\n";
    };
    print_row(t.header);
    for (const auto& row : t.rows) print_row(row);
    if (!t.note.empty()) std::cout << "note: " << t.note << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    for (int i = 0; i < argc; ++i) {
        if (i) g.command += " ";
        g.command += argv[i];
    }

    CLI::App app{"Shared information on tree Markov models: exact values, Markov-property "
                 "verification, and sampling experiments"};
    app.require_subcommand(1);
    app.add_flag("--json", g.json, "emit JSON instead of text");
    app.add_option("--seed", g.seed, "RNG seed (sample; sampled global scan)");
    app.add_option("--threads", g.threads,
                   "worker threads (0 = MCTSI_THREADS env or hardware)");
    app.add_option("--tol", g.tol, "tolerance in bits for verification checks");

    std::string model_arg, method = "both", suite = "all", mode_str = "exhaustive";
    std::string spec_arg, out_arg, csv_arg, family;
    long long n_samples = 0, count = 2000;
    int guard = PartitionEnumerator::kDefaultGuard;
    std::string ns = "100,1000,10000,100000", epss = "0.05", gaps = "0.3",
                budgets = "1000,10000,100000,1000000";
    double fail_prob = 0.1;
    int card = 2, edge_count = 2;
    std::optional<double> bias_a, bias_b;
    std::optional<int> card_x, card_y;

    CLI::App* validate = app.add_subcommand("validate", "load a model and check invariants");
    validate->add_option("model", model_arg, "model file or fixture")->required();

    CLI::App* si = app.add_subcommand("si", "shared information of a model");
    si->add_option("model", model_arg, "model file or fixture")->required();
    si->add_option("--method", method, "exact | brute | both")
        ->check(CLI::IsMember({"exact", "brute", "both"}));
    si->add_option("--guard", guard, "vertex cap for brute-force enumeration");

    CLI::App* verify = app.add_subcommand("verify", "Markov-property verification suites");
    verify->add_option("model", model_arg, "model file or fixture")->required();
    verify->add_option("--suite", suite, "edge | local | global | branch | sandwich | all")
        ->check(CLI::IsMember({"edge", "local", "global", "branch", "sandwich", "all"}));
    verify->add_option("--mode", mode_str, "global scan mode: exhaustive | sampled")
        ->check(CLI::IsMember({"exhaustive", "sampled"}));
    verify->add_option("--count", count, "triples to draw in sampled mode");

    CLI::App* sample_cmd = app.add_subcommand("sample", "draw i.i.d. vectors from a model");
    sample_cmd->add_option("model", model_arg, "model file or fixture")->required();
    sample_cmd->add_option("-n,--n", n_samples, "number of vectors")->required();
    sample_cmd->add_option("--out", out_arg, "CSV output path (default: stdout)");

    CLI::App* estimate = app.add_subcommand("estimate", "run a sampling experiment grid");
    estimate->add_option("experiment", spec_arg, "experiment file or 'demo'")->required();
    estimate->add_option("--out", out_arg, "output directory")->required();

    CLI::App* bounds = app.add_subcommand("bounds", "closed-form bound tables");
    bounds->add_option("--family", family,
                       "bias | concentration | ordering | proposition | complexity")
        ->required()
        ->check(CLI::IsMember({"bias", "concentration", "ordering", "proposition",
                               "complexity"}));
    bounds->add_option("--n", ns, "sample sizes, comma separated");
    bounds->add_option("--eps", epss, "epsilons, comma separated");
    bounds->add_option("--gap", gaps, "MI gaps, comma separated");
    bounds->add_option("--budget", budgets, "total budgets N, comma separated");
    bounds->add_option("--delta", fail_prob, "failure probability (complexity family)");
    bounds->add_option("--card", card, "per-variable alphabet size");
    bounds->add_option("--card-x", card_x, "first alphabet size (bias/ordering)");
    bounds->add_option("--card-y", card_y, "second alphabet size (bias/ordering)");
    bounds->add_option("--edges", edge_count, "edge count");
    bounds->add_option("--bias-a", bias_a, "ordering: bias bound of the smaller-MI pair");
    bounds->add_option("--bias-b", bias_b, "ordering: bias bound of the larger-MI pair");
    bounds->add_option("--csv", csv_arg, "also write the table as CSV");

    for (CLI::App* sub : {validate, si, verify, sample_cmd, estimate, bounds}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(g, model_arg);
        if (app.got_subcommand(si)) return cmd_si(g, model_arg, method, guard);
        if (app.got_subcommand(verify)) return cmd_verify(g, model_arg, suite, mode_str, count);
        if (app.got_subcommand(sample_cmd)) return cmd_sample(g, model_arg, n_samples, out_arg);
        if (app.got_subcommand(estimate)) return cmd_estimate(g, spec_arg, out_arg);
        if (app.got_subcommand(bounds)) {
            const BoundsTable t =
                bounds_table(family, ll_list(ns), d_list(epss), d_list(gaps), ll_list(budgets),
                             fail_prob, card_x.value_or(card), card_y.value_or(card), card,
                             edge_count, bias_a, bias_b);
            return cmd_bounds(g, t, csv_arg);
        }
        throw InternalConsistencyError("no subcommand dispatched");
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalConsistencyError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
