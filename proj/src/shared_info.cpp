#include "mctsi/shared_info.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mctsi {

namespace {

constexpr double kLog2e = 1.4426950408889634;

double checked_score(double raw) {
    if (raw < -1e-12) {
        throw InternalConsistencyError("partition score " + std::to_string(raw) +
                                       " below -1e-12");
    }
    return raw < 0.0 ? 0.0 : raw;
}

// Atoms must name each pmf variable exactly once.
void validate_partition_for_pmf(const JointPmf& p, const Partition& part) {
    std::vector<char> seen(p.variables().size(), 0);
    std::size_t covered = 0;
    for (const auto& atom : part.atoms) {
        if (atom.empty()) throw PreconditionError("partition atom is empty");
        for (int v : atom.members) {
            const int pos = p.position_of(v);
            if (pos < 0) {
                throw PreconditionError("partition names unknown variable " + std::to_string(v));
            }
            if (seen[static_cast<std::size_t>(pos)]) {
                throw PreconditionError("partition atoms overlap at variable " +
                                        std::to_string(v));
            }
            seen[static_cast<std::size_t>(pos)] = 1;
            ++covered;
        }
    }
    if (covered != p.variables().size()) {
        throw PreconditionError("partition does not cover every variable");
    }
}

std::uint32_t atom_mask(const JointPmf& p, const VertexSet& atom) {
    std::uint32_t mask = 0;
    for (int v : atom.members) mask |= std::uint32_t{1} << p.position_of(v);
    return mask;
}

// Divergence form of the partition score, computed independently of the
// entropy form: D(p || product of atom marginals) / (k - 1).
double divergence_form_score(const JointPmf& p, const Partition& part) {
    const int k = part.size();
    std::vector<JointPmf> margs;
    std::vector<std::vector<int>> positions;
    margs.reserve(static_cast<std::size_t>(k));
    positions.reserve(static_cast<std::size_t>(k));
    for (const auto& atom : part.atoms) {
        margs.push_back(marginalize(p, MarginalKey{atom.members}));
        std::vector<int> pos;
        pos.reserve(atom.members.size());
        for (int v : atom.members) pos.push_back(p.position_of(v));
        positions.push_back(std::move(pos));
    }
    NeumaierSum d;
    const std::size_t n = p.state_count();
    for (std::size_t flat = 0; flat < n; ++flat) {
        const double pv = p.prob(flat);
        if (pv == 0.0) continue;
        double q = 1.0;
        for (int u = 0; u < k; ++u) {
            std::size_t idx = 0;
            const auto& pos = positions[static_cast<std::size_t>(u)];
            const auto& mp = margs[static_cast<std::size_t>(u)];
            for (std::size_t a = 0; a < pos.size(); ++a) {
                idx += static_cast<std::size_t>(p.digit(flat, pos[a])) * mp.stride(static_cast<int>(a));
            }
            q *= mp.prob(idx);
        }
        d.add(pv * std::log(pv / q) * kLog2e);
    }
    return d.value() / (k - 1);
}

}  // namespace

PartitionScore partition_score(const JointPmf& p, const Partition& part) {
    if (part.size() < 2) {
        throw PreconditionError("partition score needs at least two atoms");
    }
    validate_partition_for_pmf(p, part);
    NeumaierSum sum;
    for (const auto& atom : part.atoms) {
        sum.add(entropy(marginalize(p, MarginalKey{atom.members})));
    }
    const double raw = (sum.value() - entropy(p)) / (part.size() - 1);
    PartitionScore out;
    out.partition = part;
    out.k = part.size();
    out.score_bits = checked_score(raw);
    return out;
}

SiResult si_brute_force(const JointPmf& p, int guard) {
    const int m = p.var_count();
    for (int v = 1; v <= m; ++v) {
        if (p.position_of(v) < 0) {
            throw PreconditionError("brute force expects variables named 1..m");
        }
    }
    PartitionEnumerator partitions(m, 2, guard);
    SubsetEntropyTable table(p);
    const double h_full = table.entropy((std::uint32_t{1} << m) - 1);

    SiResult best;
    best.method = SiMethod::kBruteForce;
    bool first = true;
    long long counter = 0;
    while (auto part = partitions.next()) {
        NeumaierSum sum;
        for (const auto& atom : part->atoms) {
            sum.add(table.entropy(atom_mask(p, atom)));
        }
        const double score = checked_score((sum.value() - h_full) / (part->size() - 1));
        if (counter % 100 == 0) {
            const double div = checked_score(divergence_form_score(p, *part));
            if (std::abs(div - score) > 1e-10) {
                throw InternalConsistencyError("entropy and divergence partition scores differ by " +
                                               std::to_string(div - score));
            }
        }
        ++counter;
        if (first || score < best.value_bits) {
            first = false;
            best.value_bits = score;
            best.argmin_partition = *part;
        }
    }
    if (first) throw PreconditionError("no partition with at least two atoms exists");
    return best;
}

std::vector<std::pair<Edge, double>> edge_mutual_informations(const MctModel& model) {
    const auto marg = model.vertex_marginals();
    std::vector<std::pair<Edge, double>> out;
    out.reserve(model.tree().edges().size());
    for (const Edge& e : model.tree().edges()) {
        int par, child;
        if (model.parent(e.second) == e.first) {
            par = e.first;
            child = e.second;
        } else if (model.parent(e.first) == e.second) {
            par = e.second;
            child = e.first;
        } else {
            throw InternalConsistencyError("edge not oriented by the rooted tree");
        }
        const auto& pm = marg[static_cast<std::size_t>(par)];
        const Kernel& k = model.kernel(child);
        std::vector<double> col(static_cast<std::size_t>(k.cols), 0.0);
        NeumaierSum h_joint;
        NeumaierSum h_row;
        for (int r = 0; r < k.rows; ++r) {
            const double pr = pm[static_cast<std::size_t>(r)];
            if (pr == 0.0) continue;
            h_row.add(-pr * std::log(pr) * kLog2e);
            for (int c = 0; c < k.cols; ++c) {
                const double j = pr * k.at(r, c);
                if (j == 0.0) continue;
                col[static_cast<std::size_t>(c)] += j;
                h_joint.add(-j * std::log(j) * kLog2e);
            }
        }
        NeumaierSum h_col;
        for (double c : col) {
            if (c > 0.0) h_col.add(-c * std::log(c) * kLog2e);
        }
        const double mi = clamp_tiny_negative(h_row.value() + h_col.value() - h_joint.value());
        out.emplace_back(e, mi);
    }
    return out;
}

SiResult si_mct(const MctModel& model) {
    const auto mis = edge_mutual_informations(model);
    SiResult best;
    best.method = SiMethod::kMctClosedForm;
    if (mis.empty()) {
        // Single-vertex tree: no partition with two atoms exists; by
        // convention the minimum over an empty edge set is 0.
        best.value_bits = 0.0;
        return best;
    }
    bool first = true;
    for (const auto& [edge, mi] : mis) {
        if (first || mi < best.value_bits) {
            first = false;
            best.value_bits = mi;
            best.argmin_edge = edge;
        }
    }
    return best;
}

double total_correlation(const JointPmf& p) {
    NeumaierSum sum;
    for (VarId v : p.variables()) {
        sum.add(entropy(marginalize(p, MarginalKey{{v}})));
    }
    return clamp_tiny_negative(sum.value() - entropy(p));
}

double dual_total_correlation(const JointPmf& p) {
    const int m = p.var_count();
    if (m == 1) return 0.0;
    NeumaierSum sum;
    for (VarId v : p.variables()) {
        std::vector<VarId> rest;
        for (VarId w : p.variables()) {
            if (w != v) rest.push_back(w);
        }
        sum.add(entropy(marginalize(p, MarginalKey{rest})));
    }
    return clamp_tiny_negative(sum.value() - (m - 1) * entropy(p));
}

SandwichReport sandwich_check(const JointPmf& p, double slack, int guard) {
    const int m = p.var_count();
    SandwichReport report;
    report.slack = slack;
    report.si = si_brute_force(p, guard).value_bits;
    report.total_corr = total_correlation(p);
    report.dual_total_corr = dual_total_correlation(p);
    const double c_norm = report.total_corr / (m - 1);
    report.pass = c_norm <= report.dual_total_corr + slack &&
                  report.dual_total_corr <= (m - 1) * report.total_corr + slack &&
                  report.si <= c_norm + slack && report.si <= report.dual_total_corr + slack;
    return report;
}

RepairStep partition_repair_step(const JointPmf& p, const Partition& part, const Tree& tree) {
    const int m = tree.vertex_count();
    Partition current = part;
    current.canonicalize();
    current.validate(m);
    const double before = partition_score(p, current).score_bits;

    int target = -1;
    std::vector<VertexSet> comps;
    for (int a = 0; a < current.size(); ++a) {
        comps = maximally_connected_components(tree, current.atoms[static_cast<std::size_t>(a)]);
        if (comps.size() > 1) {
            target = a;
            break;
        }
    }
    RepairStep step;
    if (target < 0) {
        step.partition = std::move(current);
        step.score_before = before;
        step.score_after = before;
        step.changed = false;
        return step;
    }

    // Pick the first component A whose removal leaves every other component
    // of the atom inside a single piece of tree - A; the far-side piece is
    // reached through exactly one boundary vertex j.
    const VertexSet& atom = current.atoms[static_cast<std::size_t>(target)];
    int chosen = -1;
    int boundary_j = -1;
    for (int l = 0; l < static_cast<int>(comps.size()) && chosen < 0; ++l) {
        const VertexSet& a = comps[static_cast<std::size_t>(l)];
        std::vector<int> outside;
        for (int v = 1; v <= m; ++v) {
            if (!a.contains(v)) outside.push_back(v);
        }
        const auto pieces = maximally_connected_components(tree, VertexSet(std::move(outside)));
        int home = -1;
        bool ok = true;
        for (int lp = 0; lp < static_cast<int>(comps.size()) && ok; ++lp) {
            if (lp == l) continue;
            for (int v : comps[static_cast<std::size_t>(lp)].members) {
                int piece = -1;
                for (int q = 0; q < static_cast<int>(pieces.size()); ++q) {
                    if (pieces[static_cast<std::size_t>(q)].contains(v)) {
                        piece = q;
                        break;
                    }
                }
                if (home < 0) home = piece;
                if (piece != home) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok || home < 0) continue;
        chosen = l;
        for (int v : a.members) {
            for (int w : tree.neighbors(v)) {
                if (pieces[static_cast<std::size_t>(home)].contains(w)) {
                    boundary_j = w;
                    break;
                }
            }
            if (boundary_j >= 0) break;
        }
    }
    if (chosen < 0 || boundary_j < 0) {
        throw InternalConsistencyError("no component of the disconnected atom qualifies");
    }
    const VertexSet& a_set = comps[static_cast<std::size_t>(chosen)];

    // Split candidate: the component becomes its own atom.
    Partition split = current;
    {
        std::vector<int> remainder;
        for (int v : atom.members) {
            if (!a_set.contains(v)) remainder.push_back(v);
        }
        split.atoms[static_cast<std::size_t>(target)] = a_set;
        split.atoms.push_back(VertexSet(std::move(remainder)));
        split.canonicalize();
    }
    double best_score = partition_score(p, split).score_bits;
    Partition best = std::move(split);

    // Merge candidate: the atom absorbs the neighbor atom holding the
    // boundary vertex. Only valid while at least two atoms remain.
    if (current.size() >= 3) {
        int u = -1;
        for (int a = 0; a < current.size(); ++a) {
            if (current.atoms[static_cast<std::size_t>(a)].contains(boundary_j)) {
                u = a;
                break;
            }
        }
        if (u == target) {
            throw InternalConsistencyError("boundary vertex landed inside the split atom");
        }
        Partition merged;
        std::vector<int> joined = atom.members;
        joined.insert(joined.end(), current.atoms[static_cast<std::size_t>(u)].members.begin(),
                      current.atoms[static_cast<std::size_t>(u)].members.end());
        for (int a = 0; a < current.size(); ++a) {
            if (a == target || a == u) continue;
            merged.atoms.push_back(current.atoms[static_cast<std::size_t>(a)]);
        }
        merged.atoms.push_back(VertexSet(std::move(joined)));
        merged.canonicalize();
        const double merged_score = partition_score(p, merged).score_bits;
        if (merged_score < best_score) {
            best_score = merged_score;
            best = std::move(merged);
        }
    }

    step.partition = std::move(best);
    step.score_before = before;
    step.score_after = best_score;
    step.changed = true;
    return step;
}

}  // namespace mctsi
