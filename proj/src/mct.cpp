#include "mctsi/mct.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <string>

#include "mctsi/rng.hpp"

namespace mctsi {

namespace {

void validate_stochastic_row(const double* row, int len, double tol, const std::string& what) {
    NeumaierSum sum;
    for (int c = 0; c < len; ++c) {
        if (!(row[c] >= 0.0)) throw InvariantError(what + " has a negative entry");
        sum.add(row[c]);
    }
    if (std::abs(sum.value() - 1.0) > tol) {
        throw InvariantError(what + " sums to " + std::to_string(sum.value()) +
                             ", expected 1");
    }
}

// Bitmask over pmf variable positions for a set of vertex ids.
std::uint32_t mask_of(const JointPmf& pmf, const VertexSet& s) {
    std::uint32_t mask = 0;
    for (int v : s.members) {
        const int pos = pmf.position_of(v);
        if (pos < 0) throw PreconditionError("pmf lacks variable " + std::to_string(v));
        mask |= std::uint32_t{1} << pos;
    }
    return mask;
}

void require_tree_matches(const JointPmf& pmf, const Tree& tree) {
    if (pmf.var_count() != tree.vertex_count()) {
        throw PreconditionError("pmf has " + std::to_string(pmf.var_count()) +
                                " variables but tree has " +
                                std::to_string(tree.vertex_count()) + " vertices");
    }
    for (int v = 1; v <= tree.vertex_count(); ++v) {
        if (pmf.position_of(v) < 0) {
            throw PreconditionError("pmf lacks a variable for vertex " + std::to_string(v));
        }
    }
}

VertexSet set_from_mask(std::uint32_t mask, int m) {
    std::vector<int> vs;
    for (int v = 1; v <= m; ++v) {
        if (mask & (std::uint32_t{1} << (v - 1))) vs.push_back(v);
    }
    return VertexSet(std::move(vs));
}

}  // namespace

MctModel::MctModel(Tree tree, int root, std::vector<int> cards, std::vector<double> root_pmf,
                   std::vector<Kernel> kernels_by_vertex)
    : tree_(std::move(tree)),
      root_(root),
      cards_(std::move(cards)),
      root_pmf_(std::move(root_pmf)),
      kernels_(std::move(kernels_by_vertex)) {
    const int m = tree_.vertex_count();
    if (root_ < 1 || root_ > m) throw InvariantError("root outside 1..m");
    if (static_cast<int>(cards_.size()) != m) {
        throw InvariantError("cards list must have one entry per vertex");
    }
    for (int c : cards_) {
        if (c < 1) throw InvariantError("cardinalities must be at least 1");
    }
    if (static_cast<int>(root_pmf_.size()) != card(root_)) {
        throw InvariantError("root pmf length does not match the root alphabet");
    }
    validate_stochastic_row(root_pmf_.data(), static_cast<int>(root_pmf_.size()), kRowSumTol,
                            "root pmf");
    if (static_cast<int>(kernels_.size()) != m + 1) {
        throw InvariantError("kernel list must be indexed by vertex id 0..m");
    }

    parent_.assign(static_cast<std::size_t>(m) + 1, 0);
    bfs_order_.clear();
    bfs_order_.reserve(static_cast<std::size_t>(m));
    std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
    std::queue<int> q;
    q.push(root_);
    seen[root_] = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        bfs_order_.push_back(v);
        for (int w : tree_.neighbors(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                parent_[w] = v;
                q.push(w);
            }
        }
    }

    for (int v = 1; v <= m; ++v) {
        const Kernel& k = kernels_[static_cast<std::size_t>(v)];
        if (v == root_) {
            if (!k.v.empty()) throw InvariantError("root must not carry a kernel");
            continue;
        }
        const int pr = parent_[static_cast<std::size_t>(v)];
        if (k.rows != card(pr) || k.cols != card(v) ||
            k.v.size() != static_cast<std::size_t>(k.rows) * k.cols) {
            throw InvariantError("kernel for vertex " + std::to_string(v) +
                                 " has wrong dimensions");
        }
        for (int r = 0; r < k.rows; ++r) {
            validate_stochastic_row(&k.v[static_cast<std::size_t>(r) * k.cols], k.cols,
                                    kRowSumTol,
                                    "kernel row " + std::to_string(r) + " of vertex " +
                                        std::to_string(v));
        }
    }
}

const Kernel& MctModel::kernel(int v) const {
    if (v == root_) throw PreconditionError("root has no kernel");
    if (v < 1 || v > vertex_count()) throw PreconditionError("vertex outside 1..m");
    return kernels_[static_cast<std::size_t>(v)];
}

std::vector<std::vector<double>> MctModel::vertex_marginals() const {
    const int m = vertex_count();
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(m) + 1);
    marg[static_cast<std::size_t>(root_)] = root_pmf_;
    for (int v : bfs_order_) {
        if (v == root_) continue;
        const Kernel& k = kernel(v);
        const auto& pm = marg[static_cast<std::size_t>(parent(v))];
        std::vector<double> out(static_cast<std::size_t>(k.cols), 0.0);
        for (int r = 0; r < k.rows; ++r) {
            if (pm[static_cast<std::size_t>(r)] == 0.0) continue;
            for (int c = 0; c < k.cols; ++c) {
                out[static_cast<std::size_t>(c)] += pm[static_cast<std::size_t>(r)] * k.at(r, c);
            }
        }
        marg[static_cast<std::size_t>(v)] = std::move(out);
    }
    return marg;
}

JointPmf joint_pmf(const MctModel& model) {
    const int m = model.vertex_count();
    std::size_t states = 1;
    for (int v = 1; v <= m; ++v) {
        const auto c = static_cast<std::size_t>(model.card(v));
        if (states > JointPmf::kMaxStates / c) {
            throw SizeLimitError("state space exceeds the dense limit of 2^24");
        }
        states *= c;
    }

    std::vector<VarId> vars(static_cast<std::size_t>(m));
    std::vector<int> cards(static_cast<std::size_t>(m));
    for (int v = 1; v <= m; ++v) {
        vars[static_cast<std::size_t>(v - 1)] = v;
        cards[static_cast<std::size_t>(v - 1)] = model.card(v);
    }

    std::vector<double> probs(states, 0.0);
    std::vector<int> digit(static_cast<std::size_t>(m), 0);
    NeumaierSum total;
    for (std::size_t flat = 0;; ++flat) {
        double p = model.root_pmf()[static_cast<std::size_t>(digit[model.root() - 1])];
        for (int v = 1; v <= m && p != 0.0; ++v) {
            if (v == model.root()) continue;
            p *= model.kernel(v).at(digit[model.parent(v) - 1], digit[v - 1]);
        }
        probs[flat] = p;
        total.add(p);
        int k = m - 1;
        while (k >= 0 && ++digit[static_cast<std::size_t>(k)] == cards[static_cast<std::size_t>(k)]) {
            digit[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    // Exact normalization by the compensated total keeps the strict pmf-sum
    // invariant even for deep products.
    const double t = total.value();
    if (t > 0.0) {
        for (double& p : probs) p /= t;
    }
    return JointPmf(std::move(vars), std::move(cards), std::move(probs));
}

SampleMatrix sample(const MctModel& model, long long n, std::uint64_t seed) {
    if (n < 1) throw PreconditionError("sample count must be at least 1");
    const int m = model.vertex_count();
    SampleMatrix out;
    out.n = n;
    out.m = m;
    out.values.assign(static_cast<std::size_t>(n) * m, 0);
    Rng rng(seed);
    for (long long r = 0; r < n; ++r) {
        int* row = &out.values[static_cast<std::size_t>(r) * m];
        for (int v : model.bfs_order()) {
            if (v == model.root()) {
                row[v - 1] = rng.next_categorical(model.root_pmf());
            } else {
                const Kernel& k = model.kernel(v);
                const int pv = row[model.parent(v) - 1];
                row[v - 1] = rng.next_categorical(
                    {&k.v[static_cast<std::size_t>(pv) * k.cols], static_cast<std::size_t>(k.cols)});
            }
        }
    }
    return out;
}

EdgeMarkovReport verify_edge_markov(const JointPmf& pmf, const Tree& tree, double tol) {
    require_tree_matches(pmf, tree);
    SubsetEntropyTable table(pmf);
    EdgeMarkovReport report;
    report.tol = tol;
    for (const Edge& e : tree.edges()) {
        for (const auto& [i, j] :
             {std::pair{e.first, e.second}, std::pair{e.second, e.first}}) {
            VertexSet far = branch_set(tree, i, j);
            far.members.erase(std::remove(far.members.begin(), far.members.end(), i),
                              far.members.end());
            if (far.empty()) continue;
            const std::uint32_t a = mask_of(pmf, VertexSet{j});
            const std::uint32_t b = mask_of(pmf, far);
            const std::uint32_t s = mask_of(pmf, VertexSet{i});
            const double cmi = table.conditional_mutual_information(a, b, s);
            report.checks.push_back(EdgeMarkovCheck{i, j, cmi});
            report.max_cmi = std::max(report.max_cmi, cmi);
            if (cmi > tol) {
                report.violations.push_back(report.checks.back());
                report.pass = false;
            }
        }
    }
    return report;
}

EdgeMarkovReport verify_edge_markov(const MctModel& model, double tol) {
    return verify_edge_markov(joint_pmf(model), model.tree(), tol);
}

GlobalMarkovReport verify_global_markov(const JointPmf& pmf, const Tree& tree, double tol,
                                        const GlobalMarkovMode& mode) {
    require_tree_matches(pmf, tree);
    const int m = tree.vertex_count();
    if (mode.exhaustive && m > 10) {
        throw SizeLimitError("exhaustive separated-triple scan limited to m <= 10");
    }
    SubsetEntropyTable table(pmf);
    GlobalMarkovReport report;
    report.tol = tol;

    auto consider = [&](std::uint32_t am, std::uint32_t bm, std::uint32_t sm) {
        if (am == 0 || bm == 0 || sm == 0) return;
        const VertexSet a = set_from_mask(am, m);
        const VertexSet b = set_from_mask(bm, m);
        const VertexSet s = set_from_mask(sm, m);
        if (!separates(tree, a, b, s)) return;
        // Masks over vertices translated to pmf positions.
        const double cmi = table.conditional_mutual_information(
            mask_of(pmf, a), mask_of(pmf, b), mask_of(pmf, s));
        ++report.tested;
        if (report.tested == 1 || cmi > report.worst_cmi) {
            report.worst_cmi = cmi;
            report.worst = TripleCheck{a, b, s, cmi};
        }
        if (cmi > tol) {
            report.pass = false;
            if (report.violations.size() < GlobalMarkovReport::kMaxStoredViolations) {
                report.violations.push_back(TripleCheck{a, b, s, cmi});
            }
        }
    };

    if (mode.exhaustive) {
        std::uint64_t assignments = 1;
        for (int v = 0; v < m; ++v) assignments *= 4;
        for (std::uint64_t code = 0; code < assignments; ++code) {
            std::uint32_t am = 0, bm = 0, sm = 0;
            std::uint64_t c = code;
            for (int v = 0; v < m; ++v, c /= 4) {
                const int lbl = static_cast<int>(c % 4);
                if (lbl == 1) am |= std::uint32_t{1} << v;
                else if (lbl == 2) bm |= std::uint32_t{1} << v;
                else if (lbl == 3) sm |= std::uint32_t{1} << v;
            }
            if (am == 0 || bm == 0 || sm == 0) continue;
            // Unordered (A,B): keep the orientation whose lowest vertex is in A.
            const int la = std::countr_zero(am);
            const int lb = std::countr_zero(bm);
            if (lb < la) continue;
            consider(am, bm, sm);
        }
    } else {
        Rng rng(mode.seed);
        const long long max_attempts = mode.count > 0 ? mode.count * 200 : 0;
        long long attempts = 0;
        while (report.tested < mode.count && attempts < max_attempts) {
            ++attempts;
            std::uint32_t am = 0, bm = 0, sm = 0;
            for (int v = 0; v < m; ++v) {
                switch (rng.next_below(4)) {
                    case 1: am |= std::uint32_t{1} << v; break;
                    case 2: bm |= std::uint32_t{1} << v; break;
                    case 3: sm |= std::uint32_t{1} << v; break;
                    default: break;
                }
            }
            consider(am, bm, sm);
        }
    }
    return report;
}

LocalMarkovReport verify_local_markov(const JointPmf& pmf, const Tree& tree, double tol,
                                      int max_set_size) {
    require_tree_matches(pmf, tree);
    const int m = tree.vertex_count();
    SubsetEntropyTable table(pmf);
    LocalMarkovReport report;
    report.tol = tol;

    auto check = [&](const VertexSet& a) {
        const VertexSet nb = neighborhood(tree, a);
        if (nb.empty()) return;  // single-vertex tree
        std::vector<int> rest;
        for (int v = 1; v <= m; ++v) {
            if (!a.contains(v) && !nb.contains(v)) rest.push_back(v);
        }
        if (rest.empty()) return;
        const VertexSet b{std::vector<int>(rest)};
        const double cmi = table.conditional_mutual_information(
            mask_of(pmf, a), mask_of(pmf, b), mask_of(pmf, nb));
        ++report.tested;
        if (report.tested == 1 || cmi > report.worst_cmi) {
            report.worst_cmi = cmi;
            report.worst = TripleCheck{a, b, nb, cmi};
        }
        if (cmi > tol) {
            report.pass = false;
            report.violations.push_back(TripleCheck{a, b, nb, cmi});
        }
    };

    for (int v = 1; v <= m; ++v) check(VertexSet{v});

    // Independent sets of size 2..max_set_size, grown in ascending id order.
    std::vector<int> current;
    auto independent_with = [&](int v) {
        for (int u : current) {
            if (tree.has_edge(u, v)) return false;
        }
        return true;
    };
    auto recurse = [&](auto&& self, int next) -> void {
        if (static_cast<int>(current.size()) >= 2) {
            check(VertexSet{std::vector<int>(current)});
        }
        if (static_cast<int>(current.size()) >= max_set_size) return;
        for (int v = next; v <= m; ++v) {
            if (!independent_with(v)) continue;
            current.push_back(v);
            self(self, v + 1);
            current.pop_back();
        }
    };
    recurse(recurse, 1);
    return report;
}

BranchIdentityReport branch_endpoint_identity_check(const JointPmf& pmf, const Tree& tree,
                                                    double tol) {
    require_tree_matches(pmf, tree);
    SubsetEntropyTable table(pmf);
    BranchIdentityReport report;
    report.tol = tol;
    for (const Edge& e : tree.edges()) {
        const VertexSet bi = branch_set(tree, e.first, e.second);
        const VertexSet bj = branch_set(tree, e.second, e.first);
        const double branch_mi = table.mutual_information(mask_of(pmf, bi), mask_of(pmf, bj));
        const double endpoint_mi = table.mutual_information(
            mask_of(pmf, VertexSet{e.first}), mask_of(pmf, VertexSet{e.second}));
        const double diff = std::abs(branch_mi - endpoint_mi);
        report.checks.push_back(
            BranchIdentityCheck{e.first, e.second, branch_mi, endpoint_mi, diff});
        report.max_diff = std::max(report.max_diff, diff);
        if (diff > tol) report.pass = false;
    }
    return report;
}

MctModel example_binary_tree(int l, const std::vector<double>& p) {
    if (l < 1) throw PreconditionError("level count must be at least 1");
    const int m = (1 << l) - 1;
    if (static_cast<int>(p.size()) != m - 1) {
        throw PreconditionError("need exactly " + std::to_string(m - 1) +
                                " flip probabilities for " + std::to_string(l) + " levels");
    }
    for (double pi : p) {
        if (!(pi > 0.0 && pi < 0.5)) {
            throw PreconditionError("flip probabilities must lie strictly between 0 and 0.5");
        }
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m) - 1);
    for (int i = 2; i <= m; ++i) edges.push_back(make_edge(i / 2, i));
    Tree tree(m, std::move(edges));

    std::vector<Kernel> kernels(static_cast<std::size_t>(m) + 1);
    for (int i = 2; i <= m; ++i) {
        const double f = p[static_cast<std::size_t>(i - 2)];
        kernels[static_cast<std::size_t>(i)] = Kernel{2, 2, {1.0 - f, f, f, 1.0 - f}};
    }
    return MctModel(std::move(tree), 1, std::vector<int>(static_cast<std::size_t>(m), 2),
                    {0.5, 0.5}, std::move(kernels));
}

MctModel chain_model(const std::vector<double>& p) {
    const int m = static_cast<int>(p.size()) + 1;
    if (m < 2) throw PreconditionError("chain needs at least one flip probability");
    for (double pi : p) {
        if (!(pi > 0.0 && pi < 0.5)) {
            throw PreconditionError("flip probabilities must lie strictly between 0 and 0.5");
        }
    }
    std::vector<Edge> edges;
    for (int i = 1; i < m; ++i) edges.push_back(Edge{i, i + 1});
    Tree tree(m, std::move(edges));
    std::vector<Kernel> kernels(static_cast<std::size_t>(m) + 1);
    for (int i = 2; i <= m; ++i) {
        const double f = p[static_cast<std::size_t>(i - 2)];
        kernels[static_cast<std::size_t>(i)] = Kernel{2, 2, {1.0 - f, f, f, 1.0 - f}};
    }
    return MctModel(std::move(tree), 1, std::vector<int>(static_cast<std::size_t>(m), 2),
                    {0.5, 0.5}, std::move(kernels));
}

PmfOnTree local_not_global_counterexample() {
    // Variables (1..5) = (U, W, X, Y, Z): U = W fair, Y = Z fair independent
    // of U, X = W AND Y. Four equiprobable outcomes.
    std::vector<double> probs(32, 0.0);
    auto idx = [](int u, int w, int x, int y, int z) {
        return static_cast<std::size_t>((((u * 2 + w) * 2 + x) * 2 + y) * 2 + z);
    };
    probs[idx(0, 0, 0, 0, 0)] = 0.25;
    probs[idx(0, 0, 0, 1, 1)] = 0.25;
    probs[idx(1, 1, 0, 0, 0)] = 0.25;
    probs[idx(1, 1, 1, 1, 1)] = 0.25;
    JointPmf pmf({1, 2, 3, 4, 5}, {2, 2, 2, 2, 2}, std::move(probs));
    Tree tree(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}});
    return PmfOnTree{std::move(pmf), std::move(tree)};
}

}  // namespace mctsi
