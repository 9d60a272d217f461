#include "mctsi/tree.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace mctsi {

namespace {

void require_in_range(int v, int m, const char* what) {
    if (v < 1 || v > m) {
        throw PreconditionError(std::string(what) + " id " + std::to_string(v) +
                                " outside 1.." + std::to_string(m));
    }
}

void require_valid_set(const VertexSet& s, int m, const char* what) {
    int prev = 0;
    for (int v : s.members) {
        require_in_range(v, m, what);
        if (v <= prev) throw PreconditionError(std::string(what) + " is not sorted/unique");
        prev = v;
    }
}

}  // namespace

VertexSet::VertexSet(std::initializer_list<int> ids) : members(ids) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
}

VertexSet::VertexSet(std::vector<int> ids) : members(std::move(ids)) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
}

bool VertexSet::contains(int v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

void Partition::canonicalize() {
    for (auto& atom : atoms) {
        std::sort(atom.members.begin(), atom.members.end());
    }
    std::sort(atoms.begin(), atoms.end(), [](const VertexSet& a, const VertexSet& b) {
        return a.members.front() < b.members.front();
    });
}

void Partition::validate(int m) const {
    std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
    int covered = 0;
    for (const auto& atom : atoms) {
        if (atom.empty()) throw InvariantError("partition atom is empty");
        for (int v : atom.members) {
            if (v < 1 || v > m) {
                throw InvariantError("partition names vertex " + std::to_string(v) +
                                     " outside 1.." + std::to_string(m));
            }
            if (seen[v]) {
                throw InvariantError("partition atoms overlap at vertex " + std::to_string(v));
            }
            seen[v] = 1;
            ++covered;
        }
    }
    if (covered != m) throw InvariantError("partition does not cover every vertex");
}

Tree::Tree(int m, std::vector<Edge> edges) : m_(m) {
    if (m_ < 1) throw InvariantError("tree needs at least one vertex");
    if (static_cast<int>(edges.size()) != m_ - 1) {
        throw InvariantError("tree on " + std::to_string(m_) + " vertices needs " +
                             std::to_string(m_ - 1) + " edges, got " +
                             std::to_string(edges.size()));
    }
    for (auto& e : edges) {
        require_in_range(e.first, m_, "edge endpoint");
        require_in_range(e.second, m_, "edge endpoint");
        if (e.first == e.second) throw InvariantError("self-loop at vertex " + std::to_string(e.first));
        e = make_edge(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw InvariantError("duplicate edge in tree");
    }
    edges_ = std::move(edges);

    adj_.assign(static_cast<std::size_t>(m_) + 1, {});
    for (const Edge& e : edges_) {
        adj_[e.first].push_back(e.second);
        adj_[e.second].push_back(e.first);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());

    // Connectivity; with m-1 edges this also rules out cycles.
    std::vector<char> seen(static_cast<std::size_t>(m_) + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj_[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != m_) throw InvariantError("tree is not connected");
}

const std::vector<int>& Tree::neighbors(int v) const {
    require_in_range(v, m_, "vertex");
    return adj_[v];
}

bool Tree::has_edge(int i, int j) const {
    if (i < 1 || i > m_ || j < 1 || j > m_) return false;
    const Edge e = make_edge(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

VertexSet branch_set(const Tree& t, int i, int j) {
    if (!t.has_edge(i, j)) {
        throw PreconditionError("(" + std::to_string(i) + "," + std::to_string(j) +
                                ") is not an edge");
    }
    std::vector<char> seen(static_cast<std::size_t>(t.vertex_count()) + 1, 0);
    std::vector<int> stack{i};
    seen[i] = 1;
    std::vector<int> out;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (int w : t.neighbors(v)) {
            if ((v == i && w == j) || (v == j && w == i)) continue;
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return VertexSet(std::move(out));
}

VertexSet neighborhood(const Tree& t, const VertexSet& s) {
    if (s.empty()) throw PreconditionError("neighborhood of an empty set");
    require_valid_set(s, t.vertex_count(), "vertex set");
    std::set<int> out;
    for (int v : s.members) {
        for (int w : t.neighbors(v)) out.insert(w);
    }
    for (int v : s.members) out.erase(v);
    return VertexSet(std::vector<int>(out.begin(), out.end()));
}

bool separates(const Tree& t, const VertexSet& a, const VertexSet& b, const VertexSet& s) {
    const int m = t.vertex_count();
    if (a.empty() || b.empty() || s.empty()) {
        throw PreconditionError("separation requires nonempty a, b, s");
    }
    require_valid_set(a, m, "set a");
    require_valid_set(b, m, "set b");
    require_valid_set(s, m, "set s");
    std::vector<char> label(static_cast<std::size_t>(m) + 1, 0);  // 1=a, 2=b, 3=s
    for (int v : a.members) label[v] = 1;
    for (int v : b.members) {
        if (label[v]) throw PreconditionError("separation sets overlap at " + std::to_string(v));
        label[v] = 2;
    }
    for (int v : s.members) {
        if (label[v]) throw PreconditionError("separation sets overlap at " + std::to_string(v));
        label[v] = 3;
    }
    // Flood from every a-vertex through t - s; separated iff no b-vertex reached.
    std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> stack;
    for (int v : a.members) {
        seen[v] = 1;
        stack.push_back(v);
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : t.neighbors(v)) {
            if (seen[w] || label[w] == 3) continue;
            if (label[w] == 2) return false;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return true;
}

std::vector<VertexSet> maximally_connected_components(const Tree& t, const VertexSet& s) {
    if (s.empty()) throw PreconditionError("components of an empty set");
    const int m = t.vertex_count();
    require_valid_set(s, m, "vertex set");
    std::vector<char> in_s(static_cast<std::size_t>(m) + 1, 0);
    for (int v : s.members) in_s[v] = 1;
    std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
    std::vector<VertexSet> out;
    for (int start : s.members) {
        if (seen[start]) continue;
        std::vector<int> comp;
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w : t.neighbors(v)) {
                if (in_s[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        out.push_back(VertexSet(std::move(comp)));
    }
    return out;
}

AgglomerateResult agglomerate(const Tree& t, const Partition& p) {
    const int m = t.vertex_count();
    p.validate(m);
    const int k = p.size();
    if (k < 2) throw PreconditionError("agglomeration needs at least two atoms");

    std::vector<int> atom_of(static_cast<std::size_t>(m) + 1, -1);
    for (int g = 0; g < k; ++g) {
        for (int v : p.atoms[g].members) atom_of[v] = g;
    }
    for (int g = 0; g < k; ++g) {
        const auto comps = maximally_connected_components(t, p.atoms[g]);
        if (comps.size() != 1) {
            throw PreconditionError("partition atom " + std::to_string(g + 1) +
                                    " is not connected");
        }
    }

    // One witnessing original edge per crossing atom pair; a tree with
    // connected atoms cannot produce two crossings for the same pair, but the
    // lexicographically smallest is kept defensively.
    std::vector<std::pair<Edge, Edge>> crossings;  // (quotient edge, witness)
    for (const Edge& e : t.edges()) {
        const int gi = atom_of[e.first];
        const int gj = atom_of[e.second];
        if (gi == gj) continue;
        const Edge q = make_edge(gi + 1, gj + 1);
        bool found = false;
        for (auto& c : crossings) {
            if (c.first == q) {
                found = true;
                if (e < c.second) c.second = e;
                break;
            }
        }
        if (!found) crossings.emplace_back(q, e);
    }
    std::sort(crossings.begin(), crossings.end());

    std::vector<Edge> qedges;
    std::vector<Edge> witness;
    qedges.reserve(crossings.size());
    witness.reserve(crossings.size());
    for (const auto& c : crossings) {
        qedges.push_back(c.first);
        witness.push_back(c.second);
    }
    Tree quotient(k, qedges);

    std::vector<int> atom_map(static_cast<std::size_t>(m) + 1, -1);
    for (int v = 1; v <= m; ++v) atom_map[v] = atom_of[v];
    return AgglomerateResult{std::move(quotient), std::move(witness), std::move(atom_map)};
}

PartitionEnumerator::PartitionEnumerator(int m, int min_atoms, int guard)
    : m_(m), min_atoms_(min_atoms), fresh_(true), done_(false) {
    if (m_ < 2) throw PreconditionError("partition enumeration needs m >= 2");
    if (m_ > guard) {
        throw SizeLimitError("partition enumeration limited to m <= " + std::to_string(guard));
    }
    if (min_atoms_ < 2 || min_atoms_ > m_) {
        throw PreconditionError("min_atoms must lie in 2..m");
    }
    rgs_.assign(static_cast<std::size_t>(m_), 0);
}

bool PartitionEnumerator::advance() {
    // Restricted growth string successor: rgs_[i] may rise to
    // max(rgs_[0..i-1]) + 1; everything after the bumped digit resets to 0.
    for (int i = m_ - 1; i >= 1; --i) {
        int prefix_max = 0;
        for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs_[j]);
        if (rgs_[i] <= prefix_max) {
            ++rgs_[i];
            std::fill(rgs_.begin() + i + 1, rgs_.end(), 0);
            return true;
        }
    }
    return false;
}

std::optional<Partition> PartitionEnumerator::next() {
    while (!done_) {
        if (fresh_) {
            fresh_ = false;
        } else if (!advance()) {
            done_ = true;
            break;
        }
        int atom_count = 0;
        for (int v : rgs_) atom_count = std::max(atom_count, v + 1);
        if (atom_count < min_atoms_) continue;

        Partition p;
        p.atoms.resize(static_cast<std::size_t>(atom_count));
        for (int i = 0; i < m_; ++i) {
            p.atoms[static_cast<std::size_t>(rgs_[i])].members.push_back(i + 1);
        }
        return p;
    }
    return std::nullopt;
}

}  // namespace mctsi
