#ifndef MCTSI_TREE_HPP
#define MCTSI_TREE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mctsi/errors.hpp"

namespace mctsi {

using Edge = std::pair<int, int>;  // unordered pair stored as (min, max)

inline Edge make_edge(int i, int j) { return i < j ? Edge{i, j} : Edge{j, i}; }

// Set of 1-based vertex ids, kept sorted ascending with no duplicates.
struct VertexSet {
    std::vector<int> members;

    VertexSet() = default;
    VertexSet(std::initializer_list<int> ids);
    explicit VertexSet(std::vector<int> ids);

    bool contains(int v) const;
    bool empty() const { return members.empty(); }
    int size() const { return static_cast<int>(members.size()); }
    bool operator==(const VertexSet& o) const { return members == o.members; }
};

// Partition of {1..m} into disjoint nonempty atoms. Canonical form: members
// ascending within each atom, atoms ordered by smallest member.
struct Partition {
    std::vector<VertexSet> atoms;

    int size() const { return static_cast<int>(atoms.size()); }
    void canonicalize();
    // Throws InvariantError unless atoms are disjoint, nonempty, cover 1..m.
    void validate(int m) const;
    bool operator==(const Partition& o) const { return atoms == o.atoms; }
};

// Undirected tree on vertices 1..m: connected, acyclic, exactly m-1 edges.
class Tree {
  public:
    Tree(int m, std::vector<Edge> edges);

    int vertex_count() const { return m_; }
    // Normalized (min,max) edges in lexicographic order.
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const;
    bool has_edge(int i, int j) const;

  private:
    int m_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

// B(i <- j): the component of t minus edge (i,j) that contains i.
VertexSet branch_set(const Tree& t, int i, int j);

// N(s) = union of neighbors of members of s, minus s itself.
VertexSet neighborhood(const Tree& t, const VertexSet& s);

// True iff every path from a to b passes through s. All three sets must be
// nonempty and pairwise disjoint.
bool separates(const Tree& t, const VertexSet& a, const VertexSet& b, const VertexSet& s);

// Components of the subgraph induced by s, each sorted, ordered by smallest
// member.
std::vector<VertexSet> maximally_connected_components(const Tree& t, const VertexSet& s);

// Quotient of t by a partition into connected atoms.
struct AgglomerateResult {
    Tree quotient;                      // vertices 1..k, atom g -> vertex g+1
    std::vector<Edge> witness;          // original edge behind quotient edge [idx]
    std::vector<int> atom_of;           // atom_of[v] = 0-based atom index of vertex v
};
AgglomerateResult agglomerate(const Tree& t, const Partition& p);

// Streams every set partition of {1..m} with at least min_atoms atoms, in
// restricted-growth-string order, each in canonical form.
class PartitionEnumerator {
  public:
    static constexpr int kDefaultGuard = 12;

    PartitionEnumerator(int m, int min_atoms, int guard = kDefaultGuard);

    std::optional<Partition> next();

  private:
    bool advance();

    int m_;
    int min_atoms_;
    std::vector<int> rgs_;
    bool fresh_;
    bool done_;
};

inline PartitionEnumerator enumerate_partitions(int m, int min_atoms,
                                                int guard = PartitionEnumerator::kDefaultGuard) {
    return PartitionEnumerator(m, min_atoms, guard);
}

}  // namespace mctsi

#endif
