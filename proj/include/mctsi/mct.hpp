#ifndef MCTSI_MCT_HPP
#define MCTSI_MCT_HPP

#include <cstdint>
#include <vector>

#include "mctsi/prob.hpp"
#include "mctsi/tree.hpp"

namespace mctsi {

// Row-stochastic conditional pmf P(child = col | parent = row).
struct Kernel {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;  // row-major

    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// Markov chain on a tree: rooted tree, root pmf, and one kernel per non-root
// vertex oriented away from the root.
class MctModel {
  public:
    static constexpr double kRowSumTol = 1e-12;

    MctModel(Tree tree, int root, std::vector<int> cards, std::vector<double> root_pmf,
             std::vector<Kernel> kernels_by_vertex /* index v, empty at root */);

    const Tree& tree() const { return tree_; }
    int root() const { return root_; }
    int vertex_count() const { return tree_.vertex_count(); }
    const std::vector<int>& cards() const { return cards_; }
    int card(int v) const { return cards_[static_cast<std::size_t>(v) - 1]; }
    const std::vector<double>& root_pmf() const { return root_pmf_; }
    const Kernel& kernel(int v) const;
    // 0 for the root.
    int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
    // Root first, then children in breadth-first order.
    const std::vector<int>& bfs_order() const { return bfs_order_; }

    // Per-vertex marginals obtained by pushing the root pmf down the tree.
    std::vector<std::vector<double>> vertex_marginals() const;

  private:
    Tree tree_;
    int root_;
    std::vector<int> cards_;
    std::vector<double> root_pmf_;
    std::vector<Kernel> kernels_;
    std::vector<int> parent_;
    std::vector<int> bfs_order_;
};

// Row-major samples; row r, vertex v at values[r * m + (v-1)].
struct SampleMatrix {
    long long n = 0;
    int m = 0;
    std::vector<int> values;

    int at(long long row, int vertex) const {
        return values[static_cast<std::size_t>(row) * m + (vertex - 1)];
    }
};

// Materializes P(x) = root_pmf(x_root) * prod kernel_j(x_j | x_parent(j));
// variable ids are vertex ids.
JointPmf joint_pmf(const MctModel& model);

// n i.i.d. vectors by ancestral sampling in BFS order; deterministic in seed.
SampleMatrix sample(const MctModel& model, long long n, std::uint64_t seed);

// One conditional-independence check: I(X_j ; X_{B(i<-j)\{i}} | X_i).
// Orientations with an empty far set (i a leaf) are vacuous and not listed.
struct EdgeMarkovCheck {
    int i = 0;
    int j = 0;
    double cmi = 0.0;
};

struct EdgeMarkovReport {
    double tol = 0.0;
    std::vector<EdgeMarkovCheck> checks;
    std::vector<EdgeMarkovCheck> violations;
    double max_cmi = 0.0;
    bool pass = true;
};

EdgeMarkovReport verify_edge_markov(const JointPmf& pmf, const Tree& tree, double tol);
EdgeMarkovReport verify_edge_markov(const MctModel& model, double tol);

struct TripleCheck {
    VertexSet a, b, s;
    double cmi = 0.0;
};

struct GlobalMarkovMode {
    bool exhaustive = true;
    long long count = 0;
    std::uint64_t seed = 0;

    static GlobalMarkovMode make_exhaustive() { return GlobalMarkovMode{true, 0, 0}; }
    static GlobalMarkovMode make_sampled(long long count, std::uint64_t seed) {
        return GlobalMarkovMode{false, count, seed};
    }
};

struct GlobalMarkovReport {
    double tol = 0.0;
    long long tested = 0;
    double worst_cmi = 0.0;
    TripleCheck worst;
    std::vector<TripleCheck> violations;  // capped at kMaxStoredViolations
    bool pass = true;

    static constexpr std::size_t kMaxStoredViolations = 100;
};

// Tests I(X_A ; X_B | X_S) <= tol over separated triples (S nonempty,
// separating A from B). Exhaustive mode scans all 4^m vertex assignments
// (requires m <= 10); sampled mode draws assignments at random and keeps the
// separated ones.
GlobalMarkovReport verify_global_markov(const JointPmf& pmf, const Tree& tree, double tol,
                                        const GlobalMarkovMode& mode);

struct LocalMarkovReport {
    double tol = 0.0;
    long long tested = 0;
    double worst_cmi = 0.0;
    TripleCheck worst;
    std::vector<TripleCheck> violations;
    bool pass = true;
};

// Per-vertex check I(X_i ; X_{rest} | X_{N(i)}) plus the independent-set
// variant for sets of size 2..max_set_size.
LocalMarkovReport verify_local_markov(const JointPmf& pmf, const Tree& tree, double tol,
                                      int max_set_size = 3);

struct BranchIdentityCheck {
    int i = 0;
    int j = 0;
    double branch_mi = 0.0;
    double endpoint_mi = 0.0;
    double diff = 0.0;
};

struct BranchIdentityReport {
    double tol = 0.0;
    std::vector<BranchIdentityCheck> checks;
    double max_diff = 0.0;
    bool pass = true;
};

// |I(X_{B(i<-j)} ; X_{B(j<-i)}) - I(X_i ; X_j)| per edge.
BranchIdentityReport branch_endpoint_identity_check(const JointPmf& pmf, const Tree& tree,
                                                    double tol);

// Balanced binary tree with 2^l - 1 vertices, fair-bit root, and a binary
// symmetric kernel with flip probability p[i-2] for vertex i (parent i/2).
// Every vertex marginal is a fair bit.
MctModel example_binary_tree(int l, const std::vector<double>& p);

// Path 1-2-...-m of fair bits with binary symmetric kernels; p[i] is the flip
// probability on edge (i+1, i+2).
MctModel chain_model(const std::vector<double>& p);

// Five fair/derived bits on the path 1-2-3-4-5: X1, X2 copies of one fair
// bit, X4, X5 copies of another, X3 = X2 AND X4. Locally Markov on the path
// but not globally (and not edge-Markov).
struct PmfOnTree {
    JointPmf pmf;
    Tree tree;
};
PmfOnTree local_not_global_counterexample();

}  // namespace mctsi

#endif
