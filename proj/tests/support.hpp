#ifndef MCTSI_TESTS_SUPPORT_HPP
#define MCTSI_TESTS_SUPPORT_HPP

// Shared fixtures for the unit tests: seeded random models, independent
// plain-summation oracles, and helpers for driving the CLI binary.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "mctsi/mct.hpp"
#include "mctsi/prob.hpp"
#include "mctsi/rng.hpp"
#include "mctsi/tree.hpp"

namespace testsupport {

using mctsi::Edge;
using mctsi::JointPmf;
using mctsi::Kernel;
using mctsi::MctModel;
using mctsi::Partition;
using mctsi::Rng;
using mctsi::Tree;
using mctsi::VarId;
using mctsi::VertexSet;

// ---------------------------------------------------------------------------
// Frozen reference constants, computed independently with 50-digit arithmetic
// and rounded to the nearest double. Tests compare against these rather than
// re-deriving them through the code under test.

namespace oracle {

// Binary entropies h(p) = -p log2 p - (1-p) log2 (1-p).
inline constexpr double kH01 = 0.46899559358928122;    // h(0.1)
inline constexpr double kH02 = 0.72192809488736235;    // h(0.2)
inline constexpr double kH025 = 0.81127812445913286;   // h(0.25)
inline constexpr double kH03 = 0.88129089923069262;    // h(0.3)
inline constexpr double kOneMinusH01 = 0.53100440641071878;
inline constexpr double kOneMinusH02 = 0.27807190511263765;
inline constexpr double kOneMinusH025 = 0.18872187554086714;

// KL( Bernoulli(1/2) || Bernoulli(1/4) ) in bits.
inline constexpr double kKlHalfQuarter = 0.20751874963942191;

// Worst conditional dependence of the local-but-not-global fixture:
// 3/4 log2 3 - 1.
inline constexpr double kCounterexampleCmi = 0.18872187554086714;
// I(X_{1,2} ; X_{3,4,5}) in that fixture: h(1/4) + 1/2... precomputed.
inline constexpr double kCounterexampleBranchMi = 0.5;
inline constexpr double kCounterexampleEndpointMi = 0.31127812445913286;  // h(1/4) - 1/2

// Mutual-information gaps of the depth-2 binary-tree fixture:
// delta_1 = (1 - h(p2)) - (1 - h(p1)) = h(p1) - h(p2).
inline constexpr double kGapP01P02 = 0.25293250129808113;   // p = (0.1, 0.2)
inline constexpr double kGapP01P03 = 0.4122953056414114;    // p = (0.1, 0.3)

// exp(-2 n eps^2 / (36 log2(n)^2)) at n = 10^4, eps = 0.05.
inline constexpr double kConcentration1e4 = 0.99216462018420348;

// Raw ordering bound at n = 10^5, delta = 0.3, both biases at the upper
// bracket for a 2x2 alphabet (clamps to 1: vacuous).
inline constexpr double kOrderingRaw1e5 = 1.2716475189864928;

// Bias brackets for a 2x2 alphabet.
inline constexpr double kBiasLower2x2n100 = -0.028710585954140083;
inline constexpr double kBiasUpper2x2n100 = 0.042644337408493681;
inline constexpr double kBiasLower2x2n1e5 = -2.8853756549236971e-05;
inline constexpr double kBiasUpper2x2n1e5 = 4.3280202026884465e-05;

// Smallest sample count forcing bias below delta/2 (square alphabets).
inline constexpr long long kMinSamplesHalfCard2 = 16;   // raw 15.855640523649736
inline constexpr long long kMinSamplesHalfCard3 = 43;   // raw 42.281708063065962

// x0 = max{1, 4c ln(2c) + 16c ln^2 c}.
inline constexpr double kLnSquareThreshold1 = 2.7725887222397812;
inline constexpr double kLnSquareThreshold2 = 26.464851334341571;

// Budget-split failure bound at N = 10^9, delta_1 = 0.3, card 2, 2 edges,
// and its validity threshold.
inline constexpr double kProposition1e9 = 3.0588390571958193e-36;
inline constexpr double kPropositionThreshold = 83.596357037477796;

// ceil(|E| (card/eps + L log2^2 L + G log2 G + G log2^2 G)) at
// eps = delta = 0.1, delta_1 = 0.3, card 2, 2 edges.
inline constexpr long long kSampleComplexity = 30437;

// Wilson score interval (95%) for 3 errors in 500 trials.
inline constexpr double kWilson3of500Low = 0.0020425962719602371;
inline constexpr double kWilson3of500High = 0.017490252104053376;

}  // namespace oracle

// ---------------------------------------------------------------------------
// Independent elementary computations (plain summation, no compensation).

inline double h2(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

inline double plain_entropy(const std::vector<double>& probs) {
    double h = 0.0;
    for (double v : probs) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

// Mixed-radix digits of a flat index, last variable fastest (the documented
// dense layout), computed without touching JointPmf internals.
inline std::vector<int> plain_digits(std::size_t flat, const std::vector<int>& cards) {
    std::vector<int> d(cards.size(), 0);
    for (int k = static_cast<int>(cards.size()) - 1; k >= 0; --k) {
        d[static_cast<std::size_t>(k)] = static_cast<int>(flat % cards[k]);
        flat /= static_cast<std::size_t>(cards[k]);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Random fixtures. All deterministic in the provided Rng.

// Normalizes weights into a pmf whose sum is within one ulp of 1.
inline std::vector<double> normalize(std::vector<double> w) {
    double s = 0.0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    double resid = 1.0;
    for (double v : w) resid -= v;
    std::size_t top = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] > w[top]) top = i;
    }
    w[top] += resid;
    return w;
}

inline JointPmf make_pmf(std::vector<VarId> vars, std::vector<int> cards,
                         std::vector<double> weights) {
    return JointPmf(std::move(vars), std::move(cards), normalize(std::move(weights)));
}

// Full-support random pmf: weights in [0.1, 1.1) so no state is negligible.
inline JointPmf random_pmf(Rng& rng, std::vector<VarId> vars, std::vector<int> cards) {
    std::size_t states = 1;
    for (int c : cards) states *= static_cast<std::size_t>(c);
    std::vector<double> w(states);
    for (double& v : w) v = 0.1 + rng.next_double();
    return make_pmf(std::move(vars), std::move(cards), std::move(w));
}

inline Tree path_tree(int m) {
    std::vector<Edge> edges;
    for (int v = 1; v < m; ++v) edges.push_back({v, v + 1});
    return Tree(m, std::move(edges));
}

// Uniform random labeled tree via a random Pruefer sequence.
inline Tree random_tree(Rng& rng, int m) {
    if (m == 1) return Tree(1, {});
    if (m == 2) return Tree(2, {{1, 2}});
    std::vector<int> seq(static_cast<std::size_t>(m - 2));
    for (int& s : seq) s = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
    std::vector<int> degree(static_cast<std::size_t>(m + 1), 1);
    for (int s : seq) ++degree[static_cast<std::size_t>(s)];
    std::vector<Edge> edges;
    std::vector<bool> used(static_cast<std::size_t>(m + 1), false);
    for (int s : seq) {
        int leaf = 0;
        for (int v = 1; v <= m; ++v) {
            if (degree[static_cast<std::size_t>(v)] == 1 && !used[static_cast<std::size_t>(v)]) {
                leaf = v;
                break;
            }
        }
        edges.push_back(mctsi::make_edge(leaf, s));
        used[static_cast<std::size_t>(leaf)] = true;
        --degree[static_cast<std::size_t>(s)];
    }
    int a = 0, b = 0;
    for (int v = 1; v <= m; ++v) {
        if (degree[static_cast<std::size_t>(v)] == 1 && !used[static_cast<std::size_t>(v)]) {
            if (a == 0) {
                a = v;
            } else {
                b = v;
            }
        }
    }
    edges.push_back(mctsi::make_edge(a, b));
    return Tree(m, std::move(edges));
}

// Parent array (0 at the root) by breadth-first traversal.
inline std::vector<int> bfs_parents(const Tree& t, int root) {
    const int m = t.vertex_count();
    std::vector<int> parent(static_cast<std::size_t>(m + 1), -1);
    parent[static_cast<std::size_t>(root)] = 0;
    std::vector<int> queue{root};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        for (int w : t.neighbors(v)) {
            if (parent[static_cast<std::size_t>(w)] == -1) {
                parent[static_cast<std::size_t>(w)] = v;
                queue.push_back(w);
            }
        }
    }
    return parent;
}

// Random model on the given tree with full-support root pmf and kernels,
// cards in {2, 3}.
inline MctModel random_mct_on(Rng& rng, Tree t) {
    const int m = t.vertex_count();
    std::vector<int> cards(static_cast<std::size_t>(m));
    for (int& c : cards) c = 2 + static_cast<int>(rng.next_below(2));
    const int root = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
    const auto parent = bfs_parents(t, root);

    std::vector<double> root_pmf(static_cast<std::size_t>(cards[root - 1]));
    for (double& v : root_pmf) v = 0.1 + rng.next_double();
    root_pmf = normalize(std::move(root_pmf));

    std::vector<Kernel> kernels(static_cast<std::size_t>(m + 1));
    for (int v = 1; v <= m; ++v) {
        if (v == root) continue;
        Kernel k;
        k.rows = cards[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)] - 1)];
        k.cols = cards[static_cast<std::size_t>(v - 1)];
        k.v.resize(static_cast<std::size_t>(k.rows) * k.cols);
        for (int r = 0; r < k.rows; ++r) {
            std::vector<double> row(static_cast<std::size_t>(k.cols));
            for (double& x : row) x = 0.1 + rng.next_double();
            row = normalize(std::move(row));
            for (int c = 0; c < k.cols; ++c) k.at(r, c) = row[static_cast<std::size_t>(c)];
        }
        kernels[static_cast<std::size_t>(v)] = std::move(k);
    }
    return MctModel(std::move(t), root, std::move(cards), std::move(root_pmf),
                    std::move(kernels));
}

// Random tree model: uniform random tree shape, then random_mct_on.
inline MctModel random_mct(Rng& rng, int m) {
    Tree t = random_tree(rng, m);
    return random_mct_on(rng, std::move(t));
}

// Random partition of the tree's vertices into k connected atoms, built by
// contracting random edges (union-find); every atom is connected by
// construction.
inline Partition random_connected_partition(Rng& rng, const Tree& t, int k) {
    const int m = t.vertex_count();
    if (k < 1 || k > m) throw std::runtime_error("bad atom count");
    std::vector<int> find(static_cast<std::size_t>(m + 1));
    std::iota(find.begin(), find.end(), 0);
    auto root_of = [&](int v) {
        while (find[static_cast<std::size_t>(v)] != v) v = find[static_cast<std::size_t>(v)];
        return v;
    };
    std::vector<Edge> edges = t.edges();
    for (std::size_t i = edges.size(); i > 1; --i) {
        std::swap(edges[i - 1], edges[rng.next_below(i)]);
    }
    int atoms = m;
    for (const auto& [a, b] : edges) {
        if (atoms == k) break;
        const int ra = root_of(a), rb = root_of(b);
        if (ra != rb) {
            find[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
            --atoms;
        }
    }
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(m + 1));
    for (int v = 1; v <= m; ++v) groups[static_cast<std::size_t>(root_of(v))].push_back(v);
    Partition p;
    for (auto& g : groups) {
        if (!g.empty()) p.atoms.push_back(VertexSet(std::move(g)));
    }
    p.canonicalize();
    return p;
}

// Bell numbers via the Bell triangle; exact in double through m = 20.
inline double bell(int m) {
    std::vector<std::vector<double>> tri{{1.0}};
    for (int r = 1; r <= m; ++r) {
        std::vector<double> row{tri.back().back()};
        for (double v : tri.back()) row.push_back(row.back() + v);
        tri.push_back(std::move(row));
    }
    return tri[static_cast<std::size_t>(m)][0];
}

// ---------------------------------------------------------------------------
// CLI helpers. The ctest harness exports MCTSI_CLI_BIN.

inline std::string cli_bin() {
    const char* p = std::getenv("MCTSI_CLI_BIN");
    if (p == nullptr || *p == '\0') {
        throw std::runtime_error("MCTSI_CLI_BIN is not set; run through ctest");
    }
    return p;
}

struct CliResult {
    int exit_code = -1;
    std::string out;

    bool contains(const std::string& needle) const {
        return out.find(needle) != std::string::npos;
    }
};

inline CliResult run_cli(const std::string& args, bool merge_stderr = true) {
    std::string cmd = cli_bin() + " " + args;
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    CliResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string make_temp_dir() {
    std::string tmpl = "/tmp/mctsi_test_XXXXXX";
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    return tmpl;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace testsupport

#endif
