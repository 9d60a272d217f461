#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "mctsi/errors.hpp"
#include "mctsi/prob.hpp"
#include "support.hpp"

using namespace mctsi;
using namespace testsupport;

namespace {

JointPmf fair_bits(int m) {
    const std::size_t states = std::size_t{1} << m;
    std::vector<VarId> vars;
    for (int v = 1; v <= m; ++v) vars.push_back(v);
    return JointPmf(vars, std::vector<int>(static_cast<std::size_t>(m), 2),
                    std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

}  // namespace

TEST_CASE("compensated summation survives catastrophic cancellation") {
    NeumaierSum s;
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 1.0);

    NeumaierSum t;
    for (int i = 0; i < 10; ++i) t.add(0.1);
    CHECK(std::abs(t.value() - 1.0) <= 1e-16);
}

TEST_CASE("tiny negative clamp zeroes only the cancellation band") {
    CHECK(clamp_tiny_negative(0.0) == 0.0);
    CHECK(clamp_tiny_negative(5.0) == 5.0);
    CHECK(clamp_tiny_negative(-1e-13) == 0.0);
    CHECK(clamp_tiny_negative(-1e-12) == 0.0);
    CHECK(clamp_tiny_negative(-1e-9) == -1e-9);   // real bugs stay visible
    CHECK(clamp_tiny_negative(-1e-9, 1e-8) == 0.0);
}

TEST_CASE("joint pmf constructor rejects malformed inputs") {
    CHECK_THROWS_AS(JointPmf({}, {}, {1.0}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1, 2}, {2}, {0.5, 0.5}), InvariantError);
    CHECK_THROWS_AS(JointPmf({0}, {2}, {0.5, 0.5}), InvariantError);
    CHECK_THROWS_AS(JointPmf({-3}, {2}, {0.5, 0.5}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1, 1}, {2, 2}, {0.25, 0.25, 0.25, 0.25}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1}, {0}, {}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1}, {2}, {0.5, 0.5, 0.0}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1}, {2}, {0.5, -0.5}), InvariantError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(JointPmf({1}, {2}, {0.5, nan}), InvariantError);
    CHECK_THROWS_AS(JointPmf({1}, {2}, {0.5, 0.5 + 3e-12}), InvariantError);
    CHECK_NOTHROW(JointPmf({1}, {2}, {0.5, 0.5 + 5e-13}));
}

TEST_CASE("dense state-count guard fires before the length check") {
    // 4096 * 4096 * 2 = 2^25 exceeds the 2^24 dense limit.
    CHECK_THROWS_AS(JointPmf({1, 2, 3}, {4096, 4096, 2}, {1.0}), SizeLimitError);
    // SizeLimitError is a PreconditionError for exit-code purposes.
    CHECK_THROWS_AS(JointPmf({1, 2, 3}, {4096, 4096, 2}, {1.0}), PreconditionError);
}

TEST_CASE("flat indexing is mixed-radix with the last variable fastest") {
    std::vector<double> probs(24, 1.0 / 24.0);
    probs = normalize(std::move(probs));
    JointPmf p({3, 1, 2}, {2, 3, 4}, probs);

    CHECK(p.var_count() == 3);
    CHECK(p.state_count() == 24);
    CHECK(p.stride(0) == 12);
    CHECK(p.stride(1) == 4);
    CHECK(p.stride(2) == 1);

    // flat 23 = (1, 2, 3) in mixed radix (2, 3, 4).
    CHECK(p.digit(23, 0) == 1);
    CHECK(p.digit(23, 1) == 2);
    CHECK(p.digit(23, 2) == 3);
    // flat 5 = (0, 1, 1).
    CHECK(p.digit(5, 0) == 0);
    CHECK(p.digit(5, 1) == 1);
    CHECK(p.digit(5, 2) == 1);

    CHECK(p.position_of(3) == 0);
    CHECK(p.position_of(1) == 1);
    CHECK(p.position_of(2) == 2);
    CHECK(p.position_of(99) == -1);
    CHECK(p.card_of(1) == 3);
    CHECK(p.card_of(2) == 4);
    CHECK_THROWS_AS(p.card_of(99), PreconditionError);
}

TEST_CASE("marginalization matches a direct mixed-radix sum") {
    Rng rng(101);
    const std::vector<int> cards{2, 3, 2, 4};
    JointPmf p = random_pmf(rng, {1, 2, 3, 4}, cards);

    // Marginal onto (4, 2), in that order: oracle by direct accumulation.
    std::vector<double> expect(static_cast<std::size_t>(4 * 3), 0.0);
    for (std::size_t flat = 0; flat < p.state_count(); ++flat) {
        const auto d = plain_digits(flat, cards);
        expect[static_cast<std::size_t>(d[3] * 3 + d[1])] += p.prob(flat);
    }
    JointPmf marg = marginalize(p, MarginalKey{4, 2});
    REQUIRE(marg.variables() == std::vector<VarId>{4, 2});
    REQUIRE(marg.cards() == std::vector<int>{4, 3});
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(std::abs(marg.prob(i) - expect[i]) <= 1e-14);
    }
}

TEST_CASE("marginal of the depth-2 tree fixture's leaf pair") {
    const MctModel model = example_binary_tree(2, {0.1, 0.2});
    const JointPmf joint = joint_pmf(model);
    const JointPmf leaves = marginalize(joint, MarginalKey{2, 3});
    // P(x2, x3) = sum_u 1/2 * k2(x2|u) * k3(x3|u).
    CHECK(std::abs(leaves.prob(0) - 0.37) <= 1e-15);
    CHECK(std::abs(leaves.prob(1) - 0.13) <= 1e-15);
    CHECK(std::abs(leaves.prob(2) - 0.13) <= 1e-15);
    CHECK(std::abs(leaves.prob(3) - 0.37) <= 1e-15);
}

TEST_CASE("marginal key order permutes the result") {
    Rng rng(102);
    JointPmf p = random_pmf(rng, {1, 2}, {2, 3});
    JointPmf ab = marginalize(p, MarginalKey{1, 2});
    JointPmf ba = marginalize(p, MarginalKey{2, 1});
    REQUIRE(ba.variables() == std::vector<VarId>{2, 1});
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
            CHECK(ab.prob(static_cast<std::size_t>(a * 3 + b)) ==
                  ba.prob(static_cast<std::size_t>(b * 2 + a)));
        }
    }
    CHECK(std::abs(entropy(ab) - entropy(ba)) <= 1e-13);
}

TEST_CASE("marginal keys are validated") {
    JointPmf p = fair_bits(3);
    CHECK_THROWS_AS(marginalize(p, MarginalKey{}), PreconditionError);
    CHECK_THROWS_AS(marginalize(p, MarginalKey{1, 1}), PreconditionError);
    CHECK_THROWS_AS(marginalize(p, MarginalKey{1, 7}), PreconditionError);
}

TEST_CASE("entropy of simple distributions") {
    CHECK(entropy(fair_bits(3)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(entropy(JointPmf({1}, {2}, {0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(entropy(JointPmf({1}, {4}, {1.0, 0.0, 0.0, 0.0})) == 0.0);
    CHECK(std::abs(entropy(JointPmf({1}, {2}, {0.1, 0.9})) - oracle::kH01) <= 5e-16);
    CHECK(std::abs(entropy(JointPmf({1}, {2}, {0.25, 0.75})) - oracle::kH025) <= 5e-16);
}

TEST_CASE("entropy of a tree model factorizes over kernels") {
    const JointPmf joint = joint_pmf(example_binary_tree(2, {0.1, 0.2}));
    const double expect = 1.0 + oracle::kH01 + oracle::kH02;
    CHECK(std::abs(entropy(joint) - expect) <= 1e-13);
}

TEST_CASE("entropy against a plain-summation oracle on random pmfs") {
    Rng rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        JointPmf p = random_pmf(rng, {1, 2, 3}, {3, 2, 4});
        CHECK(std::abs(entropy(p) - plain_entropy(p.probs())) <= 1e-12);
    }
}

TEST_CASE("mutual information of canonical pairs") {
    // Independent fair bits.
    CHECK(std::abs(mutual_information(fair_bits(2), MarginalKey{1}, MarginalKey{2})) <= 1e-14);
    // Perfectly correlated fair bits.
    JointPmf copy({1, 2}, {2, 2}, {0.5, 0.0, 0.0, 0.5});
    CHECK(std::abs(mutual_information(copy, MarginalKey{1}, MarginalKey{2}) - 1.0) <= 1e-15);
    // Fair bit through a symmetric channel with flip probability 0.1.
    JointPmf bsc({1, 2}, {2, 2}, {0.45, 0.05, 0.05, 0.45});
    CHECK(std::abs(mutual_information(bsc, MarginalKey{1}, MarginalKey{2}) -
                   oracle::kOneMinusH01) <= 1e-15);
    CHECK_THROWS_AS(mutual_information(copy, MarginalKey{1}, MarginalKey{1}),
                    PreconditionError);
}

TEST_CASE("mutual information equals divergence from the product of marginals") {
    Rng rng(104);
    for (int trial = 0; trial < 10; ++trial) {
        JointPmf p = random_pmf(rng, {1, 2}, {3, 4});
        JointPmf ma = marginalize(p, MarginalKey{1});
        JointPmf mb = marginalize(p, MarginalKey{2});
        std::vector<double> prod(p.state_count());
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 4; ++b) {
                prod[static_cast<std::size_t>(a * 4 + b)] =
                    ma.prob(static_cast<std::size_t>(a)) * mb.prob(static_cast<std::size_t>(b));
            }
        }
        JointPmf q({1, 2}, {3, 4}, normalize(std::move(prod)));
        const double mi = mutual_information(p, MarginalKey{1}, MarginalKey{2});
        CHECK(std::abs(mi - kl_divergence(p, q)) <= 1e-11);
    }
}

TEST_CASE("conditional mutual information with an empty conditioner is plain MI") {
    Rng rng(105);
    JointPmf p = random_pmf(rng, {1, 2, 3}, {2, 2, 3});
    const double mi = mutual_information(p, MarginalKey{1}, MarginalKey{3});
    const double cmi = conditional_mutual_information(p, MarginalKey{1}, MarginalKey{3},
                                                      MarginalKey{});
    CHECK(mi == cmi);
}

TEST_CASE("chain rule for mutual information") {
    Rng rng(106);
    for (int trial = 0; trial < 10; ++trial) {
        JointPmf p = random_pmf(rng, {1, 2, 3}, {2, 3, 2});
        const double lhs = mutual_information(p, MarginalKey{1}, MarginalKey{2, 3});
        const double rhs =
            mutual_information(p, MarginalKey{1}, MarginalKey{2}) +
            conditional_mutual_information(p, MarginalKey{1}, MarginalKey{3}, MarginalKey{2});
        CHECK(std::abs(lhs - rhs) <= 1e-11);
    }
}

TEST_CASE("conditional MI detects the conditional-independence structure") {
    // Markov path: ends independent given the middle.
    const JointPmf chain = joint_pmf(chain_model({0.1, 0.2}));
    CHECK(std::abs(conditional_mutual_information(chain, MarginalKey{1}, MarginalKey{3},
                                                  MarginalKey{2})) <= 1e-13);
    // The local-but-not-global fixture: conditioning on the AND bit couples
    // the two halves by exactly 3/4 log2(3) - 1.
    const PmfOnTree fixture = local_not_global_counterexample();
    const double cmi = conditional_mutual_information(fixture.pmf, MarginalKey{1},
                                                      MarginalKey{4}, MarginalKey{3});
    CHECK(std::abs(cmi - oracle::kCounterexampleCmi) <= 1e-15);
}

TEST_CASE("conditional MI validates key disjointness") {
    JointPmf p = fair_bits(3);
    CHECK_THROWS_AS(conditional_mutual_information(p, MarginalKey{1}, MarginalKey{2},
                                                   MarginalKey{1}),
                    PreconditionError);
    CHECK_THROWS_AS(conditional_mutual_information(p, MarginalKey{1}, MarginalKey{1},
                                                   MarginalKey{3}),
                    PreconditionError);
}

TEST_CASE("divergence basics") {
    JointPmf half({1}, {2}, {0.5, 0.5});
    JointPmf quarter({1}, {2}, {0.25, 0.75});
    CHECK(std::abs(kl_divergence(half, quarter) - oracle::kKlHalfQuarter) <= 1e-15);
    CHECK(kl_divergence(half, half) == 0.0);

    JointPmf point({1}, {2}, {1.0, 0.0});
    CHECK_THROWS_AS(kl_divergence(half, point), DivergenceInfiniteError);
    CHECK_NOTHROW(kl_divergence(point, half));

    JointPmf other_var({2}, {2}, {0.5, 0.5});
    CHECK_THROWS_AS(kl_divergence(half, other_var), PreconditionError);
    JointPmf other_card({1}, {4}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(kl_divergence(half, other_card), PreconditionError);

    Rng rng(107);
    for (int trial = 0; trial < 10; ++trial) {
        JointPmf p = random_pmf(rng, {1, 2}, {2, 3});
        JointPmf q = random_pmf(rng, {1, 2}, {2, 3});
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("entropy is monotone and subadditive") {
    Rng rng(108);
    for (int trial = 0; trial < 10; ++trial) {
        JointPmf p = random_pmf(rng, {1, 2, 3}, {2, 3, 2});
        const double h1 = entropy(marginalize(p, MarginalKey{1}));
        const double h2v = entropy(marginalize(p, MarginalKey{2}));
        const double h12 = entropy(marginalize(p, MarginalKey{1, 2}));
        CHECK(h12 >= h1 - 1e-12);
        CHECK(h12 >= h2v - 1e-12);
        CHECK(h12 <= h1 + h2v + 1e-12);
    }
}

TEST_CASE("subset entropy table matches the standalone functions") {
    Rng rng(109);
    JointPmf p = random_pmf(rng, {1, 2, 3, 4}, {2, 3, 2, 2});
    SubsetEntropyTable table(p);
    REQUIRE(table.var_count() == 4);

    for (std::uint32_t mask = 1; mask < 16; ++mask) {
        MarginalKey key;
        for (int k = 0; k < 4; ++k) {
            if (mask & (1u << k)) key.vars.push_back(p.variables()[static_cast<std::size_t>(k)]);
        }
        CHECK(std::abs(table.entropy(mask) - entropy(marginalize(p, key))) <= 1e-12);
    }

    CHECK(std::abs(table.mutual_information(0b0001, 0b0010) -
                   mutual_information(p, MarginalKey{1}, MarginalKey{2})) <= 1e-12);
    CHECK(std::abs(table.conditional_mutual_information(0b0001, 0b1000, 0b0110) -
                   conditional_mutual_information(p, MarginalKey{1}, MarginalKey{4},
                                                  MarginalKey{2, 3})) <= 1e-12);
    CHECK(table.conditional_mutual_information(0b0001, 0b0010, 0) ==
          table.mutual_information(0b0001, 0b0010));
}

TEST_CASE("subset entropy table validates masks") {
    JointPmf p = fair_bits(3);
    SubsetEntropyTable table(p);
    CHECK_THROWS_AS(table.mutual_information(0, 0b010), PreconditionError);
    CHECK_THROWS_AS(table.mutual_information(0b001, 0), PreconditionError);
    CHECK_THROWS_AS(table.mutual_information(0b011, 0b010), PreconditionError);
    CHECK_THROWS_AS(table.conditional_mutual_information(0b001, 0b010, 0b001),
                    PreconditionError);
    CHECK_THROWS_AS(table.conditional_mutual_information(0b001, 0b011, 0b100),
                    PreconditionError);
}

TEST_CASE("subset entropy table refuses too many variables") {
    std::vector<VarId> vars;
    for (int v = 1; v <= 21; ++v) vars.push_back(v);
    JointPmf p(vars, std::vector<int>(21, 1), {1.0});
    CHECK_THROWS_AS(SubsetEntropyTable{p}, SizeLimitError);
}

TEST_CASE("grouping variables preserves the distribution") {
    const JointPmf joint = joint_pmf(example_binary_tree(2, {0.1, 0.2}));
    const JointPmf grouped = group_variables(joint, {{2, 3}, {1}});
    REQUIRE(grouped.variables() == std::vector<VarId>{1, 2});
    REQUIRE(grouped.cards() == std::vector<int>{4, 2});

    // Group 0 combines (2, 3) ascending with 3 fastest; group 1 is vertex 1.
    for (int x2 = 0; x2 < 2; ++x2) {
        for (int x3 = 0; x3 < 2; ++x3) {
            for (int x1 = 0; x1 < 2; ++x1) {
                const std::size_t src = static_cast<std::size_t>((x1 * 2 + x2) * 2 + x3);
                const std::size_t dst = static_cast<std::size_t>((x2 * 2 + x3) * 2 + x1);
                CHECK(std::abs(grouped.prob(dst) - joint.prob(src)) <= 1e-15);
            }
        }
    }
    CHECK(std::abs(entropy(grouped) - entropy(joint)) <= 1e-13);

    // Blocking (leaves | root) turns the tree into a two-variable pair whose
    // mutual information is H(leaves) + H(root) - H(all).
    const double mi = mutual_information(grouped, MarginalKey{1}, MarginalKey{2});
    const double expect = entropy(marginalize(joint, MarginalKey{2, 3})) + 1.0 -
                          entropy(joint);
    CHECK(std::abs(mi - expect) <= 1e-12);
}

TEST_CASE("grouping validates its blocks") {
    JointPmf p = fair_bits(3);
    CHECK_THROWS_AS(group_variables(p, {}), PreconditionError);
    CHECK_THROWS_AS(group_variables(p, {{1, 2}, {}}), PreconditionError);
    CHECK_THROWS_AS(group_variables(p, {{1, 2}, {2, 3}}), PreconditionError);
    CHECK_THROWS_AS(group_variables(p, {{1, 2}, {9}}), PreconditionError);
    CHECK_THROWS_AS(group_variables(p, {{1, 2}}), PreconditionError);
    CHECK_NOTHROW(group_variables(p, {{1, 2}, {3}}));
}
