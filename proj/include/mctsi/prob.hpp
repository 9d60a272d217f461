#ifndef MCTSI_PROB_HPP
#define MCTSI_PROB_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mctsi/errors.hpp"

namespace mctsi {

using VarId = int;

// All information quantities are in bits (log base 2).

// Compensated (Neumaier) accumulator; keeps entropy sums accurate to a few
// ulps even over 2^24 terms, which the 1e-12 clamping rules rely on.
class NeumaierSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Tiny negative values produced by floating cancellation collapse to zero;
// anything below -tol is returned as-is so a real bug stays visible.
inline double clamp_tiny_negative(double v, double tol = 1e-12) {
    return (v < 0.0 && v >= -tol) ? 0.0 : v;
}

// Ordered, duplicate-free selection of variable ids for marginalization.
struct MarginalKey {
    std::vector<VarId> vars;

    MarginalKey() = default;
    MarginalKey(std::initializer_list<VarId> ids) : vars(ids) {}
    explicit MarginalKey(std::vector<VarId> ids) : vars(std::move(ids)) {}
};

// Dense joint pmf over finitely many finite-alphabet variables.
// Flat indexing is mixed-radix with the LAST variable fastest:
// index = ((x_1 * c_2 + x_2) * c_3 + x_3) ...
class JointPmf {
  public:
    // Hard guard on dense state count.
    static constexpr std::size_t kMaxStates = std::size_t{1} << 24;
    // Probabilities must be nonnegative and sum to 1 within this tolerance.
    static constexpr double kSumTol = 1e-12;

    JointPmf(std::vector<VarId> variables, std::vector<int> cards,
             std::vector<double> probs);

    const std::vector<VarId>& variables() const { return vars_; }
    const std::vector<int>& cards() const { return cards_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t state_count() const { return probs_.size(); }
    int var_count() const { return static_cast<int>(vars_.size()); }

    // Position of a variable id in this pmf's ordering; -1 if absent.
    int position_of(VarId v) const;
    int card_of(VarId v) const;

    double prob(std::size_t flat) const { return probs_[flat]; }

    // Digit of variable position k within flat state index.
    int digit(std::size_t flat, int pos) const {
        return static_cast<int>((flat / strides_[pos]) % static_cast<std::size_t>(cards_[pos]));
    }
    std::size_t stride(int pos) const { return strides_[pos]; }

  private:
    std::vector<VarId> vars_;
    std::vector<int> cards_;
    std::vector<std::size_t> strides_;
    std::vector<double> probs_;
};

// Marginal of p onto the key's variables, in key order.
JointPmf marginalize(const JointPmf& p, const MarginalKey& key);

// Shannon entropy H(p) in bits; 0 log 0 = 0.
double entropy(const JointPmf& p);

// I(A; B) = H(A) + H(B) - H(A,B). Keys must be disjoint and nonempty.
double mutual_information(const JointPmf& p, const MarginalKey& a, const MarginalKey& b);

// I(A; B | S) = H(A,S) + H(B,S) - H(A,B,S) - H(S). S may be empty, in which
// case this reduces to mutual_information.
double conditional_mutual_information(const JointPmf& p, const MarginalKey& a,
                                      const MarginalKey& b, const MarginalKey& s);

// D(p || q) in bits over identically shaped pmfs. Throws
// DivergenceInfiniteError when p puts mass outside q's support.
double kl_divergence(const JointPmf& p, const JointPmf& q);

// Regroups variables into blocks: output variable g+1 (g = 0-based group
// index) ranges over the joint alphabet of groups[g], members combined in
// ascending id order with the last member fastest. Groups must partition
// p's variable set.
JointPmf group_variables(const JointPmf& p, const std::vector<std::vector<VarId>>& groups);

// Entropies of every subset of p's variables, addressed by bitmask over
// variable POSITIONS (bit k = k-th variable of p). Turns each subsequent
// entropy / MI / CMI query into O(1) lookups.
class SubsetEntropyTable {
  public:
    static constexpr int kMaxVars = 20;

    explicit SubsetEntropyTable(const JointPmf& p);

    int var_count() const { return m_; }

    double entropy(std::uint32_t mask) const { return table_[mask]; }

    double mutual_information(std::uint32_t a, std::uint32_t b) const {
        require_nonempty(a);
        require_nonempty(b);
        require_disjoint(a, b);
        return clamp_tiny_negative(table_[a] + table_[b] - table_[a | b]);
    }

    // s may be 0 (empty conditioning set).
    double conditional_mutual_information(std::uint32_t a, std::uint32_t b,
                                          std::uint32_t s) const {
        require_nonempty(a);
        require_nonempty(b);
        require_disjoint(a, b);
        require_disjoint(a, s);
        require_disjoint(b, s);
        return clamp_tiny_negative(table_[a | s] + table_[b | s] - table_[a | b | s] -
                                   table_[s]);
    }

  private:
    static void require_nonempty(std::uint32_t x) {
        if (x == 0) throw PreconditionError("subset mask must be nonempty");
    }
    static void require_disjoint(std::uint32_t x, std::uint32_t y) {
        if ((x & y) != 0) throw PreconditionError("subset masks must be disjoint");
    }

    int m_;
    std::vector<double> table_;
};

}  // namespace mctsi

#endif
