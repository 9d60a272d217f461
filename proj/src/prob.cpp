#include "mctsi/prob.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mctsi {

namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1 / ln 2

double log2_checked(double x) { return std::log(x) * kLog2e; }

// Positions (within p) of the key's variables, validating the key.
std::vector<int> key_positions(const JointPmf& p, const MarginalKey& key) {
    if (key.vars.empty()) throw PreconditionError("marginal key must be nonempty");
    std::vector<int> pos;
    pos.reserve(key.vars.size());
    std::set<VarId> seen;
    for (VarId v : key.vars) {
        if (!seen.insert(v).second) {
            throw PreconditionError("marginal key repeats variable " + std::to_string(v));
        }
        const int k = p.position_of(v);
        if (k < 0) {
            throw PreconditionError("marginal key names unknown variable " + std::to_string(v));
        }
        pos.push_back(k);
    }
    return pos;
}

void require_disjoint_keys(const MarginalKey& a, const MarginalKey& b,
                           const char* what) {
    std::set<VarId> sa(a.vars.begin(), a.vars.end());
    for (VarId v : b.vars) {
        if (sa.count(v)) {
            throw PreconditionError(std::string(what) + " share variable " + std::to_string(v));
        }
    }
}

MarginalKey concat_keys(const MarginalKey& a, const MarginalKey& b) {
    MarginalKey out;
    out.vars = a.vars;
    out.vars.insert(out.vars.end(), b.vars.begin(), b.vars.end());
    return out;
}

}  // namespace

JointPmf::JointPmf(std::vector<VarId> variables, std::vector<int> cards,
                   std::vector<double> probs)
    : vars_(std::move(variables)), cards_(std::move(cards)), probs_(std::move(probs)) {
    if (vars_.empty()) throw InvariantError("pmf needs at least one variable");
    if (cards_.size() != vars_.size()) {
        throw InvariantError("cardinality list does not match variable list");
    }
    std::set<VarId> seen;
    for (VarId v : vars_) {
        if (v <= 0) throw InvariantError("variable ids must be positive");
        if (!seen.insert(v).second) {
            throw InvariantError("duplicate variable id " + std::to_string(v));
        }
    }
    std::size_t states = 1;
    for (int c : cards_) {
        if (c < 1) throw InvariantError("cardinalities must be at least 1");
        if (states > kMaxStates / static_cast<std::size_t>(c)) {
            throw SizeLimitError("state space exceeds the dense limit of 2^24");
        }
        states *= static_cast<std::size_t>(c);
    }
    if (probs_.size() != states) {
        throw InvariantError("probability vector has " + std::to_string(probs_.size()) +
                             " entries, expected " + std::to_string(states));
    }
    NeumaierSum total;
    for (double v : probs_) {
        if (!(v >= 0.0)) throw InvariantError("probabilities must be nonnegative");
        total.add(v);
    }
    if (std::abs(total.value() - 1.0) > kSumTol) {
        throw InvariantError("probabilities sum to " + std::to_string(total.value()) +
                             ", expected 1");
    }
    strides_.assign(vars_.size(), 1);
    for (int k = static_cast<int>(vars_.size()) - 2; k >= 0; --k) {
        strides_[k] = strides_[k + 1] * static_cast<std::size_t>(cards_[k + 1]);
    }
}

int JointPmf::position_of(VarId v) const {
    for (std::size_t k = 0; k < vars_.size(); ++k) {
        if (vars_[k] == v) return static_cast<int>(k);
    }
    return -1;
}

int JointPmf::card_of(VarId v) const {
    const int k = position_of(v);
    if (k < 0) throw PreconditionError("unknown variable " + std::to_string(v));
    return cards_[k];
}

JointPmf marginalize(const JointPmf& p, const MarginalKey& key) {
    const std::vector<int> pos = key_positions(p, key);
    std::vector<int> out_cards(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) out_cards[k] = p.cards()[pos[k]];

    std::vector<std::size_t> out_strides(pos.size(), 1);
    for (int k = static_cast<int>(pos.size()) - 2; k >= 0; --k) {
        out_strides[k] = out_strides[k + 1] * static_cast<std::size_t>(out_cards[k + 1]);
    }
    std::size_t out_states = out_strides.empty() ? 1 : out_strides[0] * out_cards[0];

    std::vector<double> out(out_states, 0.0);
    const std::size_t n = p.state_count();
    for (std::size_t flat = 0; flat < n; ++flat) {
        const double v = p.prob(flat);
        if (v == 0.0) continue;
        std::size_t idx = 0;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            idx += static_cast<std::size_t>(p.digit(flat, pos[k])) * out_strides[k];
        }
        out[idx] += v;
    }
    return JointPmf(key.vars, std::move(out_cards), std::move(out));
}

double entropy(const JointPmf& p) {
    NeumaierSum h;
    for (double v : p.probs()) {
        if (v > 0.0) h.add(-v * log2_checked(v));
    }
    return clamp_tiny_negative(h.value());
}

double mutual_information(const JointPmf& p, const MarginalKey& a, const MarginalKey& b) {
    require_disjoint_keys(a, b, "mutual information arguments");
    const double ha = entropy(marginalize(p, a));
    const double hb = entropy(marginalize(p, b));
    const double hab = entropy(marginalize(p, concat_keys(a, b)));
    return clamp_tiny_negative(ha + hb - hab);
}

double conditional_mutual_information(const JointPmf& p, const MarginalKey& a,
                                      const MarginalKey& b, const MarginalKey& s) {
    require_disjoint_keys(a, b, "conditional mutual information arguments");
    if (s.vars.empty()) return mutual_information(p, a, b);
    require_disjoint_keys(a, s, "argument and conditioning set");
    require_disjoint_keys(b, s, "argument and conditioning set");
    const double has = entropy(marginalize(p, concat_keys(a, s)));
    const double hbs = entropy(marginalize(p, concat_keys(b, s)));
    const double habs = entropy(marginalize(p, concat_keys(concat_keys(a, b), s)));
    const double hs = entropy(marginalize(p, s));
    return clamp_tiny_negative(has + hbs - habs - hs);
}

double kl_divergence(const JointPmf& p, const JointPmf& q) {
    if (p.variables() != q.variables() || p.cards() != q.cards()) {
        throw PreconditionError("divergence requires identically shaped pmfs");
    }
    NeumaierSum d;
    const std::size_t n = p.state_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double pv = p.prob(i);
        if (pv == 0.0) continue;
        const double qv = q.prob(i);
        if (qv == 0.0) {
            throw DivergenceInfiniteError("divergence is infinite: mass outside support");
        }
        d.add(pv * (log2_checked(pv) - log2_checked(qv)));
    }
    return clamp_tiny_negative(d.value());
}

JointPmf group_variables(const JointPmf& p, const std::vector<std::vector<VarId>>& groups) {
    if (groups.empty()) throw PreconditionError("grouping needs at least one group");
    std::set<VarId> covered;
    std::size_t covered_count = 0;
    std::vector<std::vector<int>> group_pos(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw PreconditionError("groups must be nonempty");
        std::vector<VarId> sorted = groups[g];
        std::sort(sorted.begin(), sorted.end());
        for (VarId v : sorted) {
            if (!covered.insert(v).second) {
                throw PreconditionError("groups overlap at variable " + std::to_string(v));
            }
            const int k = p.position_of(v);
            if (k < 0) {
                throw PreconditionError("group names unknown variable " + std::to_string(v));
            }
            group_pos[g].push_back(k);
            ++covered_count;
        }
    }
    if (covered_count != p.variables().size()) {
        throw PreconditionError("groups must cover every variable");
    }

    std::vector<VarId> out_vars(groups.size());
    std::vector<int> out_cards(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out_vars[g] = static_cast<VarId>(g + 1);
        long long c = 1;
        for (int k : group_pos[g]) c *= p.cards()[k];
        out_cards[g] = static_cast<int>(c);
    }

    std::vector<std::size_t> out_strides(groups.size(), 1);
    for (int g = static_cast<int>(groups.size()) - 2; g >= 0; --g) {
        out_strides[g] = out_strides[g + 1] * static_cast<std::size_t>(out_cards[g + 1]);
    }

    // Per original variable position: which output slot it lands in, with the
    // group's last member (largest id) fastest.
    std::vector<std::size_t> pos_weight(p.variables().size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::size_t w = out_strides[g];
        for (int k = static_cast<int>(group_pos[g].size()) - 1; k >= 0; --k) {
            const int pk = group_pos[g][k];
            pos_weight[pk] = w;
            w *= static_cast<std::size_t>(p.cards()[pk]);
        }
    }

    std::vector<double> out(static_cast<std::size_t>(out_strides[0]) * out_cards[0], 0.0);
    const std::size_t n = p.state_count();
    for (std::size_t flat = 0; flat < n; ++flat) {
        const double v = p.prob(flat);
        if (v == 0.0) continue;
        std::size_t idx = 0;
        for (std::size_t k = 0; k < pos_weight.size(); ++k) {
            idx += static_cast<std::size_t>(p.digit(flat, static_cast<int>(k))) * pos_weight[k];
        }
        out[idx] += v;
    }
    return JointPmf(std::move(out_vars), std::move(out_cards), std::move(out));
}

SubsetEntropyTable::SubsetEntropyTable(const JointPmf& p) : m_(p.var_count()) {
    if (m_ > kMaxVars) {
        throw SizeLimitError("subset entropy table supports at most 20 variables");
    }
    const std::size_t n = p.state_count();
    const std::uint32_t masks = std::uint32_t{1} << m_;
    table_.assign(masks, 0.0);

    // Digits of every state, decoded once.
    std::vector<std::uint8_t> digits;
    digits.resize(n * static_cast<std::size_t>(m_));
    for (std::size_t flat = 0; flat < n; ++flat) {
        for (int k = 0; k < m_; ++k) {
            digits[flat * m_ + k] = static_cast<std::uint8_t>(p.digit(flat, k));
        }
    }

    std::vector<double> marginal;
    std::vector<std::size_t> weight(m_);
    for (std::uint32_t mask = 1; mask < masks; ++mask) {
        std::size_t states = 1;
        for (int k = m_ - 1; k >= 0; --k) {
            if (mask & (std::uint32_t{1} << k)) {
                weight[k] = states;
                states *= static_cast<std::size_t>(p.cards()[k]);
            }
        }
        marginal.assign(states, 0.0);
        for (std::size_t flat = 0; flat < n; ++flat) {
            const double v = p.prob(flat);
            if (v == 0.0) continue;
            std::size_t idx = 0;
            const std::uint8_t* d = &digits[flat * m_];
            for (int k = 0; k < m_; ++k) {
                if (mask & (std::uint32_t{1} << k)) idx += d[k] * weight[k];
            }
            marginal[idx] += v;
        }
        NeumaierSum h;
        for (double v : marginal) {
            if (v > 0.0) h.add(-v * log2_checked(v));
        }
        table_[mask] = clamp_tiny_negative(h.value());
    }
}

}  // namespace mctsi
