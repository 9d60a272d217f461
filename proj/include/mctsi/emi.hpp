#ifndef MCTSI_EMI_HPP
#define MCTSI_EMI_HPP

#include <cstdint>
#include <vector>

#include "mctsi/errors.hpp"

namespace mctsi {

// Paired sequences over finite alphabets 0..card-1.
struct PairSamples {
    std::vector<int> xs;
    std::vector<int> ys;
    int card_x = 0;
    int card_y = 0;

    PairSamples(std::vector<int> xs_in, std::vector<int> ys_in, int cx, int cy);

    long long n() const { return static_cast<long long>(xs.size()); }
};

// Joint type (empirical distribution) of a sample pair.
struct TypeCounts {
    int card_x = 0;
    int card_y = 0;
    long long n = 0;
    std::vector<long long> joint;  // row-major, index x * card_y + y

    static TypeCounts from(const PairSamples& s);

    long long at(int x, int y) const {
        return joint[static_cast<std::size_t>(x) * card_y + y];
    }
};

// A probability bound: raw closed-form value, the [0,1]-clamped value, and
// whether the raw value was >= 1 (carries no information).
struct BoundValue {
    double value = 1.0;
    double raw = 1.0;
    bool vacuous = true;
};

struct BiasBounds {
    double lower = 0.0;  // <= 0
    double upper = 0.0;  // >= 0
};

// Plug-in empirical mutual information H(Qx) + H(Qy) - H(Qxy), in bits.
double empirical_mi(const TypeCounts& t);
double empirical_mi(const PairSamples& s);

// Expectation bracket for EMI minus true MI:
// lower = -log2[(1+(cx-1)/n)(1+(cy-1)/n)], upper = log2(1+(cx*cy-1)/n).
BiasBounds emi_bias_bounds(int card_x, int card_y, long long n);

// exp(-2 n eps^2 / (36 log2(n)^2)), clamped to <= 1.
BoundValue emi_concentration_bound(long long n, double epsilon);

// |EMI(s) - EMI(s with coordinate i replaced by (x_new, y_new))|; always
// bounded by 6 log2(n) / n.
double bounded_difference_check(const PairSamples& s, long long i, int x_new, int y_new);

// Probability that the EMI of the pair with true MI larger by `delta` drops
// below the other pair's EMI: 2 max of two one-sided terms with exponents
// -2 n (delta/2 - bias)^2 / (36 log2(n)^2). Requires bias < delta/2 on both
// sides.
BoundValue ordering_error_bound(long long n, double delta, double bias_a, double bias_b);

// Smallest n with n > max{(card^2-1)/(2^(delta/2)-1), (card-1)/(2^(delta/4)-1)},
// which forces both biases below delta/2 for square alphabets.
long long min_samples_for_gap(double delta, int card);

// Smallest x0 = max{1, 4c ln(2c) + 16c ln^2(c)} such that x >= c ln^2 x for
// all x >= x0 (c >= 1, natural logs).
double ln_square_threshold(double c);

}  // namespace mctsi

#endif
