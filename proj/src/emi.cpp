#include "mctsi/emi.hpp"

#include <cmath>
#include <string>

#include "mctsi/prob.hpp"

namespace mctsi {

namespace {

constexpr double kLog2e = 1.4426950408889634;

double log2d(double x) { return std::log(x) * kLog2e; }

// H of a count vector: log2 n - (1/n) sum c log2 c.
double type_entropy(const std::vector<long long>& counts, long long n) {
    NeumaierSum s;
    for (long long c : counts) {
        if (c > 0) s.add(static_cast<double>(c) * log2d(static_cast<double>(c)));
    }
    return clamp_tiny_negative(log2d(static_cast<double>(n)) -
                               s.value() / static_cast<double>(n));
}

BoundValue make_bound(double raw) {
    BoundValue b;
    b.raw = raw;
    b.vacuous = raw >= 1.0;
    b.value = b.vacuous ? 1.0 : (raw < 0.0 ? 0.0 : raw);
    return b;
}

}  // namespace

PairSamples::PairSamples(std::vector<int> xs_in, std::vector<int> ys_in, int cx, int cy)
    : xs(std::move(xs_in)), ys(std::move(ys_in)), card_x(cx), card_y(cy) {
    if (xs.size() != ys.size()) throw PreconditionError("paired sequences differ in length");
    if (xs.empty()) throw PreconditionError("need at least one sample pair");
    if (card_x < 1 || card_y < 1) throw PreconditionError("alphabet sizes must be positive");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < 0 || xs[i] >= card_x || ys[i] < 0 || ys[i] >= card_y) {
            throw PreconditionError("sample symbol outside its alphabet at index " +
                                    std::to_string(i));
        }
    }
}

TypeCounts TypeCounts::from(const PairSamples& s) {
    TypeCounts t;
    t.card_x = s.card_x;
    t.card_y = s.card_y;
    t.n = s.n();
    t.joint.assign(static_cast<std::size_t>(s.card_x) * s.card_y, 0);
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        ++t.joint[static_cast<std::size_t>(s.xs[i]) * s.card_y + s.ys[i]];
    }
    return t;
}

double empirical_mi(const TypeCounts& t) {
    std::vector<long long> row(static_cast<std::size_t>(t.card_x), 0);
    std::vector<long long> col(static_cast<std::size_t>(t.card_y), 0);
    for (int x = 0; x < t.card_x; ++x) {
        for (int y = 0; y < t.card_y; ++y) {
            row[static_cast<std::size_t>(x)] += t.at(x, y);
            col[static_cast<std::size_t>(y)] += t.at(x, y);
        }
    }
    const double h_joint = type_entropy(t.joint, t.n);
    return clamp_tiny_negative(type_entropy(row, t.n) + type_entropy(col, t.n) - h_joint);
}

double empirical_mi(const PairSamples& s) { return empirical_mi(TypeCounts::from(s)); }

BiasBounds emi_bias_bounds(int card_x, int card_y, long long n) {
    if (n < 1) throw PreconditionError("sample count must be at least 1");
    if (card_x < 1 || card_y < 1) throw PreconditionError("alphabet sizes must be positive");
    const double dn = static_cast<double>(n);
    // log1p keeps full precision when the correction terms are tiny.
    BiasBounds b;
    b.lower = -(std::log1p((card_x - 1) / dn) + std::log1p((card_y - 1) / dn)) * kLog2e;
    b.upper = std::log1p((static_cast<double>(card_x) * card_y - 1) / dn) * kLog2e;
    return b;
}

BoundValue emi_concentration_bound(long long n, double epsilon) {
    if (n < 2) throw PreconditionError("concentration bound needs n >= 2");
    if (epsilon < 0.0) throw PreconditionError("epsilon must be nonnegative");
    const double l = log2d(static_cast<double>(n));
    return make_bound(std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon / (36.0 * l * l)));
}

double bounded_difference_check(const PairSamples& s, long long i, int x_new, int y_new) {
    if (i < 0 || i >= s.n()) throw PreconditionError("coordinate index out of range");
    if (x_new < 0 || x_new >= s.card_x || y_new < 0 || y_new >= s.card_y) {
        throw PreconditionError("replacement symbol outside its alphabet");
    }
    TypeCounts t = TypeCounts::from(s);
    const double before = empirical_mi(t);
    --t.joint[static_cast<std::size_t>(s.xs[static_cast<std::size_t>(i)]) * s.card_y +
              s.ys[static_cast<std::size_t>(i)]];
    ++t.joint[static_cast<std::size_t>(x_new) * s.card_y + y_new];
    const double after = empirical_mi(t);
    return std::abs(before - after);
}

BoundValue ordering_error_bound(long long n, double delta, double bias_a, double bias_b) {
    if (n < 2) throw PreconditionError("ordering bound needs n >= 2");
    if (!(delta > 0.0)) throw PreconditionError("gap must be positive");
    if (bias_a >= delta / 2.0 || bias_b >= delta / 2.0) {
        throw PreconditionError("bound invalid: bias must stay below delta/2");
    }
    const double l = log2d(static_cast<double>(n));
    const double denom = 36.0 * l * l;
    const double ta = delta / 2.0 - bias_a;
    const double tb = delta / 2.0 - bias_b;
    const double ea = std::exp(-2.0 * static_cast<double>(n) * ta * ta / denom);
    const double eb = std::exp(-2.0 * static_cast<double>(n) * tb * tb / denom);
    return make_bound(2.0 * std::max(ea, eb));
}

long long min_samples_for_gap(double delta, int card) {
    if (!(delta > 0.0)) throw PreconditionError("gap must be positive");
    if (card < 2) throw PreconditionError("alphabet size must be at least 2");
    const double c = static_cast<double>(card);
    const double t1 = (c * c - 1.0) / (std::exp2(delta / 2.0) - 1.0);
    const double t2 = (c - 1.0) / (std::exp2(delta / 4.0) - 1.0);
    return static_cast<long long>(std::floor(std::max(t1, t2))) + 1;
}

double ln_square_threshold(double c) {
    if (!(c >= 1.0)) throw PreconditionError("constant must be at least 1");
    const double lc = std::log(c);
    return std::max(1.0, 4.0 * c * std::log(2.0 * c) + 16.0 * c * lc * lc);
}

}  // namespace mctsi
