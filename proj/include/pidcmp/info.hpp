#pragma once
// Shannon measures in bits on trivariate distributions, pointwise (local)
// mutual information, and the summary of classical measures that every PID
// is built from.

#include <span>

#include "pidcmp/distribution.hpp"

namespace pidcmp {

/// -sum p log2 p over positive entries.
double entropy(std::span<const double> p);
double entropy(const Table& t);
/// Entropy of the marginal over `vars`.
double entropy(const JointDistribution& dist, VarSet vars);

/// Measures that are nonnegative in exact arithmetic come back clamped to 0
/// when they are within -1e-12; anything more negative raises ConsistencyError.
inline constexpr double kNegativeSlack = 1e-12;

/// I(X1; X2). Throws InvalidInput when x1 == x2.
double mutual_information(const JointDistribution& dist, Var x1, Var x2);
/// I(X1; X2 | X3). Throws InvalidInput unless the three are distinct.
double conditional_mi(const JointDistribution& dist, Var x1, Var x2, Var given);
/// I(Y; B, A).
double joint_mi(const JointDistribution& dist);
/// I(Y; B, A) - I(Y; B) - I(Y; A); either sign.
double interaction_information(const JointDistribution& dist);

struct Realization {
    std::size_t y = 0, b = 0, a = 0;
};

struct LocalTerm {
    Realization realization;
    double probability = 0.0;  ///< p(u, v) of the realization
    double local_value = 0.0;  ///< log2 p(u|v) / p(u), bits
};

/// Local mutual information i(u; v) between the variable groups `u` and `v`
/// (disjoint, nonempty) at `r`. Negative values mean that observing v made
/// the realized u less likely. Throws InvalidInput for zero-probability
/// realizations or overlapping groups.
LocalTerm local_mi(const JointDistribution& dist, VarSet u, VarSet v, Realization r);

/// Classical measures of a distribution (bits), or fractions of the joint
/// mutual information when `normalized`.
struct InfoSummary {
    double h_y = 0.0;
    double mi_yb = 0.0;
    double mi_ya = 0.0;
    double cmi_yb_given_a = 0.0;
    double cmi_ya_given_b = 0.0;
    double jmi = 0.0;
    double ii = 0.0;
    bool normalized = false;
};

InfoSummary summarize(const JointDistribution& dist);

/// Divides every field by jmi. Throws InvalidInput when jmi is not positive
/// (the output carries no information about the inputs).
InfoSummary normalize_summary(const InfoSummary& s);

}  // namespace pidcmp
