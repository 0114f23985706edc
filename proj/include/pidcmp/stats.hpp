#pragma once
// Paired nonparametric statistics: exact Wilcoxon signed-rank test,
// Bonferroni correction, and sample quartiles.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pidcmp {

/// Every difference was exactly zero, so the signed-rank test is undefined.
class NoTestPossible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Per-unit values of one quantity under two conditions.
struct PairedSample {
    std::vector<std::string> unit_ids;
    std::vector<double> first;
    std::vector<double> second;

    /// second - first, per unit. Throws InvalidInput on mismatched sizes or n = 0.
    std::vector<double> differences() const;
};

struct WilcoxonResult {
    double p = 1.0;              ///< exact two-sided p-value
    int n_used = 0;              ///< nonzero differences that were ranked
    int n_zero_dropped = 0;
    double w_plus = 0.0;         ///< sum of mid-ranks of the positive differences
    bool ties = false;           ///< some absolute differences shared a rank
};

/// Exact two-sided signed-rank test. Zero differences are dropped, tied
/// absolute values get mid-ranks, and the null distribution is the exact
/// distribution of W+ over all 2^n equally likely sign assignments.
/// Throws NoTestPossible when nothing is left after dropping zeros and
/// InvalidInput for non-finite values or n > 60.
WilcoxonResult wilcoxon_exact(std::span<const double> diffs);

/// min(m p, 1).
double bonferroni(double p, int m);

struct Quartiles {
    double lower = 0.0;
    double median = 0.0;
    double upper = 0.0;
};

/// Linear interpolation between order statistics (type 7) at 1/4, 1/2, 3/4.
Quartiles median_quartiles(std::span<const double> values);

/// Type-7 sample quantile at `prob` in [0, 1].
double quantile7(std::span<const double> values, double prob);

}  // namespace pidcmp
