#pragma once
// Input quantile binning and output spike-count categories.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pidcmp/distribution.hpp"

namespace pidcmp {

/// Assigns each value to one of `k` ordered bins of (as near as ties allow)
/// equal mass.
///
/// Values are stably sorted; the j-th boundary starts at sorted position
/// ceil(n*j/k) and is moved up to the start of the next block of equal values
/// so a tie block is never split. Boundaries are kept strictly increasing and
/// leave room for the remaining ones, so every bin is nonempty.
///
/// Throws InvalidInput when `values` is empty, k < 2, or there are fewer than
/// k distinct values.
std::vector<int> bin_quantile(std::span<const double> values, int k);

/// Half-open spike-count range [lo, hi); `hi` absent means open-ended.
struct CountRange {
    int lo = 0;
    std::optional<int> hi;
    std::string label;

    bool contains(int count) const { return count >= lo && (!hi || count < *hi); }
};

struct BinningConfig {
    int n_input_bins = 4;
    std::vector<CountRange> output_categories;

    /// Parses a category list such as "0,1,2+" or "0,1-2,3-4". Ranges are
    /// inclusive in the text form ("1-2" means counts 1 and 2).
    static BinningConfig parse(const std::string& outputs, int n_input_bins = 4);

    /// Throws InvalidInput unless categories are ordered, disjoint, at least two.
    void validate() const;

    Alphabet output_alphabet() const;
};

/// Index of the unique category containing `count`; throws InvalidInput if
/// no category contains it.
int categorize_output(int count, const BinningConfig& cfg);

}  // namespace pidcmp
