#pragma once
// Ingestion of physiological trial segments and simulated (basal, apical)
// grids into joint distributions.

#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pidcmp/binning.hpp"
#include "pidcmp/distribution.hpp"

namespace pidcmp {

enum class Condition { control, treatment };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

/// One time segment of one recording: somatic current maps to B, dendritic
/// current maps to A.
struct TrialRecord {
    std::string unit_id;
    Condition condition = Condition::control;
    int bin_index = 0;
    double mean_basal = 0.0;
    double mean_apical = 0.0;
    int spike_count = 0;
};

/// One cell of a simulated synapse-count grid.
struct GridRecord {
    int n_basal = 0;
    int n_apical = 0;
    int spike_count = 0;
};

/// Closed range of synapse counts [lo, hi].
struct GridRange {
    int lo = 0;
    int hi = 0;

    bool contains(int n) const { return n >= lo && n <= hi; }
    std::string label() const { return std::to_string(lo) + "-" + std::to_string(hi); }
    /// Parses "lo-hi".
    static GridRange parse(std::string_view text);
    friend bool operator==(const GridRange&, const GridRange&) = default;
};

/// Parses a comma separated list of "lo-hi" ranges.
std::vector<GridRange> parse_ranges(const std::string& text);

/// Quantile-bins the basal and apical means independently and categorizes
/// spike counts; every record carries equal weight. When the records have
/// fewer distinct input values than `cfg.n_input_bins`, only that many bins
/// are filled and the remaining levels keep zero probability.
JointDistribution ingest_trials(std::span<const TrialRecord> records, const BinningConfig& cfg);

/// Keeps the grid cells inside both ranges and gives each one equal
/// probability. Input levels are the observed synapse counts themselves.
JointDistribution ingest_grid(std::span<const GridRecord> records, const BinningConfig& cfg,
                              GridRange basal, GridRange apical);

/// Restricts both conditions of one unit to the (basal, apical) amplitude
/// pairs present in both. Throws InvalidInput when no pair is shared.
std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>> match_support(std::span<const TrialRecord> first,
                                                                            std::span<const TrialRecord> second);

/// Drops the records of every amplitude pair whose segments carry no spikes
/// at all within this record list.
std::vector<TrialRecord> drop_silent_stimuli(std::span<const TrialRecord> records);

// CSV: header `unit_id,condition,bin_index,mean_basal,mean_apical,spike_count`.
std::vector<TrialRecord> read_trials_csv(std::istream& in);
std::vector<TrialRecord> read_trials_csv(const std::string& path);
void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);

// CSV: header `n_basal,n_apical,spike_count`.
std::vector<GridRecord> read_grid_csv(std::istream& in);
std::vector<GridRecord> read_grid_csv(const std::string& path);
void write_grid_csv(std::ostream& out, std::span<const GridRecord> records);

}  // namespace pidcmp
