#pragma once
// Batch analyses: within-unit condition comparison, grid subset sweeps with
// the UIA bifurcation table, and cooperative context-sensitivity verdicts.
// Reports are plain data; report.hpp turns them into files.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pidcmp/ingest.hpp"
#include "pidcmp/pid.hpp"
#include "pidcmp/pointwise.hpp"
#include "pidcmp/stats.hpp"

namespace pidcmp {

/// Runs fn(0..n-1) on up to `threads` workers. Results must be written to
/// per-index slots; the call returns after every index is done.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Result of one PID method on one distribution.
struct MethodResult {
    Method method = Method::ibroja;
    std::optional<PidComponents> raw;         ///< bits
    std::optional<PidComponents> normalized;  ///< fractions of JMI
    std::optional<PointwiseLedger> ledger;
    std::string error;  ///< set when the method failed
};

/// Measures and every requested PID of one distribution.
struct DistributionAnalysis {
    InfoSummary summary;
    std::optional<InfoSummary> normalized;  ///< empty when JMI is zero
    std::vector<MethodResult> methods;      ///< in canonical method order
    JointDistribution dist;
};

DistributionAnalysis analyze_distribution(const JointDistribution& dist, const std::vector<Method>& methods,
                                          bool ledgers);

// ---------------------------------------------------------------- conditions

struct ConditionsConfig {
    BinningConfig binning = BinningConfig::parse("0,1,2+");
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    bool ledgers = false;
    bool drop_silent = false;
    /// Bonferroni families: name -> test ids. Tests outside every family are
    /// left uncorrected.
    std::map<std::string, std::vector<std::string>> families{{"uia", {"uia.control", "uia.treatment", "uia.diff"}}};
    int threads = 1;
};

struct ConditionResult {
    Condition condition = Condition::control;
    std::size_t n_records = 0;
    DistributionAnalysis analysis;
};

struct UnitResult {
    std::string unit_id;
    std::vector<ConditionResult> conditions;  ///< control, treatment; empty when skipped
    std::vector<std::string> warnings;
    bool skipped = false;

    /// Percent of JMI, treatment minus control, keyed by (method, component).
    std::map<std::pair<Method, std::string>, double> differences;
    /// Percent of JMI: I(Y;B) - I(Y;A) per condition and their difference.
    double uia_control = 0.0, uia_treatment = 0.0, uia_diff = 0.0;
};

struct TestResult {
    std::string id;  ///< e.g. "syn.ibroja.diff" or "uia.control"
    std::vector<double> values;
    std::optional<WilcoxonResult> wilcoxon;
    std::string error;  ///< "no test possible" and similar
    std::string family;
    int family_size = 1;
    std::optional<double> p_corrected;
    Quartiles quartiles;
};

/// Median and quartiles of one quantity across units, percent of JMI.
struct SampleSummary {
    std::string quantity;  ///< component or "uia"
    std::string method;    ///< empty for uia
    std::string condition; ///< "control", "treatment" or "diff"
    std::size_t n = 0;
    Quartiles quartiles;
};

struct ConditionsReport {
    ConditionsConfig config;
    std::vector<UnitResult> units;  ///< sorted by unit id
    std::vector<TestResult> tests;  ///< sorted by id
    std::vector<SampleSummary> summaries;
    std::vector<std::string> warnings;
};

ConditionsReport run_conditions(const std::vector<TrialRecord>& records, const ConditionsConfig& cfg);

// --------------------------------------------------------------------- sweep

struct SweepSpec {
    std::vector<GridRange> basal_ranges;
    std::vector<GridRange> apical_ranges;
    BinningConfig binning = BinningConfig::parse("0,1-2,3-4");
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    bool normalize = true;
    bool ledgers = false;
    int threads = 1;

    void validate() const;
};

struct SweepCell {
    GridRange basal;
    GridRange apical;
    std::size_t n_records = 0;
    std::optional<DistributionAnalysis> analysis;  ///< empty when the subset failed
    std::string error;
    /// Per-method UIA (UnqB - UnqA, bits) and the spread across methods.
    std::map<Method, double> method_uia;
    double uia = 0.0;  ///< I(Y;B) - I(Y;A), bits
    double uia_spread = 0.0;
    double uia_tolerance = 0.0;
    bool uia_consistent = true;
};

struct Bifurcation {
    GridRange apical;
    GridRange basal_from;
    GridRange basal_to;
    double uia_from = 0.0;
    double uia_to = 0.0;
};

struct SweepReport {
    SweepSpec spec;
    std::vector<SweepCell> cells;  ///< basal-major in spec order
    std::vector<Bifurcation> bifurcations;
    std::vector<std::string> warnings;
};

SweepReport run_sweep(const std::vector<GridRecord>& records, const SweepSpec& spec);

/// Sign with a dead zone of 1e-12 around zero.
int uia_sign(double v);

/// Sign flips of UIA along basal ranges ordered by (hi, lo), per apical range.
/// Cells with zero UIA are passed over.
std::vector<Bifurcation> find_bifurcations(const std::vector<SweepCell>& cells);

// ----------------------------------------------------------------------- CCS

enum class Tri { yes, no, indeterminate };
std::string_view to_string(Tri t);

struct CcsThresholds {
    double theta_b = 0.20;  ///< fractions of JMI
    double theta_a = 0.05;
    double theta_s = 0.10;
};

/// Component values (fractions of JMI) a CCS3 verdict rests on.
struct Ccs3Numbers {
    double unq_b = 0.0, unq_a = 0.0, shd = 0.0, syn = 0.0;
};

Tri derive_ccs3(const std::optional<Ccs3Numbers>& n, const CcsThresholds& t);
/// Yes when shd + syn peaks after the first basal range and ends below the
/// peak; indeterminate with fewer than three points.
Tri derive_ccs4(const std::vector<double>& shd_plus_syn);

struct CcsVerdict {
    GridRange basal;
    GridRange apical;
    Method method = Method::ibroja;
    Tri ccs1 = Tri::indeterminate;
    Tri ccs2 = Tri::indeterminate;
    Tri ccs3 = Tri::indeterminate;
    Tri ccs4 = Tri::indeterminate;
    // Supporting numbers.
    int apical_zero_rows = 0, apical_zero_spiking = 0;
    int basal_zero_rows = 0, basal_zero_spiking = 0;
    std::optional<Ccs3Numbers> numbers;
    std::vector<double> ccs4_series;  ///< shd + syn along this apical range's basal ranges
};

/// CCS1 from rows with no apical input, CCS2 from rows with no basal input.
Tri derive_ccs1(int apical_zero_rows, int apical_zero_spiking);
Tri derive_ccs2(int basal_zero_rows, int basal_zero_spiking);

struct CcsReport {
    SweepReport sweep;
    CcsThresholds thresholds;
    std::vector<CcsVerdict> verdicts;  ///< cell order, then method order
};

CcsReport classify_ccs(const std::vector<GridRecord>& records, const SweepSpec& spec, const CcsThresholds& t);

}  // namespace pidcmp
