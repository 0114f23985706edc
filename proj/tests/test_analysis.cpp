#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pidcmp/analysis.hpp"
#include "pidcmp/report.hpp"
#include "synthetic.hpp"

using namespace pidcmp;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::filesystem::path& p) {
    const auto s = read_file(p);
    return s.substr(0, s.find('\n'));
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pidcmp_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexAndRethrowsLowestFailure) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    try {
        parallel_for(50, 4, [](std::size_t i) {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
}

TEST(Conditions, TwoUnitShape) {
    ConditionsConfig cfg;
    const auto rep = run_conditions(fixtures::basal_dominant_trials(2, 3), cfg);
    ASSERT_EQ(rep.units.size(), 2u);
    for (const auto& u : rep.units) {
        ASSERT_FALSE(u.skipped);
        ASSERT_EQ(u.conditions.size(), 2u);
        for (const auto& c : u.conditions) {
            EXPECT_EQ(c.analysis.methods.size(), 5u);
            for (const auto& m : c.analysis.methods) EXPECT_TRUE(m.normalized.has_value()) << m.error;
        }
        EXPECT_EQ(u.differences.size(), 20u);
    }
    std::size_t diff_tests = 0;
    for (const auto& t : rep.tests) diff_tests += t.id.ends_with(".diff") && !t.id.starts_with("uia") ? 1 : 0;
    EXPECT_EQ(diff_tests, 20u);
    EXPECT_TRUE(std::is_sorted(rep.tests.begin(), rep.tests.end(),
                               [](const TestResult& l, const TestResult& r) { return l.id < r.id; }));
}

TEST(Conditions, IdenticalConditionsGiveZeroDifferencesAndNoTest) {
    auto trials = fixtures::basal_dominant_trials(3, 5);
    std::vector<TrialRecord> same;
    for (const auto& r : trials) {
        if (r.condition != Condition::control) continue;
        same.push_back(r);
        auto t = r;
        t.condition = Condition::treatment;
        same.push_back(t);
    }
    const auto rep = run_conditions(same, {});
    for (const auto& u : rep.units) {
        for (const auto& [k, v] : u.differences) EXPECT_EQ(v, 0.0);
    }
    for (const auto& t : rep.tests) {
        if (t.id.ends_with(".diff")) {
            EXPECT_FALSE(t.wilcoxon.has_value());
            EXPECT_EQ(t.error, "no test possible");
        }
    }
}

TEST(Conditions, UnitMissingAConditionIsSkippedWithWarning) {
    auto trials = fixtures::basal_dominant_trials(2, 9);
    std::vector<TrialRecord> pruned;
    for (const auto& r : trials) {
        if (!(r.unit_id == "u02" && r.condition == Condition::treatment)) pruned.push_back(r);
    }
    const auto rep = run_conditions(pruned, {});
    EXPECT_TRUE(rep.units[1].skipped);
    EXPECT_FALSE(rep.units[0].skipped);
    EXPECT_FALSE(rep.warnings.empty());
}

TEST(Conditions, FamiliesApplyBonferroni) {
    ConditionsConfig cfg;
    cfg.methods = {Method::ipm, Method::isx};
    cfg.families = {{"syn", {"syn.ipm.diff", "syn.isx.diff"}}};
    const auto rep = run_conditions(fixtures::basal_dominant_trials(6, 17), cfg);
    for (const auto& t : rep.tests) {
        if (!t.wilcoxon) continue;
        if (t.family == "syn") {
            EXPECT_EQ(t.family_size, 2);
            EXPECT_EQ(*t.p_corrected, std::min(2.0 * t.wilcoxon->p, 1.0));
        } else {
            EXPECT_EQ(t.family_size, 1);
            EXPECT_EQ(*t.p_corrected, t.wilcoxon->p);
        }
    }
}

TEST(Sweep, OneRangeEachGivesOneCell) {
    SweepSpec spec;
    spec.basal_ranges = {{0, 300}};
    spec.apical_ranges = {{0, 200}};
    spec.methods = {Method::ipm};
    const auto rep = run_sweep(fixtures::layered_grid(), spec);
    ASSERT_EQ(rep.cells.size(), 1u);
    EXPECT_EQ(rep.cells[0].n_records, 651u);
    EXPECT_TRUE(rep.cells[0].uia_consistent);
}

TEST(Sweep, EmptyCellIsReportedAndSkipped) {
    SweepSpec spec;
    spec.basal_ranges = {{0, 100}, {400, 500}};
    spec.apical_ranges = {{0, 100}};
    spec.methods = {Method::isx};
    const auto rep = run_sweep(fixtures::layered_grid(), spec);
    ASSERT_EQ(rep.cells.size(), 2u);
    EXPECT_TRUE(rep.cells[0].analysis.has_value());
    EXPECT_FALSE(rep.cells[1].analysis.has_value());
    EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(Sweep, MethodsAgreeOnUia) {
    SweepSpec spec;
    spec.basal_ranges = parse_ranges("0-100,0-150,0-200");
    spec.apical_ranges = parse_ranges("0-100,0-200");
    spec.threads = 3;
    const auto rep = run_sweep(fixtures::layered_grid(), spec);
    for (const auto& c : rep.cells) {
        ASSERT_TRUE(c.analysis.has_value());
        EXPECT_TRUE(c.uia_consistent) << c.basal.label() << " " << c.apical.label() << " spread " << c.uia_spread;
        EXPECT_EQ(c.method_uia.size(), 5u);
    }
}

TEST(Sweep, BifurcationsFollowBasalHighEnd) {
    auto cell = [](int hi, double uia) {
        SweepCell c;
        c.basal = {0, hi};
        c.apical = {0, 100};
        c.analysis = DistributionAnalysis{{}, std::nullopt, {}, fixtures::xor_gate()};
        c.uia = uia;
        return c;
    };
    // Spec order differs from (hi, lo) order on purpose.
    std::vector<SweepCell> cells{cell(150, 0.2), cell(100, -0.3), cell(140, -0.1), cell(200, 0.4)};
    const auto b = find_bifurcations(cells);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].basal_from, (GridRange{0, 140}));
    EXPECT_EQ(b[0].basal_to, (GridRange{0, 150}));
    EXPECT_EQ(uia_sign(1e-13), 0);
    // A zero cell between opposite signs yields one flip spanning it.
    std::vector<SweepCell> with_zero{cell(100, -0.3), cell(140, 0.0), cell(150, 0.2)};
    const auto bz = find_bifurcations(with_zero);
    ASSERT_EQ(bz.size(), 1u);
    EXPECT_EQ(bz[0].basal_from, (GridRange{0, 100}));
    EXPECT_TRUE(find_bifurcations({cell(100, 0.0), cell(150, 0.2)}).empty());
}

TEST(Sweep, MisalignedRangeIsFatal) {
    SweepSpec spec;
    spec.basal_ranges = {{0, 105}};
    spec.apical_ranges = {{0, 100}};
    EXPECT_THROW(run_sweep(fixtures::layered_grid(), spec), InvalidInput);
}

TEST(Ccs, DerivationsArePureFunctionsOfNumbers) {
    const CcsThresholds t;
    EXPECT_EQ(derive_ccs3(Ccs3Numbers{0.3, 0.01, 0.0, 0.2}, t), Tri::yes);
    EXPECT_EQ(derive_ccs3(Ccs3Numbers{0.3, -0.06, 0.0, 0.2}, t), Tri::no);
    EXPECT_EQ(derive_ccs3(Ccs3Numbers{0.1, 0.0, 0.5, 0.5}, t), Tri::no);
    EXPECT_EQ(derive_ccs3(Ccs3Numbers{0.3, 0.0, 0.05, 0.05}, t), Tri::no);
    EXPECT_EQ(derive_ccs3(std::nullopt, t), Tri::indeterminate);
    EXPECT_EQ(derive_ccs4({0.2, 0.5, 0.3}), Tri::yes);
    EXPECT_EQ(derive_ccs4({0.5, 0.4, 0.3}), Tri::no);
    EXPECT_EQ(derive_ccs4({0.2, 0.3, 0.4}), Tri::no);
    EXPECT_EQ(derive_ccs4({0.2, 0.3}), Tri::indeterminate);
    EXPECT_EQ(derive_ccs1(0, 0), Tri::indeterminate);
    EXPECT_EQ(derive_ccs1(3, 1), Tri::yes);
    EXPECT_EQ(derive_ccs2(3, 0), Tri::yes);
    EXPECT_EQ(derive_ccs2(3, 1), Tri::no);
}

TEST(Ccs, ClassifiesGridAndFlagsMissingZeroRows) {
    SweepSpec spec;
    spec.basal_ranges = parse_ranges("0-100,0-200,0-300");
    spec.apical_ranges = parse_ranges("0-200");
    spec.methods = {Method::ibroja, Method::isx};
    const auto grid = fixtures::layered_grid();
    const auto rep = classify_ccs(grid, spec, {});
    ASSERT_EQ(rep.verdicts.size(), 6u);
    for (const auto& v : rep.verdicts) {
        // Without apical input the cell fires only once basal input passes ~170.
        EXPECT_EQ(v.ccs1, v.basal.hi >= 200 ? Tri::yes : Tri::no);
        EXPECT_EQ(v.ccs2, Tri::yes);  // no basal input, no spikes
        EXPECT_EQ(v.ccs3, derive_ccs3(v.numbers, rep.thresholds));
        EXPECT_EQ(v.ccs4, derive_ccs4(v.ccs4_series));
        EXPECT_EQ(v.ccs4_series.size(), 3u);
    }
    std::vector<GridRecord> no_basal_zero;
    for (const auto& r : grid)
        if (r.n_basal != 0) no_basal_zero.push_back(r);
    spec.basal_ranges = parse_ranges("10-300");
    const auto rep2 = classify_ccs(no_basal_zero, spec, {});
    for (const auto& v : rep2.verdicts) EXPECT_EQ(v.ccs2, Tri::indeterminate);
}

TEST(Report, ConditionsFiles) {
    ConditionsConfig cfg;
    cfg.ledgers = true;
    cfg.methods = {Method::ibroja, Method::iccs};
    const auto rep = run_conditions(fixtures::basal_dominant_trials(3, 21), cfg);
    const auto dir = scratch("conditions");
    write_report(rep, dir);
    EXPECT_EQ(first_line(dir / "components.csv"), "unit,condition,method,component,value");
    for (const char* f : {"report.json", "measures.csv", "differences.csv", "tests.csv", "summaries.csv", "summary.txt"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    EXPECT_TRUE(std::filesystem::exists(dir / "ledgers" / "u01_control_iccs.csv"));
    // Long format: units x conditions x methods x components rows plus header.
    const auto comp = read_file(dir / "components.csv");
    EXPECT_EQ(std::count(comp.begin(), comp.end(), '\n'), 1 + 3 * 2 * 2 * 4);
    std::filesystem::remove_all(dir);
}

TEST(Report, SweepFilesAndJsonRoundTrip) {
    SweepSpec spec;
    spec.basal_ranges = parse_ranges("0-100,0-200");
    spec.apical_ranges = parse_ranges("0-100");
    spec.methods = {Method::idep, Method::ipm};
    const auto rep = run_sweep(fixtures::layered_grid(), spec);
    const auto dir = scratch("sweep");
    write_report(rep, dir);
    EXPECT_EQ(first_line(dir / "components.csv"), "basal_range,apical_range,method,component,value");
    EXPECT_EQ(first_line(dir / "uia.csv").substr(0, 25), "basal_range,apical_range,");
    const std::string text = read_file(dir / "report.json");
    EXPECT_EQ(nlohmann::json::parse(text).dump(2) + "\n", text);
    std::filesystem::remove_all(dir);
}

TEST(Report, UnwritableDestinationThrows) {
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    SweepSpec spec;
    spec.basal_ranges = parse_ranges("0-100");
    spec.apical_ranges = parse_ranges("0-100");
    spec.methods = {Method::ipm};
    const auto rep = run_sweep(fixtures::layered_grid(), spec);
    EXPECT_THROW(write_report(rep, blocker / "sub"), std::runtime_error);
    std::filesystem::remove(blocker);
}

TEST(Report, FormatG6) {
    EXPECT_EQ(format_g6(1.0 / 3.0), "0.333333");
    EXPECT_EQ(format_g6(123456789.0), "1.23457e+08");
    EXPECT_EQ(format_g6(0.0), "0");
}
