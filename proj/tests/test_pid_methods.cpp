#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pidcmp/broja.hpp"
#include "pidcmp/dep.hpp"
#include "pidcmp/pointwise.hpp"
#include "synthetic.hpp"

using namespace pidcmp;

namespace {

std::vector<double> pmf_of(const JointDistribution& d) { return {d.pmf().begin(), d.pmf().end()}; }

void expect_pid(const PidComponents& c, double ub, double ua, double sh, double sy, double tol) {
    EXPECT_NEAR(c.unq_b, ub, tol) << to_string(c.method);
    EXPECT_NEAR(c.unq_a, ua, tol) << to_string(c.method);
    EXPECT_NEAR(c.shd, sh, tol) << to_string(c.method);
    EXPECT_NEAR(c.syn, sy, tol) << to_string(c.method);
}

}  // namespace

// ------------------------------------------------------------------- BROJA

TEST(Broja, CanonicalGates) {
    expect_pid(pid_broja(fixtures::xor_gate()), 0, 0, 0, 1, 1e-6);
    expect_pid(pid_broja(fixtures::copy_gate()), 0, 0, 1, 0, 1e-6);
    expect_pid(pid_broja(fixtures::unq_gate()), 1, 0, 0, 0, 1e-6);
}

TEST(Broja, ObjectiveOnSpecialCases) {
    // Fully independent: P is already minimal.
    std::vector<double> w(12);
    const double py[] = {0.2, 0.8}, pb[] = {0.5, 0.5}, pa[] = {0.1, 0.3, 0.6};
    for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t a = 0; a < 3; ++a) w[(y * 2 + b) * 3 + a] = py[y] * pb[b] * pa[a];
    EXPECT_NEAR(minimize_joint_mi(fixtures::make(w, 2, 2, 3)).report.objective, 0.0, 1e-7);
    EXPECT_NEAR(minimize_joint_mi(fixtures::xor_gate()).report.objective, 0.0, 1e-7);
    // Y = B = A: the polytope is a single point.
    const auto copy = minimize_joint_mi(fixtures::copy_gate());
    EXPECT_NEAR(copy.report.objective, 1.0, 1e-7);
    EXPECT_NEAR(copy.q(0, 0, 0), 0.5, 1e-9);
    EXPECT_NEAR(copy.q(1, 1, 1), 0.5, 1e-9);
}

TEST(Broja, SolutionIsFeasibleAndCertified) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        const std::size_t ny = 2 + rng() % 3, nb = 2 + rng() % 3, na = 2 + rng() % 3;
        const auto d = fixtures::make(fixtures::dirichlet(rng, ny * nb * na, 0.7), ny, nb, na);
        const auto sol = minimize_joint_mi(d);
        EXPECT_TRUE(sol.report.converged);
        EXPECT_LE(sol.report.gap_bound, 1e-7);
        EXPECT_LE(MarginalConstraints::of(d).max_violation(sol.q), 1e-9);
        for (double v : sol.q.pmf()) EXPECT_GE(v, 0.0);
        EXPECT_LE(sol.report.objective, summarize(d).jmi + 1e-9);
        EXPECT_FALSE(sol.report.objective_trace.empty());
    }
}

TEST(Broja, NeverBeatenByGridSearch) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 6; ++t) {
        const auto d = fixtures::make(fixtures::dirichlet(rng, 8, 1.0), 2, 2, 2);
        const double grid = oracle::broja_grid_min(pmf_of(d), {2, 2, 2}, 1e-3);
        EXPECT_LE(minimize_joint_mi(d).report.objective, grid + 1e-6);
    }
}

TEST(Broja, ComponentsNonnegativeAndSynergyBound) {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 30; ++t) {
        const auto d = fixtures::make(fixtures::dirichlet(rng, 27, 0.4), 3, 3, 3);
        const auto c = pid_broja(d);
        const auto s = summarize(d);
        for (double v : c.values()) EXPECT_GE(v, -1e-7);
        if (s.ii > 0) EXPECT_GE(c.syn, s.ii - 1e-5);
        EXPECT_NEAR(c.unq_b - c.unq_a, s.mi_yb - s.mi_ya, 1e-5);
    }
}

TEST(Broja, RejectsBadSettings) {
    BrojaSettings bad;
    bad.max_iterations = 0;
    EXPECT_THROW(minimize_joint_mi(fixtures::xor_gate(), bad), InvalidInput);
}

// --------------------------------------------------------------------- Idep

TEST(DependencyLattice, HasEightNodesAndTwelveEdges) {
    const auto& lat = DependencyLattice::trivariate();
    EXPECT_EQ(lat.nodes().size(), 8u);
    EXPECT_EQ(lat.edges().size(), 12u);
    for (const auto& e : lat.edges()) {
        EXPECT_TRUE(lat.nodes()[e.upper].implies(lat.nodes()[e.lower]));
        EXPECT_FALSE(lat.nodes()[e.lower].implies(lat.nodes()[e.upper]));
    }
    EXPECT_EQ(lat.edges_adding(Var::Y | Var::B).size(), 4u);
    EXPECT_EQ(lat.edges_adding(Var::Y | Var::A).size(), 4u);
}

TEST(ConstraintSet, Validation) {
    EXPECT_THROW(ConstraintSet({Var::Y | Var::B}), InvalidInput);                    // A uncovered
    EXPECT_THROW(ConstraintSet({Var::Y | Var::B, VarSet(Var::B), VarSet(Var::A)}), InvalidInput);  // not antichain
    EXPECT_THROW(ConstraintSet({VarSet::all()}), InvalidInput);
    EXPECT_NO_THROW(ConstraintSet({Var::Y | Var::B, Var::Y | Var::A}));
}

TEST(Maxent, PairwiseFitMatchesMarginalsAndIndependentIpf) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 15; ++t) {
        const auto d = fixtures::make(fixtures::dirichlet(rng, 24, 0.6), 3, 4, 2);
        const auto q = pairwise_maxent(d);
        const auto ref = oracle::pairwise_ipf(pmf_of(d), {3, 4, 2});
        for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(q.pmf()[i], ref[i], 1e-7);
        for (VarSet pair : {Var::Y | Var::B, Var::Y | Var::A, Var::B | Var::A}) {
            const auto mp = marginal(d, pair), mq = marginal(q, pair);
            for (std::size_t i = 0; i < mp.size(); ++i) EXPECT_NEAR(mp[i], mq[i], 1e-9);
        }
    }
}

TEST(Maxent, FixedPointOnFactorizedInput) {
    // p(y,b) p(a|b) already is the maxent model of its pairwise marginals.
    std::mt19937_64 rng(59);
    const auto yb = fixtures::dirichlet(rng, 6, 1.0);
    const auto ab = fixtures::dirichlet(rng, 9, 1.0);
    std::vector<double> w(18);
    for (std::size_t b = 0; b < 3; ++b) {
        double col = 0;
        for (std::size_t a = 0; a < 3; ++a) col += ab[b * 3 + a];
        for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t a = 0; a < 3; ++a) w[(y * 3 + b) * 3 + a] = yb[y * 3 + b] * ab[b * 3 + a] / col;
    }
    const auto d = fixtures::make(w, 2, 3, 3);
    const auto q = pairwise_maxent(d);
    for (std::size_t i = 0; i < 18; ++i) EXPECT_NEAR(q.pmf()[i], d.pmf()[i], 1e-9);
}

TEST(Maxent, EntropyIsLocallyMaximal) {
    // Moves along directions that keep every pairwise marginal fixed never
    // raise the entropy of the fitted distribution.
    std::mt19937_64 rng(29);
    const auto d = fixtures::make(fixtures::dirichlet(rng, 8, 2.0), 2, 2, 2);
    const auto q = pairwise_maxent(d);
    std::vector<double> dir(8);
    for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) dir[static_cast<std::size_t>((y * 2 + b) * 2 + a)] = ((y + b + a) % 2) ? -1 : 1;
    const double h0 = entropy(q.pmf());
    for (double eps : {1e-4, -1e-4, 1e-3, -1e-3}) {
        std::vector<double> w(8);
        for (std::size_t i = 0; i < 8; ++i) w[i] = q.pmf()[i] + eps * dir[i];
        EXPECT_LE(entropy(std::span<const double>(w)), h0 + 1e-12);
    }
}

TEST(Idep, CanonicalGates) {
    expect_pid(pid_dep(fixtures::xor_gate()), 0, 0, 0, 1, 1e-6);
    expect_pid(pid_dep(fixtures::copy_gate()), 0, 0, 1, 0, 1e-6);
    expect_pid(pid_dep(fixtures::unq_gate()), 1, 0, 0, 0, 1e-6);
}

TEST(Idep, MatchesClosedForm) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 25; ++t) {
        const std::size_t ny = 2 + rng() % 3, nb = 2 + rng() % 3, na = 2 + rng() % 2;
        const auto d = fixtures::make(fixtures::dirichlet(rng, ny * nb * na, 1.0), ny, nb, na);
        const auto ref = oracle::idep_closed_form(pmf_of(d), {ny, nb, na});
        expect_pid(pid_dep(d), ref.unq_b, ref.unq_a, ref.shd, ref.syn, 1e-6);
    }
}

// ---------------------------------------------------------------- pointwise

TEST(Pointwise, CanonicalGates) {
    expect_pid(pid_ccs(fixtures::xor_gate()).components, 0, 0, 0, 1, 1e-6);
    expect_pid(pid_ccs(fixtures::copy_gate()).components, 0, 0, 1, 0, 1e-6);
    expect_pid(pid_ccs(fixtures::unq_gate()).components, 1, 0, 0, 0, 1e-6);
    expect_pid(pid_pm(fixtures::xor_gate()).components, 0, 0, 0, 1, 1e-9);
    expect_pid(pid_pm(fixtures::copy_gate()).components, 0, 0, 1, 0, 1e-9);
    const double l3 = std::log2(3.0);
    expect_pid(pid_sx(fixtures::xor_gate()).components, l3 - 1, l3 - 1, 1 - l3, 2 - l3, 1e-9);
    expect_pid(pid_sx(fixtures::copy_gate()).components, 0, 0, 1, 0, 1e-9);
}

TEST(Pointwise, PmOnUnqGateSplitsIntoInformationAndMisinformation) {
    // Ipm credits B and A with the same specificity, so the unique bit shows
    // up as shared information offset by misinformation from A.
    expect_pid(pid_pm(fixtures::unq_gate()).components, 0, -1, 1, 1, 1e-9);
}

TEST(Pointwise, LedgerColumnsSumToComponents) {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 10; ++t) {
        const auto d = fixtures::make(fixtures::dirichlet(rng, 18, 0.8), 2, 3, 3);
        for (auto res : {pid_ccs(d, true), pid_pm(d, true), pid_sx(d, true)}) {
            ASSERT_TRUE(res.ledger.has_value());
            const auto sums = res.ledger->column_sums();
            const auto v = res.components.values();
            for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sums[i], v[i], 1e-9) << to_string(res.components.method);
        }
    }
}

TEST(Pointwise, LedgerCsvHeader) {
    std::ostringstream os;
    const auto d = fixtures::xor_gate();
    pid_pm(d, true).ledger->write_csv(os, d);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "y,b,a,p,local_shd,local_unqb,local_unqa,local_syn");
}

TEST(Pointwise, IdentitiesHoldOnRandomDistributions) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
        const auto d = fixtures::make(fixtures::dirichlet(rng, 36, 0.5), 3, 4, 3);
        const auto s = summarize(d);
        EXPECT_LE(consistency_residuals(pid_pm(d).components, s).max_abs(), 1e-9);
        EXPECT_LE(consistency_residuals(pid_sx(d).components, s).max_abs(), 1e-9);
        EXPECT_LE(consistency_residuals(pid_ccs(d).components, s).max_abs(), 1e-5);
    }
}
