#pragma once
// Unique information via the minimum of I_Q(Y; B, A) over the polytope of
// distributions Q that share the (Y,B) and (Y,A) marginals of the data:
//
//   UnqB = I_Q*(Y;B|A),  UnqA = I_Q*(Y;A|B),  Syn = I_P(Y;B,A) - I_Q*(Y;B,A)
//
// The objective is convex on the polytope, so a certified local minimum is
// global. The solver walks the central path of a log-barrier problem with
// Newton steps that keep the marginal constraints, and certifies the result
// with a Frank-Wolfe duality gap bound.

#include <stdexcept>
#include <string>
#include <vector>

#include "pidcmp/distribution.hpp"
#include "pidcmp/pid.hpp"

namespace pidcmp {

/// The two (output, single input) marginals that define the feasible set.
struct MarginalConstraints {
    Table target_yb;
    Table target_ya;

    static MarginalConstraints of(const JointDistribution& dist);
    /// Largest entrywise deviation of `q`'s pairwise marginals from the targets.
    double max_violation(const JointDistribution& q) const;
};

struct BrojaSettings {
    int max_iterations = 50000;      ///< Newton steps across all barrier stages
    double feasibility_tol = 1e-10;  ///< entrywise, on both pairwise marginals
    double optimality_tol = 1e-7;    ///< bits, bound on the Frank-Wolfe gap
    double initial_barrier = 1e-3;
    double barrier_shrink = 0.1;
};

struct SolverReport {
    double objective = 0.0;  ///< I_Q(Y;B,A) in bits at the returned point
    int iterations = 0;
    double max_constraint_violation = 0.0;
    double gap_bound = 0.0;  ///< upper bound on the Frank-Wolfe gap, bits
    bool converged = false;
    std::vector<double> objective_trace;  ///< objective after each barrier stage
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolverReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const SolverReport& report() const { return report_; }

private:
    SolverReport report_;
};

struct BrojaSolution {
    JointDistribution q;
    SolverReport report;
};

/// Minimizes I_Q(Y;B,A) over Q sharing P's (Y,B) and (Y,A) marginals.
/// Throws SolverError when the gap cannot be certified within budget.
BrojaSolution minimize_joint_mi(const JointDistribution& dist, const BrojaSettings& cfg = {});

PidComponents pid_broja(const JointDistribution& dist, const BrojaSettings& cfg = {});

}  // namespace pidcmp
