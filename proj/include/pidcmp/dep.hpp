#pragma once
// Dependency-lattice decomposition (Idep).
//
// Nodes are sets of marginal constraints on (Y, B, A); each is realized by
// the maximum-entropy distribution matching the data on those marginals.
// The unique information of B is the smallest increase of I(Y;B,A) over the
// lattice edges that add the {B,Y} constraint.

#include <vector>

#include "pidcmp/distribution.hpp"
#include "pidcmp/pid.hpp"

namespace pidcmp {

/// Antichain of variable subsets drawn from {B},{A},{Y},{B,A},{B,Y},{A,Y}
/// whose union is {Y,B,A}. Members are kept sorted by bit mask.
class ConstraintSet {
public:
    explicit ConstraintSet(std::vector<VarSet> members);

    const std::vector<VarSet>& members() const { return members_; }
    bool has(VarSet s) const;
    /// True when every member of `other` is contained in a member of this set.
    bool implies(const ConstraintSet& other) const;
    std::string to_string() const;

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

private:
    std::vector<VarSet> members_;
};

struct LatticeEdge {
    std::size_t lower = 0;
    std::size_t upper = 0;
};

class DependencyLattice {
public:
    /// The eight-node, twelve-edge lattice for two inputs and one output.
    static const DependencyLattice& trivariate();

    const std::vector<ConstraintSet>& nodes() const { return nodes_; }
    const std::vector<LatticeEdge>& edges() const { return edges_; }
    /// Edges whose upper node contains `s` and whose lower node does not.
    std::vector<LatticeEdge> edges_adding(VarSet s) const;

private:
    DependencyLattice();
    std::vector<ConstraintSet> nodes_;
    std::vector<LatticeEdge> edges_;
};

struct MaxentSettings {
    double tol = 1e-10;
    int max_sweeps = 10000;
};

/// Maximum-entropy distribution sharing `dist`'s marginals on every member
/// of `cs`, by iterative proportional fitting. Throws ConsistencyError when
/// the fit does not reach `tol` within the sweep budget.
JointDistribution maxent_fit(const JointDistribution& dist, const ConstraintSet& cs, const MaxentSettings& cfg = {});

/// The surrogate matching all three pairwise marginals.
JointDistribution pairwise_maxent(const JointDistribution& dist, const MaxentSettings& cfg = {});

PidComponents pid_dep(const JointDistribution& dist, const MaxentSettings& cfg = {});

}  // namespace pidcmp
