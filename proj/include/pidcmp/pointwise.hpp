#pragma once
// Pointwise decompositions. Each defines a local shared term per realization
// and averages it; the other components follow from the linking identities,
// so any of them may come out negative (misinformation).

#include <optional>
#include <ostream>
#include <vector>

#include "pidcmp/dep.hpp"
#include "pidcmp/info.hpp"
#include "pidcmp/pid.hpp"

namespace pidcmp {

struct LedgerRow {
    Realization r;
    double p = 0.0;  ///< weight of the row in the column sums
    double local_shd = 0.0;
    double local_unqb = 0.0;
    double local_unqa = 0.0;
    double local_syn = 0.0;
};

/// Per-realization contributions; weighted column sums give the components.
struct PointwiseLedger {
    std::vector<LedgerRow> rows;

    /// Weighted sums in the order unq_b, unq_a, shd, syn.
    std::array<double, 4> column_sums() const;
    /// CSV `y,b,a,p,local_shd,local_unqb,local_unqa,local_syn` with alphabet labels.
    void write_csv(std::ostream& out, const JointDistribution& dist) const;
};

struct PointwiseResult {
    PidComponents components;
    std::optional<PointwiseLedger> ledger;
};

/// Common change in surprisal, evaluated and weighted on the pairwise
/// maximum-entropy surrogate.
PointwiseResult pid_ccs(const JointDistribution& dist, bool with_ledger = false, const MaxentSettings& fit = {1e-12, 10000});
/// Minimum specificity minus minimum ambiguity.
PointwiseResult pid_pm(const JointDistribution& dist, bool with_ledger = false);
/// Shared exclusions: the union event {B=b} or {A=a}.
PointwiseResult pid_sx(const JointDistribution& dist, bool with_ledger = false);

}  // namespace pidcmp
