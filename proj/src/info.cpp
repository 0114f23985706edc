#include "pidcmp/info.hpp"

#include <cmath>
#include <string>

namespace pidcmp {

namespace {

double nonnegative(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v >= -kNegativeSlack) return 0.0;
    throw ConsistencyError(std::string(what) + " evaluated to " + std::to_string(v) + " bits");
}

}  // namespace

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return h;
}

double entropy(const Table& t) { return entropy(t.data()); }

double entropy(const JointDistribution& dist, VarSet vars) {
    if (vars == VarSet::all()) return entropy(dist.pmf());
    return entropy(marginal(dist, vars));
}

double mutual_information(const JointDistribution& dist, Var x1, Var x2) {
    if (x1 == x2) throw InvalidInput("mutual_information: repeated variable");
    const double v = entropy(dist, x1) + entropy(dist, x2) - entropy(dist, x1 | x2);
    return nonnegative(v, "mutual information");
}

double conditional_mi(const JointDistribution& dist, Var x1, Var x2, Var given) {
    if (x1 == x2 || x1 == given || x2 == given) throw InvalidInput("conditional_mi: repeated variable");
    const double v = entropy(dist, x1 | given) + entropy(dist, x2 | given) - entropy(dist, VarSet(given)) -
                     entropy(dist, VarSet::all());
    return nonnegative(v, "conditional mutual information");
}

double joint_mi(const JointDistribution& dist) {
    const double v = entropy(dist, Var::Y) + entropy(dist, Var::B | Var::A) - entropy(dist, VarSet::all());
    return nonnegative(v, "joint mutual information");
}

double interaction_information(const JointDistribution& dist) {
    return joint_mi(dist) - mutual_information(dist, Var::Y, Var::B) - mutual_information(dist, Var::Y, Var::A);
}

LocalTerm local_mi(const JointDistribution& dist, VarSet u, VarSet v, Realization r) {
    if (u.empty() || v.empty() || !(u & v).empty()) {
        throw InvalidInput("local_mi: variable groups must be nonempty and disjoint");
    }
    if (r.y >= dist.ny() || r.b >= dist.nb() || r.a >= dist.na()) throw InvalidInput("local_mi: index out of range");

    // Probability of the realization restricted to `vars`.
    auto prob = [&](VarSet vars) {
        double p = 0.0;
        for (std::size_t y = 0; y < dist.ny(); ++y) {
            if (vars.contains(Var::Y) && y != r.y) continue;
            for (std::size_t b = 0; b < dist.nb(); ++b) {
                if (vars.contains(Var::B) && b != r.b) continue;
                for (std::size_t a = 0; a < dist.na(); ++a) {
                    if (vars.contains(Var::A) && a != r.a) continue;
                    p += dist(y, b, a);
                }
            }
        }
        return p;
    };

    const double puv = prob(u | v);
    if (puv <= 0.0) throw InvalidInput("local_mi: realization has zero probability");
    const double pu = prob(u), pv = prob(v);
    return {r, puv, std::log2(puv / (pu * pv))};
}

InfoSummary summarize(const JointDistribution& dist) {
    const double hy = entropy(dist, Var::Y);
    const double hb = entropy(dist, Var::B);
    const double ha = entropy(dist, Var::A);
    const double hyb = entropy(dist, Var::Y | Var::B);
    const double hya = entropy(dist, Var::Y | Var::A);
    const double hba = entropy(dist, Var::B | Var::A);
    const double hyba = entropy(dist, VarSet::all());

    InfoSummary s;
    s.h_y = hy;
    s.jmi = nonnegative(hy + hba - hyba, "joint mutual information");
    s.cmi_yb_given_a = nonnegative(hya + hba - ha - hyba, "I(Y;B|A)");
    s.cmi_ya_given_b = nonnegative(hyb + hba - hb - hyba, "I(Y;A|B)");
    s.mi_yb = nonnegative(hy + hb - hyb, "I(Y;B)");
    s.mi_ya = nonnegative(hy + ha - hya, "I(Y;A)");
    s.ii = s.jmi - s.mi_yb - s.mi_ya;
    return s;
}

InfoSummary normalize_summary(const InfoSummary& s) {
    if (s.normalized) throw InvalidInput("summary is already normalized");
    if (!(s.jmi > 0.0)) throw InvalidInput("joint mutual information is zero; nothing to normalize by");
    InfoSummary n;
    n.h_y = s.h_y / s.jmi;
    n.mi_yb = s.mi_yb / s.jmi;
    n.mi_ya = s.mi_ya / s.jmi;
    n.cmi_yb_given_a = s.cmi_yb_given_a / s.jmi;
    n.cmi_ya_given_b = s.cmi_ya_given_b / s.jmi;
    n.jmi = 1.0;
    n.ii = s.ii / s.jmi;
    n.normalized = true;
    return n;
}

}  // namespace pidcmp
