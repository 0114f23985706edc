#include "pidcmp/pointwise.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

namespace pidcmp {

namespace {

// Marginals of one distribution, indexed like the joint.
struct Marginals {
    std::size_t nb, na;
    std::vector<double> y, b, a, yb, ya, ba;

    explicit Marginals(const JointDistribution& d)
        : nb(d.nb()), na(d.na()), y(d.ny()), b(nb), a(na), yb(d.ny() * nb), ya(d.ny() * na), ba(nb * na) {
        for (std::size_t iy = 0; iy < d.ny(); ++iy) {
            for (std::size_t ib = 0; ib < nb; ++ib) {
                for (std::size_t ia = 0; ia < na; ++ia) {
                    const double p = d(iy, ib, ia);
                    y[iy] += p;
                    b[ib] += p;
                    a[ia] += p;
                    yb[iy * nb + ib] += p;
                    ya[iy * na + ia] += p;
                    ba[ib * na + ia] += p;
                }
            }
        }
    }

    double i_yb(Realization r) const { return std::log2(yb[r.y * nb + r.b] / (y[r.y] * b[r.b])); }
    double i_ya(Realization r) const { return std::log2(ya[r.y * na + r.a] / (y[r.y] * a[r.a])); }
};

// Visits every realization with positive probability under `d`.
void for_support(const JointDistribution& d, const std::function<void(Realization, double)>& f) {
    for (std::size_t y = 0; y < d.ny(); ++y) {
        for (std::size_t b = 0; b < d.nb(); ++b) {
            for (std::size_t a = 0; a < d.na(); ++a) {
                const double p = d(y, b, a);
                if (p > 0.0) f({y, b, a}, p);
            }
        }
    }
}

double i_yb_given_a(const JointDistribution& d, const Marginals& m, Realization r) {
    return std::log2(d(r.y, r.b, r.a) * m.a[r.a] / (m.ya[r.y * m.na + r.a] * m.ba[r.b * m.na + r.a]));
}

// Shared term averaged under p, with the ledger closed by the local identities.
PointwiseResult assemble(const JointDistribution& dist, Method method, bool with_ledger,
                         const std::function<double(Realization)>& local_shd) {
    const Marginals m(dist);
    double shd = 0.0;
    PointwiseLedger ledger;
    for_support(dist, [&](Realization r, double p) {
        const double s = local_shd(r);
        shd += p * s;
        if (with_ledger) {
            LedgerRow row{r, p, s, 0.0, 0.0, 0.0};
            row.local_unqb = m.i_yb(r) - s;
            row.local_unqa = m.i_ya(r) - s;
            row.local_syn = i_yb_given_a(dist, m, r) - row.local_unqb;
            ledger.rows.push_back(row);
        }
    });
    PointwiseResult res{from_shared(dist, shd, method), std::nullopt};
    if (with_ledger) res.ledger = std::move(ledger);
    return res;
}

bool agrees(double v, double c) { return std::abs(v) <= kNegativeSlack || (v > 0.0) == (c > 0.0); }

}  // namespace

std::array<double, 4> PointwiseLedger::column_sums() const {
    std::array<double, 4> s{};
    for (const auto& r : rows) {
        s[0] += r.p * r.local_unqb;
        s[1] += r.p * r.local_unqa;
        s[2] += r.p * r.local_shd;
        s[3] += r.p * r.local_syn;
    }
    return s;
}

void PointwiseLedger::write_csv(std::ostream& out, const JointDistribution& dist) const {
    out << "y,b,a,p,local_shd,local_unqb,local_unqa,local_syn\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g,%.6g\n", r.p, r.local_shd, r.local_unqb, r.local_unqa,
                      r.local_syn);
        out << dist.alphabet(Var::Y).label(r.r.y) << ',' << dist.alphabet(Var::B).label(r.r.b) << ','
            << dist.alphabet(Var::A).label(r.r.a) << ',' << buf;
    }
}

PointwiseResult pid_ccs(const JointDistribution& dist, bool with_ledger, const MaxentSettings& fit) {
    const JointDistribution sur = pairwise_maxent(dist, fit);
    const Marginals ms(sur);
    const Marginals mp(dist);

    double shd = 0.0;
    PointwiseLedger ledger;
    for (std::size_t y = 0; y < dist.ny(); ++y) {
        for (std::size_t b = 0; b < dist.nb(); ++b) {
            for (std::size_t a = 0; a < dist.na(); ++a) {
                const Realization r{y, b, a};
                const double q = sur(y, b, a), p = dist(y, b, a);
                if (!(q > 0.0)) {
                    if (p > 0.0) throw ConsistencyError("pairwise surrogate lost support of the data");
                    continue;
                }
                const double ib = ms.i_yb(r), ia = ms.i_ya(r);
                const double iba = std::log2(q / (ms.y[y] * ms.ba[b * ms.na + a]));
                const double c = ib + ia - iba;
                const bool counts = std::abs(c) > kNegativeSlack && agrees(ib, c) && agrees(ia, c) && agrees(iba, c);
                const double s = counts ? c : 0.0;
                shd += q * s;
                if (with_ledger) {
                    LedgerRow row{r, q, s, ib - s, ia - s, 0.0};
                    // Reweighted so the column sum is the observed I(Y;B|A).
                    const double cond = p > 0.0 ? (p / q) * i_yb_given_a(dist, mp, r) : 0.0;
                    row.local_syn = cond - row.local_unqb;
                    ledger.rows.push_back(row);
                }
            }
        }
    }
    PointwiseResult res{from_shared(dist, shd, Method::iccs), std::nullopt};
    if (with_ledger) res.ledger = std::move(ledger);
    return res;
}

PointwiseResult pid_pm(const JointDistribution& dist, bool with_ledger) {
    const Marginals m(dist);
    return assemble(dist, Method::ipm, with_ledger, [&](Realization r) {
        const double spec = std::min(-std::log2(m.b[r.b]), -std::log2(m.a[r.a]));
        const double amb = std::min(-std::log2(m.yb[r.y * m.nb + r.b] / m.y[r.y]),
                                    -std::log2(m.ya[r.y * m.na + r.a] / m.y[r.y]));
        return spec - amb;
    });
}

PointwiseResult pid_sx(const JointDistribution& dist, bool with_ledger) {
    const Marginals m(dist);
    return assemble(dist, Method::isx, with_ledger, [&](Realization r) {
        const double p_union = m.b[r.b] + m.a[r.a] - m.ba[r.b * m.na + r.a];
        const double py_union = m.yb[r.y * m.nb + r.b] + m.ya[r.y * m.na + r.a] - dist(r.y, r.b, r.a);
        return std::log2(py_union / (p_union * m.y[r.y]));
    });
}

}  // namespace pidcmp
