#include "pidcmp/broja.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pidcmp {

MarginalConstraints MarginalConstraints::of(const JointDistribution& dist) {
    return {marginal(dist, Var::Y | Var::B), marginal(dist, Var::Y | Var::A)};
}

double MarginalConstraints::max_violation(const JointDistribution& q) const {
    const Table qyb = marginal(q, Var::Y | Var::B);
    const Table qya = marginal(q, Var::Y | Var::A);
    if (qyb.size() != target_yb.size() || qya.size() != target_ya.size()) {
        throw InvalidInput("distribution shape does not match the marginal constraints");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < qyb.size(); ++i) worst = std::max(worst, std::abs(qyb[i] - target_yb[i]));
    for (std::size_t i = 0; i < qya.size(); ++i) worst = std::max(worst, std::abs(qya[i] - target_ya[i]));
    return worst;
}

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// The feasible set restricted to cells that can be positive: (y,b,a) with
// P(y,b) > 0 and P(y,a) > 0. Constraints are one row per positive P(y,b) and
// one per positive P(y,a) except the last a of each y (the dropped row is
// implied by the others).
struct Polytope {
    std::vector<double> py;
    std::vector<std::size_t> cell;  // pmf index per variable
    std::vector<std::size_t> var_y;
    std::vector<int> row_b, row_a;  // row_a is -1 for the dropped constraint
    std::vector<std::size_t> slot_b, slot_a;  // every (y,b) and (y,a), none dropped
    std::vector<double> target_b, target_a;
    std::vector<std::vector<std::size_t>> columns;  // variables sharing (b, a)
    std::vector<double> rhs;
    std::vector<double> start;

    std::size_t n() const { return cell.size(); }
    std::size_t m() const { return rhs.size(); }
};

Polytope build_polytope(const JointDistribution& dist) {
    const std::size_t ny = dist.ny(), nb = dist.nb(), na = dist.na();
    const Table yb = marginal(dist, Var::Y | Var::B);
    const Table ya = marginal(dist, Var::Y | Var::A);
    const Table y_only = marginal(dist, Var::Y);

    Polytope P;
    P.py.assign(y_only.data().begin(), y_only.data().end());
    std::vector<std::vector<std::size_t>> by_column(nb * na);
    for (std::size_t y = 0; y < ny; ++y) {
        if (P.py[y] <= 0.0) continue;
        std::vector<std::size_t> bs, as;
        for (std::size_t b = 0; b < nb; ++b) {
            if (yb[y * nb + b] > 0.0) bs.push_back(b);
        }
        for (std::size_t a = 0; a < na; ++a) {
            if (ya[y * na + a] > 0.0) as.push_back(a);
        }
        std::vector<int> rb(nb, -1), ra(na, -1);
        std::vector<std::size_t> sb(nb), sa(na);
        for (std::size_t b : bs) {
            sb[b] = P.target_b.size();
            P.target_b.push_back(yb[y * nb + b]);
        }
        for (std::size_t a : as) {
            sa[a] = P.target_a.size();
            P.target_a.push_back(ya[y * na + a]);
        }
        for (std::size_t b : bs) {
            rb[b] = static_cast<int>(P.rhs.size());
            P.rhs.push_back(yb[y * nb + b]);
        }
        for (std::size_t i = 0; i + 1 < as.size(); ++i) {
            ra[as[i]] = static_cast<int>(P.rhs.size());
            P.rhs.push_back(ya[y * na + as[i]]);
        }
        for (std::size_t b : bs) {
            for (std::size_t a : as) {
                const std::size_t k = P.cell.size();
                P.cell.push_back(dist.index(y, b, a));
                P.var_y.push_back(y);
                P.row_b.push_back(rb[b]);
                P.row_a.push_back(ra[a]);
                P.slot_b.push_back(sb[b]);
                P.slot_a.push_back(sa[a]);
                P.start.push_back(yb[y * nb + b] * ya[y * na + a] / P.py[y]);
                by_column[b * na + a].push_back(k);
            }
        }
    }
    for (auto& col : by_column) {
        if (!col.empty()) P.columns.push_back(std::move(col));
    }
    return P;
}

// Alternating row/column rescaling within each output slice. Newton steps
// keep the constraints only up to the accuracy of the Schur solve, which
// degrades as the barrier weight shrinks; this removes the drift while
// keeping every entry positive.
void restore_marginals(const Polytope& P, std::vector<double>& x) {
    std::vector<double> sb(P.target_b.size()), sa(P.target_a.size());
    for (int sweep = 0; sweep < 100; ++sweep) {
        std::fill(sb.begin(), sb.end(), 0.0);
        for (std::size_t k = 0; k < P.n(); ++k) sb[P.slot_b[k]] += x[k];
        for (std::size_t k = 0; k < P.n(); ++k) x[k] *= P.target_b[P.slot_b[k]] / sb[P.slot_b[k]];
        std::fill(sa.begin(), sa.end(), 0.0);
        for (std::size_t k = 0; k < P.n(); ++k) sa[P.slot_a[k]] += x[k];
        double worst = 0.0;
        for (std::size_t i = 0; i < sa.size(); ++i) worst = std::max(worst, std::abs(sa[i] / P.target_a[i] - 1.0));
        for (std::size_t k = 0; k < P.n(); ++k) x[k] *= P.target_a[P.slot_a[k]] / sa[P.slot_a[k]];
        if (worst < 1e-15) break;
    }
}

// I_Q(Y;B,A) in nats: sum over cells of q log(q / (q(b,a) p(y))).
double objective(const Polytope& P, const std::vector<double>& x) {
    double f = 0.0;
    for (const auto& col : P.columns) {
        double s = 0.0;
        for (std::size_t k : col) s += x[k];
        if (s <= 0.0) continue;
        for (std::size_t k : col) {
            if (x[k] > 0.0) f += x[k] * std::log(x[k] / (s * P.py[P.var_y[k]]));
        }
    }
    return f;
}

double barrier_value(const Polytope& P, const std::vector<double>& x, double mu) {
    double logs = 0.0;
    for (double v : x) logs += std::log(v);
    return objective(P, x) - mu * logs;
}

// Gradient of the objective: log q(y|b,a) - log p(y).
std::vector<double> gradient(const Polytope& P, const std::vector<double>& x) {
    std::vector<double> g(P.n());
    for (const auto& col : P.columns) {
        double s = 0.0;
        for (std::size_t k : col) s += x[k];
        for (std::size_t k : col) g[k] = std::log(x[k] / (s * P.py[P.var_y[k]]));
    }
    return g;
}

struct NewtonStep {
    std::vector<double> direction;
    Eigen::VectorXd multipliers;
    double slope = 0.0;  // directional derivative of the barrier function
};

// Solves the barrier KKT system  H d + A^T l = -grad,  A d = rhs - A x.
// Each column (b,a) contributes a Hessian block diag(1/x + mu/x^2) - 11^T/s,
// inverted in closed form (Sherman-Morrison), and the multipliers come from
// the dense Schur complement A H^-1 A^T. H^-1 carries a 1/mu scale along
// column rescalings, so the Schur solution is refined against residuals of
// the unreduced system, where H appears without that scale.
NewtonStep newton_step(const Polytope& P, const std::vector<double>& x, double mu) {
    const std::size_t n = P.n(), m = P.m();
    const auto mi = static_cast<Eigen::Index>(m);
    const std::vector<double> g = gradient(P, x);
    std::vector<double> grad(n), w(n), col_den(P.columns.size()), col_mass(P.columns.size());
    for (std::size_t k = 0; k < n; ++k) {
        grad[k] = g[k] - mu / x[k];
        w[k] = x[k] * x[k] / (x[k] + mu);
    }
    for (std::size_t c = 0; c < P.columns.size(); ++c) {
        for (std::size_t k : P.columns[c]) {
            col_den[c] += x[k] * mu / (x[k] + mu);
            col_mass[c] += x[k];
        }
    }

    auto apply_h = [&](const std::vector<double>& v) {
        std::vector<double> out(n);
        for (std::size_t c = 0; c < P.columns.size(); ++c) {
            double t = 0.0;
            for (std::size_t k : P.columns[c]) t += v[k];
            t /= col_mass[c];
            for (std::size_t k : P.columns[c]) out[k] = (1.0 / x[k] + mu / (x[k] * x[k])) * v[k] - t;
        }
        return out;
    };
    auto apply_hinv = [&](const std::vector<double>& v) {
        std::vector<double> out(n);
        for (std::size_t c = 0; c < P.columns.size(); ++c) {
            double t = 0.0;
            for (std::size_t k : P.columns[c]) t += w[k] * v[k];
            t /= col_den[c];
            for (std::size_t k : P.columns[c]) out[k] = w[k] * v[k] + w[k] * t;
        }
        return out;
    };
    auto apply_a = [&](const std::vector<double>& v) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(mi);
        for (std::size_t k = 0; k < n; ++k) {
            out[P.row_b[k]] += v[k];
            if (P.row_a[k] >= 0) out[P.row_a[k]] += v[k];
        }
        return out;
    };
    auto apply_at = [&](const Eigen::VectorXd& l) {
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) out[k] = l[P.row_b[k]] + (P.row_a[k] >= 0 ? l[P.row_a[k]] : 0.0);
        return out;
    };

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(mi, mi);
    for (std::size_t c = 0; c < P.columns.size(); ++c) {
        const auto& col = P.columns[c];
        for (std::size_t i : col) {
            for (std::size_t j : col) {
                const double h = (i == j ? w[i] : 0.0) + w[i] * w[j] / col_den[c];
                const int ri[2] = {P.row_b[i], P.row_a[i]};
                const int rj[2] = {P.row_b[j], P.row_a[j]};
                for (int r : ri) {
                    if (r < 0) continue;
                    for (int s : rj) {
                        if (s >= 0) S(r, s) += h;
                    }
                }
            }
        }
    }
    // Symmetric diagonal scaling before the factorization.
    const Eigen::VectorXd scale =
        S.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(scale.asDiagonal() * S * scale.asDiagonal());

    // One Schur solve of  H d + A^T l = ra,  A d = rb.
    auto solve = [&](const std::vector<double>& ra, const Eigen::VectorXd& rb, std::vector<double>& d,
                     Eigen::VectorXd& l) {
        const Eigen::VectorXd rhs = apply_a(apply_hinv(ra)) - rb;
        l = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * rhs);
        std::vector<double> t = apply_at(l);
        for (std::size_t k = 0; k < n; ++k) t[k] = ra[k] - t[k];
        d = apply_hinv(t);
    };

    std::vector<double> ra(n);
    for (std::size_t k = 0; k < n; ++k) ra[k] = -grad[k];
    const Eigen::VectorXd rb = Eigen::Map<const Eigen::VectorXd>(P.rhs.data(), mi) - apply_a(x);

    NewtonStep step;
    solve(ra, rb, step.direction, step.multipliers);
    for (int round = 0; round < 3; ++round) {
        const std::vector<double> hd = apply_h(step.direction);
        const std::vector<double> atl = apply_at(step.multipliers);
        std::vector<double> ea(n);
        for (std::size_t k = 0; k < n; ++k) ea[k] = ra[k] - hd[k] - atl[k];
        const Eigen::VectorXd eb = rb - apply_a(step.direction);
        std::vector<double> dd;
        Eigen::VectorXd dl;
        solve(ea, eb, dd, dl);
        for (std::size_t k = 0; k < n; ++k) step.direction[k] += dd[k];
        step.multipliers += dl;
    }
    for (std::size_t k = 0; k < n; ++k) step.slope += grad[k] * step.direction[k];
    return step;
}

// Upper bound (nats) on max_{s feasible} <g, x - s>. The row multipliers give
// transport potentials u; v is then the tightest value keeping u + v <= g, so
// (u, v) is dual feasible for the per-output linear program.
double gap_bound(const Polytope& P, const std::vector<double>& x, const Eigen::VectorXd& multipliers,
                 const JointDistribution& dist) {
    const std::vector<double> g = gradient(P, x);
    double value = 0.0;
    for (std::size_t k = 0; k < P.n(); ++k) value += g[k] * x[k];

    const std::size_t nb = dist.nb(), na = dist.na();
    const Table yb = marginal(dist, Var::Y | Var::B);
    const Table ya = marginal(dist, Var::Y | Var::A);
    std::vector<double> v(dist.ny() * na, std::numeric_limits<double>::infinity());
    std::vector<char> seen_b(dist.ny() * nb, 0);
    double lower = 0.0;
    for (std::size_t k = 0; k < P.n(); ++k) {
        const std::size_t y = P.var_y[k];
        const std::size_t rest = P.cell[k] - y * nb * na;
        const std::size_t b = rest / na, a = rest % na;
        const double u = -multipliers[P.row_b[k]];
        if (!seen_b[y * nb + b]) {
            seen_b[y * nb + b] = 1;
            lower += yb[y * nb + b] * u;
        }
        v[y * na + a] = std::min(v[y * na + a], g[k] - u);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i])) lower += ya[i] * v[i];
    }
    return std::max(0.0, value - lower);
}

}  // namespace

BrojaSolution minimize_joint_mi(const JointDistribution& dist, const BrojaSettings& cfg) {
    if (cfg.max_iterations < 1 || !(cfg.feasibility_tol > 0.0) || !(cfg.optimality_tol > 0.0) ||
        !(cfg.initial_barrier > 0.0) || !(cfg.barrier_shrink > 0.0 && cfg.barrier_shrink < 1.0)) {
        throw InvalidInput("invalid BROJA solver settings");
    }
    const Polytope P = build_polytope(dist);
    const auto constraints = MarginalConstraints::of(dist);
    std::vector<double> x = P.start;

    SolverReport report;
    auto finish = [&](const std::vector<double>& xs) {
        std::vector<double> weights(dist.cell_count(), 0.0);
        for (std::size_t k = 0; k < P.n(); ++k) weights[P.cell[k]] = xs[k];
        JointDistribution q = with_weights(dist, weights);
        report.objective = std::max(0.0, objective(P, xs) / kLn2);
        report.max_constraint_violation = constraints.max_violation(q);
        return q;
    };

    double mu = cfg.initial_barrier;
    report.objective_trace.push_back(objective(P, x) / kLn2);

    while (true) {
        for (int inner = 0; inner < 200; ++inner) {
            if (report.iterations >= cfg.max_iterations) {
                finish(x);
                throw SolverError("BROJA solver exhausted its iteration budget", report);
            }
            NewtonStep step = newton_step(P, x, mu);
            ++report.iterations;
            if (!(step.slope < 0.0) || -step.slope * 0.5 < 1e-3 * mu) break;

            double alpha = 1.0;
            for (std::size_t k = 0; k < P.n(); ++k) {
                if (step.direction[k] < 0.0) alpha = std::min(alpha, -0.995 * x[k] / step.direction[k]);
            }
            const double phi0 = barrier_value(P, x, mu);
            bool accepted = false;
            std::vector<double> trial(P.n());
            for (int bt = 0; bt < 60 && !accepted; ++bt, alpha *= 0.5) {
                for (std::size_t k = 0; k < P.n(); ++k) trial[k] = x[k] + alpha * step.direction[k];
                if (std::any_of(trial.begin(), trial.end(), [](double v) { return !(v > 0.0); })) continue;
                restore_marginals(P, trial);
                if (barrier_value(P, trial, mu) <= phi0 + 1e-4 * alpha * step.slope) accepted = true;
            }
            if (!accepted) break;
            x.swap(trial);
        }
        report.objective_trace.push_back(objective(P, x) / kLn2);

        report.gap_bound = gap_bound(P, x, newton_step(P, x, mu).multipliers, dist) / kLn2;
        if (report.gap_bound <= cfg.optimality_tol) {
            JointDistribution q = finish(x);
            if (report.max_constraint_violation <= cfg.feasibility_tol) {
                report.converged = true;
                return {std::move(q), std::move(report)};
            }
        }
        if (mu < 1e-22) break;
        mu *= cfg.barrier_shrink;
    }
    finish(x);
    throw SolverError("BROJA solver could not certify optimality (gap bound " + std::to_string(report.gap_bound) +
                          " bits, violation " + std::to_string(report.max_constraint_violation) + ")",
                      report);
}

PidComponents pid_broja(const JointDistribution& dist, const BrojaSettings& cfg) {
    const BrojaSolution sol = minimize_joint_mi(dist, cfg);
    const InfoSummary s = summarize(dist);
    const double unq_b = conditional_mi(sol.q, Var::Y, Var::B, Var::A);
    const double unq_a = conditional_mi(sol.q, Var::Y, Var::A, Var::B);
    // Feasibility within 1e-10 keeps the closure within the optimizer tolerance.
    return from_uniques(s, unq_b, unq_a, Method::ibroja, Tolerances{}.optimized);
}

}  // namespace pidcmp
