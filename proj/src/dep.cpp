#include "pidcmp/dep.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <string>

#include "pidcmp/info.hpp"

namespace pidcmp {

namespace {

const std::vector<VarSet>& candidate_members() {
    static const std::vector<VarSet> c{VarSet(Var::Y), VarSet(Var::B), VarSet(Var::A),
                                       Var::Y | Var::B, Var::Y | Var::A, Var::B | Var::A};
    return c;
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<VarSet> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end(), [](VarSet l, VarSet r) { return l.bits() < r.bits(); });
    VarSet cover;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const VarSet m = members_[i];
        if (m.empty() || m == VarSet::all()) throw InvalidInput("constraint members must be proper, nonempty subsets");
        for (std::size_t j = 0; j < members_.size(); ++j) {
            if (i != j && members_[j].includes(m)) throw InvalidInput("constraint set is not an antichain");
        }
        cover = cover | m;
    }
    if (!(cover == VarSet::all())) throw InvalidInput("constraint set does not cover Y, B and A");
}

bool ConstraintSet::has(VarSet s) const { return std::find(members_.begin(), members_.end(), s) != members_.end(); }

bool ConstraintSet::implies(const ConstraintSet& other) const {
    return std::all_of(other.members_.begin(), other.members_.end(), [&](VarSet o) {
        return std::any_of(members_.begin(), members_.end(), [&](VarSet m) { return m.includes(o); });
    });
}

std::string ConstraintSet::to_string() const {
    std::string out;
    for (VarSet m : members_) out += m.to_string();
    return out;
}

DependencyLattice::DependencyLattice() {
    const auto& cand = candidate_members();
    for (unsigned mask = 1; mask < (1u << cand.size()); ++mask) {
        std::vector<VarSet> members;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (mask & (1u << i)) members.push_back(cand[i]);
        }
        try {
            nodes_.emplace_back(std::move(members));
        } catch (const InvalidInput&) {
        }
    }
    // Bottom first: fewer implied pairs sort earlier; ties by label.
    auto rank = [](const ConstraintSet& c) {
        int r = 0;
        for (VarSet m : c.members()) r += m.size() == 2 ? 1 : 0;
        return r;
    };
    std::sort(nodes_.begin(), nodes_.end(), [&](const ConstraintSet& l, const ConstraintSet& r) {
        if (rank(l) != rank(r)) return rank(l) < rank(r);
        return l.to_string() < r.to_string();
    });
    const std::size_t n = nodes_.size();
    auto below = [&](std::size_t i, std::size_t j) { return i != j && nodes_[j].implies(nodes_[i]) && !(nodes_[i] == nodes_[j]); };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!below(i, j)) continue;
            bool covering = true;
            for (std::size_t k = 0; k < n && covering; ++k) {
                if (below(i, k) && below(k, j)) covering = false;
            }
            if (covering) edges_.push_back({i, j});
        }
    }
}

const DependencyLattice& DependencyLattice::trivariate() {
    static const DependencyLattice lattice;
    return lattice;
}

std::vector<LatticeEdge> DependencyLattice::edges_adding(VarSet s) const {
    std::vector<LatticeEdge> out;
    for (const auto& e : edges_) {
        if (nodes_[e.upper].has(s) && !nodes_[e.lower].has(s)) out.push_back(e);
    }
    return out;
}

namespace {

// One constrained marginal: the cell -> marginal-entry map and its target.
struct Block {
    std::vector<std::size_t> map;
    std::vector<double> target;
    std::size_t offset = 0;  // first parameter of this block
};

// Damped Newton on the dual of the maximum-entropy problem,
//   min_theta  log sum_c seed_c exp(theta . phi_c) - theta . target,
// where phi_c marks the marginal entry of each block that cell c falls in.
// Cells the constraints force to zero decay exponentially here, while plain
// scaling approaches them only sublinearly.
void newton_polish(const std::vector<Block>& blocks, const std::vector<double>& seed, std::vector<double>& theta,
                   std::vector<double>& q, double tol, const std::function<double()>& deviation) {
    const std::size_t cells = seed.size();
    const auto np = static_cast<Eigen::Index>(theta.size());
    auto evaluate = [&](const std::vector<double>& th, std::vector<double>& out) {
        std::vector<double> eta(cells, -std::numeric_limits<double>::infinity());
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cells; ++c) {
            if (!(seed[c] > 0.0)) continue;
            double e = std::log(seed[c]);
            for (const auto& blk : blocks) e += th[blk.offset + blk.map[c]];
            eta[c] = e;
            top = std::max(top, e);
        }
        double z = 0.0;
        out.assign(cells, 0.0);
        for (std::size_t c = 0; c < cells; ++c) {
            if (seed[c] > 0.0) {
                out[c] = std::exp(eta[c] - top);
                z += out[c];
            }
        }
        for (double& v : out) v /= z;
        double value = top + std::log(z);
        for (const auto& blk : blocks) {
            for (std::size_t j = 0; j < blk.target.size(); ++j) value -= th[blk.offset + j] * blk.target[j];
        }
        return value;
    };

    double value = evaluate(theta, q);
    for (int iter = 0; iter < 200 && deviation() >= tol; ++iter) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(np, np);
        for (std::size_t c = 0; c < cells; ++c) {
            if (!(q[c] > 0.0)) continue;
            for (const auto& bi : blocks) {
                const auto i = static_cast<Eigen::Index>(bi.offset + bi.map[c]);
                grad[i] += q[c];
                for (const auto& bj : blocks) hess(i, static_cast<Eigen::Index>(bj.offset + bj.map[c])) += q[c];
            }
        }
        hess -= grad * grad.transpose();
        for (const auto& blk : blocks) {
            for (std::size_t j = 0; j < blk.target.size(); ++j) grad[static_cast<Eigen::Index>(blk.offset + j)] -= blk.target[j];
        }
        // The parametrization is redundant; a small ridge fixes the gauge.
        hess.diagonal().array() += 1e-12 + 1e-10 * hess.diagonal().maxCoeff();
        const Eigen::VectorXd step = -hess.ldlt().solve(grad);
        const double slope = grad.dot(step);
        if (!(slope < 0.0)) break;

        std::vector<double> trial(theta.size()), qt;
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + alpha * step[static_cast<Eigen::Index>(i)];
            const double v = evaluate(trial, qt);
            if (v <= value + 1e-4 * alpha * slope) {
                theta.swap(trial);
                q.swap(qt);
                value = v;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
}

}  // namespace

JointDistribution maxent_fit(const JointDistribution& dist, const ConstraintSet& cs, const MaxentSettings& cfg) {
    const std::size_t ny = dist.ny(), nb = dist.nb(), na = dist.na();
    const std::size_t cells = dist.cell_count();

    std::vector<Block> blocks;
    std::size_t n_params = 0;
    for (VarSet m : cs.members()) {
        Block blk;
        const Table t = marginal(dist, m);
        blk.target.assign(t.data().begin(), t.data().end());
        blk.map.resize(cells);
        blk.offset = n_params;
        n_params += blk.target.size();
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t b = 0; b < nb; ++b) {
                for (std::size_t a = 0; a < na; ++a) {
                    std::size_t idx = 0;
                    if (m.contains(Var::Y)) idx = idx * ny + y;
                    if (m.contains(Var::B)) idx = idx * nb + b;
                    if (m.contains(Var::A)) idx = idx * na + a;
                    blk.map[dist.index(y, b, a)] = idx;
                }
            }
        }
        blocks.push_back(std::move(blk));
    }

    // Seed: uniform over the cells every constrained marginal allows.
    std::vector<double> q(cells, 1.0);
    for (const auto& blk : blocks) {
        for (std::size_t c = 0; c < cells; ++c) {
            if (!(blk.target[blk.map[c]] > 0.0)) q[c] = 0.0;
        }
    }
    double total = 0.0;
    for (double v : q) total += v;
    for (double& v : q) v /= total;
    const std::vector<double> seed = q;
    std::vector<double> theta(n_params, 0.0);  // accumulated log scale factors

    std::vector<double> cur;
    auto deviation = [&]() {
        double worst = 0.0;
        for (const auto& blk : blocks) {
            cur.assign(blk.target.size(), 0.0);
            for (std::size_t c = 0; c < cells; ++c) cur[blk.map[c]] += q[c];
            for (std::size_t i = 0; i < cur.size(); ++i) worst = std::max(worst, std::abs(cur[i] - blk.target[i]));
        }
        return worst;
    };

    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        if (deviation() < cfg.tol) return with_weights(dist, q);
        for (const auto& blk : blocks) {
            cur.assign(blk.target.size(), 0.0);
            for (std::size_t c = 0; c < cells; ++c) cur[blk.map[c]] += q[c];
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (cur[j] > 0.0 && blk.target[j] > 0.0) theta[blk.offset + j] += std::log(blk.target[j] / cur[j]);
            }
            for (std::size_t c = 0; c < cells; ++c) {
                const double have = cur[blk.map[c]];
                q[c] = have > 0.0 ? q[c] * blk.target[blk.map[c]] / have : 0.0;
            }
        }
    }
    if (deviation() < cfg.tol) return with_weights(dist, q);

    // Slow scaling means the solution lies on the boundary of the support.
    newton_polish(blocks, seed, theta, q, cfg.tol, deviation);
    if (deviation() < cfg.tol) return with_weights(dist, q);
    throw ConsistencyError("maximum-entropy fit for " + cs.to_string() + " did not converge (deviation " +
                           std::to_string(deviation()) + ")");
}

JointDistribution pairwise_maxent(const JointDistribution& dist, const MaxentSettings& cfg) {
    return maxent_fit(dist, ConstraintSet({Var::Y | Var::B, Var::Y | Var::A, Var::B | Var::A}), cfg);
}

PidComponents pid_dep(const JointDistribution& dist, const MaxentSettings& cfg) {
    const auto& lattice = DependencyLattice::trivariate();
    std::vector<double> jmi(lattice.nodes().size());
    for (std::size_t i = 0; i < jmi.size(); ++i) jmi[i] = joint_mi(maxent_fit(dist, lattice.nodes()[i], cfg));

    auto least_increase = [&](VarSet added) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : lattice.edges_adding(added)) best = std::min(best, jmi[e.upper] - jmi[e.lower]);
        return best;
    };
    const double unq_b = least_increase(Var::Y | Var::B);
    const double unq_a = least_increase(Var::Y | Var::A);
    return from_uniques(dist, unq_b, unq_a, Method::idep, Tolerances{}.optimized);
}

}  // namespace pidcmp
