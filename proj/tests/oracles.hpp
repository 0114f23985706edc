#pragma once
// Independent reference computations for the tests. Everything here works on
// raw weight arrays in (y, b, a) order with plain loops and shares no code
// with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

struct Shape {
    std::size_t ny, nb, na;
    std::size_t at(std::size_t y, std::size_t b, std::size_t a) const { return (y * nb + b) * na + a; }
    std::size_t cells() const { return ny * nb * na; }
};

inline std::vector<double> normalized(std::vector<double> w) {
    double s = 0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    return w;
}

// I(X;Z) in bits from a joint given as p[x][z].
inline double mi_from_matrix(const std::vector<std::vector<double>>& p) {
    std::vector<double> px(p.size(), 0.0), pz(p.empty() ? 0 : p[0].size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t z = 0; z < p[x].size(); ++z) {
            px[x] += p[x][z];
            pz[z] += p[x][z];
        }
    double mi = 0;
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t z = 0; z < p[x].size(); ++z)
            if (p[x][z] > 0) mi += p[x][z] * std::log2(p[x][z] / (px[x] * pz[z]));
    return mi;
}

inline double mi_y_b(const std::vector<double>& p, Shape s) {
    std::vector<std::vector<double>> m(s.ny, std::vector<double>(s.nb, 0.0));
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a) m[y][b] += p[s.at(y, b, a)];
    return mi_from_matrix(m);
}

inline double mi_y_a(const std::vector<double>& p, Shape s) {
    std::vector<std::vector<double>> m(s.ny, std::vector<double>(s.na, 0.0));
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a) m[y][a] += p[s.at(y, b, a)];
    return mi_from_matrix(m);
}

inline double mi_y_ba(const std::vector<double>& p, Shape s) {
    std::vector<std::vector<double>> m(s.ny, std::vector<double>(s.nb * s.na, 0.0));
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a) m[y][b * s.na + a] = p[s.at(y, b, a)];
    return mi_from_matrix(m);
}

// Maximum entropy fit to the three pairwise marginals by plain cyclic IPF.
inline std::vector<double> pairwise_ipf(const std::vector<double>& p, Shape s, int sweeps = 20000) {
    std::vector<double> yb(s.ny * s.nb, 0), ya(s.ny * s.na, 0), ba(s.nb * s.na, 0);
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a) {
                const double v = p[s.at(y, b, a)];
                yb[y * s.nb + b] += v;
                ya[y * s.na + a] += v;
                ba[b * s.na + a] += v;
            }
    std::vector<double> q(s.cells(), 0.0);
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a)
                if (yb[y * s.nb + b] > 0 && ya[y * s.na + a] > 0 && ba[b * s.na + a] > 0) q[s.at(y, b, a)] = 1.0;
    auto rescale = [&](const std::vector<double>& target, auto key, std::size_t n) {
        std::vector<double> cur(n, 0.0);
        for (std::size_t y = 0; y < s.ny; ++y)
            for (std::size_t b = 0; b < s.nb; ++b)
                for (std::size_t a = 0; a < s.na; ++a) cur[key(y, b, a)] += q[s.at(y, b, a)];
        for (std::size_t y = 0; y < s.ny; ++y)
            for (std::size_t b = 0; b < s.nb; ++b)
                for (std::size_t a = 0; a < s.na; ++a) {
                    const std::size_t k = key(y, b, a);
                    q[s.at(y, b, a)] = cur[k] > 0 ? q[s.at(y, b, a)] * target[k] / cur[k] : 0.0;
                }
    };
    for (int it = 0; it < sweeps; ++it) {
        rescale(yb, [&](std::size_t y, std::size_t b, std::size_t) { return y * s.nb + b; }, yb.size());
        rescale(ya, [&](std::size_t y, std::size_t, std::size_t a) { return y * s.na + a; }, ya.size());
        rescale(ba, [&](std::size_t, std::size_t b, std::size_t a) { return b * s.na + a; }, ba.size());
    }
    return q;
}

// p(y) p(b|y) p(a|y).
inline std::vector<double> conditional_independence(const std::vector<double>& p, Shape s) {
    std::vector<double> py(s.ny, 0), yb(s.ny * s.nb, 0), ya(s.ny * s.na, 0);
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a) {
                const double v = p[s.at(y, b, a)];
                py[y] += v;
                yb[y * s.nb + b] += v;
                ya[y * s.na + a] += v;
            }
    std::vector<double> q(s.cells(), 0.0);
    for (std::size_t y = 0; y < s.ny; ++y)
        for (std::size_t b = 0; b < s.nb; ++b)
            for (std::size_t a = 0; a < s.na; ++a)
                if (py[y] > 0) q[s.at(y, b, a)] = yb[y * s.nb + b] * ya[y * s.na + a] / py[y];
    return q;
}

struct Pid {
    double unq_b, unq_a, shd, syn;
};

// Dependency-lattice PID in closed form: the four edges that add the (Y,B)
// constraint raise I(Y;B,A) by I(Y;B), I(Y;B), I_ci - I(Y;A) and
// I_pw - I(Y;A), and symmetrically for (Y,A).
inline Pid idep_closed_form(const std::vector<double>& p, Shape s) {
    const double iyb = mi_y_b(p, s), iya = mi_y_a(p, s), jmi = mi_y_ba(p, s);
    const double ici = mi_y_ba(conditional_independence(p, s), s);
    const double ipw = mi_y_ba(pairwise_ipf(p, s), s);
    const double m = std::min({iyb + iya, ici, ipw});
    Pid r;
    r.unq_b = m - iya;
    r.unq_a = m - iyb;
    r.shd = iyb - r.unq_b;
    r.syn = jmi - r.unq_b - r.unq_a - r.shd;
    return r;
}

// Minimum of I_Q(Y;B,A) over Q with the (Y,B) and (Y,A) marginals of p, by
// exhaustive grid search for 2x2 input alphabets. Each slice q(y,.,.) has one
// free cell t_y in [max(0, c0 - r1), min(r0, c0)]; every combination of grid
// points (plus both interval ends) is evaluated.
inline double broja_grid_min(const std::vector<double>& p, Shape s, double step) {
    struct Slice {
        std::vector<double> t;
        double r0, r1, c0, c1;
    };
    std::vector<Slice> slices(s.ny);
    double hy = 0;
    for (std::size_t y = 0; y < s.ny; ++y) {
        Slice& sl = slices[y];
        sl.r0 = p[s.at(y, 0, 0)] + p[s.at(y, 0, 1)];
        sl.r1 = p[s.at(y, 1, 0)] + p[s.at(y, 1, 1)];
        sl.c0 = p[s.at(y, 0, 0)] + p[s.at(y, 1, 0)];
        sl.c1 = p[s.at(y, 0, 1)] + p[s.at(y, 1, 1)];
        const double lo = std::max(0.0, sl.c0 - sl.r1), hi = std::min(sl.r0, sl.c0);
        for (double t = lo; t < hi; t += step) sl.t.push_back(t);
        sl.t.push_back(hi);
        const double py = sl.r0 + sl.r1;
        if (py > 0) hy -= py * std::log2(py);
    }
    auto xlogx = [](double x) { return x > 0 ? x * std::log2(x) : 0.0; };
    // Per-slice cells and their x log x sums for every grid point.
    std::vector<std::vector<std::array<double, 4>>> cells(s.ny);
    std::vector<std::vector<double>> own(s.ny);
    for (std::size_t y = 0; y < s.ny; ++y) {
        const Slice& sl = slices[y];
        for (double t : sl.t) {
            std::array<double, 4> c{t, sl.r0 - t, sl.c0 - t, sl.r1 - sl.c0 + t};
            for (double& v : c) v = std::max(v, 0.0);
            cells[y].push_back(c);
            own[y].push_back(xlogx(c[0]) + xlogx(c[1]) + xlogx(c[2]) + xlogx(c[3]));
        }
    }
    // I(Y;BA) = H(Y) + sum q log q - sum q(ba) log q(ba).
    double best = std::numeric_limits<double>::infinity();
    const std::size_t last = s.ny - 1;
    std::function<void(std::size_t, std::array<double, 4>, double)> rec = [&](std::size_t y, std::array<double, 4> ba,
                                                                               double acc) {
        if (y == last) {
            for (std::size_t i = 0; i < cells[y].size(); ++i) {
                const auto& c = cells[y][i];
                const double v = hy + acc + own[y][i] - xlogx(ba[0] + c[0]) - xlogx(ba[1] + c[1]) -
                                 xlogx(ba[2] + c[2]) - xlogx(ba[3] + c[3]);
                best = std::min(best, v);
            }
            return;
        }
        for (std::size_t i = 0; i < cells[y].size(); ++i) {
            const auto& c = cells[y][i];
            rec(y + 1, {ba[0] + c[0], ba[1] + c[1], ba[2] + c[2], ba[3] + c[3]}, acc + own[y][i]);
        }
    };
    rec(0, {0, 0, 0, 0}, 0.0);
    return best;
}

// Two-sided exact signed-rank p-value by listing all 2^n sign patterns.
// Zeros are dropped, tied magnitudes share their average rank.
inline double wilcoxon_enumerate(const std::vector<double>& diffs) {
    std::vector<double> d;
    for (double v : diffs)
        if (v != 0) d.push_back(v);
    const std::size_t n = d.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) below += 1;
            if (std::abs(d[j]) == std::abs(d[i])) equal += 1;
        }
        rank[i] = below + (equal + 1) / 2.0;
    }
    double total = 0, obs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += rank[i];
        if (d[i] > 0) obs += rank[i];
    }
    const double dev = std::abs(obs - total / 2);
    std::uint64_t hits = 0;
    const std::uint64_t patterns = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += rank[i];
        if (std::abs(w - total / 2) >= dev - 1e-9) ++hits;
    }
    return std::min(1.0, static_cast<double>(hits) / static_cast<double>(patterns));
}

}  // namespace oracle
