#include "pidcmp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "pidcmp/distribution.hpp"

namespace pidcmp {

std::vector<double> PairedSample::differences() const {
    if (first.size() != second.size() || first.size() != unit_ids.size()) {
        throw InvalidInput("paired sample: conditions cover different units");
    }
    if (first.empty()) throw InvalidInput("paired sample is empty");
    std::vector<double> d(first.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = second[i] - first[i];
    return d;
}

WilcoxonResult wilcoxon_exact(std::span<const double> diffs) {
    WilcoxonResult res;
    std::vector<double> nz;
    for (double d : diffs) {
        if (!std::isfinite(d)) throw InvalidInput("wilcoxon_exact: non-finite difference");
        if (d == 0.0) {
            ++res.n_zero_dropped;
        } else {
            nz.push_back(d);
        }
    }
    if (nz.empty()) throw NoTestPossible("no test possible: every difference is zero");
    const std::size_t n = nz.size();
    if (n > 60) throw InvalidInput("wilcoxon_exact: more than 60 nonzero differences");
    res.n_used = static_cast<int>(n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return std::abs(nz[l]) < std::abs(nz[r]); });

    // Doubled mid-ranks are integers: a tie block over sorted positions i..j
    // (0-based) has mid-rank (i + j + 2) / 2.
    std::vector<int> rank2(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(nz[order[j + 1]]) == std::abs(nz[order[i]])) ++j;
        if (j > i) res.ties = true;
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = static_cast<int>(i + j + 2);
        i = j + 1;
    }

    int total2 = 0, wplus2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (nz[i] > 0.0) wplus2 += rank2[i];
    }
    res.w_plus = wplus2 / 2.0;

    // counts[s] = number of sign assignments with doubled positive rank sum s.
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
    counts[0] = 1;
    int reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = reach; s >= 0; --s) {
            if (counts[s]) counts[s + rank2[i]] += counts[s];
        }
        reach += rank2[i];
    }

    // W+ - W- = 2 W+ - T, so extremeness is |2 W+ - T| in doubled units.
    const long observed = std::labs(2L * wplus2 - total2);
    long double extreme = 0.0L, all = 0.0L;
    for (int s = 0; s <= total2; ++s) {
        if (!counts[s]) continue;
        all += static_cast<long double>(counts[s]);
        if (std::labs(2L * s - total2) >= observed) extreme += static_cast<long double>(counts[s]);
    }
    res.p = std::min(1.0, static_cast<double>(extreme / all));
    return res;
}

double bonferroni(double p, int m) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("bonferroni: p must lie in [0, 1]");
    if (m < 1) throw InvalidInput("bonferroni: family size must be at least 1");
    return std::min(static_cast<double>(m) * p, 1.0);
}

double quantile7(std::span<const double> values, double prob) {
    if (values.empty()) throw InvalidInput("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidInput("quantile probability outside [0, 1]");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Quartiles median_quartiles(std::span<const double> values) {
    return {quantile7(values, 0.25), quantile7(values, 0.5), quantile7(values, 0.75)};
}

}  // namespace pidcmp
