#include "pidcmp/binning.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pidcmp {

std::vector<int> bin_quantile(std::span<const double> values, int k) {
    if (values.empty()) throw InvalidInput("bin_quantile: no values");
    if (k < 2) throw InvalidInput("bin_quantile: need at least two bins");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("bin_quantile: non-finite value");
    }

    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });

    // Sorted positions where a new distinct value begins (position 0 excluded).
    std::vector<std::size_t> starts;
    for (std::size_t i = 1; i < n; ++i) {
        if (values[order[i]] != values[order[i - 1]]) starts.push_back(i);
    }
    const std::size_t distinct = starts.size() + 1;
    if (distinct < static_cast<std::size_t>(k)) {
        throw InvalidInput("bin_quantile: " + std::to_string(distinct) + " distinct values cannot fill " +
                           std::to_string(k) + " bins");
    }

    const std::size_t nk = static_cast<std::size_t>(k);
    std::vector<std::size_t> boundary(nk - 1);
    std::size_t next = 0;  // smallest admissible index into `starts`
    for (std::size_t j = 1; j < nk; ++j) {
        const std::size_t target = (n * j + nk - 1) / nk;
        std::size_t idx = static_cast<std::size_t>(std::lower_bound(starts.begin(), starts.end(), target) - starts.begin());
        idx = std::max(idx, next);
        // Leave one start per remaining boundary.
        idx = std::min(idx, starts.size() - (nk - 1 - j) - 1);
        boundary[j - 1] = starts[idx];
        next = idx + 1;
    }

    std::vector<int> bins(n);
    int bin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (bin < k - 1 && i >= boundary[static_cast<std::size_t>(bin)]) ++bin;
        bins[order[i]] = bin;
    }
    return bins;
}

namespace {

int parse_int(std::string_view s, const std::string& whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) {
        throw InvalidInput("bad output category '" + std::string(s) + "' in '" + whole + "'");
    }
    return value;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

BinningConfig BinningConfig::parse(const std::string& outputs, int n_input_bins) {
    BinningConfig cfg;
    cfg.n_input_bins = n_input_bins;
    std::stringstream ss(outputs);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw InvalidInput("empty output category in '" + outputs + "'");
        CountRange r;
        r.label = item;
        if (item.back() == '+') {
            r.lo = parse_int(std::string_view(item).substr(0, item.size() - 1), outputs);
        } else if (auto dash = item.find('-'); dash != std::string::npos) {
            r.lo = parse_int(std::string_view(item).substr(0, dash), outputs);
            int last = parse_int(std::string_view(item).substr(dash + 1), outputs);
            if (last < r.lo) throw InvalidInput("empty output category '" + item + "'");
            r.hi = last + 1;
        } else {
            r.lo = parse_int(item, outputs);
            r.hi = r.lo + 1;
        }
        cfg.output_categories.push_back(std::move(r));
    }
    cfg.validate();
    return cfg;
}

void BinningConfig::validate() const {
    if (n_input_bins < 2) throw InvalidInput("need at least two input bins");
    if (output_categories.size() < 2) throw InvalidInput("need at least two output categories");
    for (std::size_t i = 0; i < output_categories.size(); ++i) {
        const auto& c = output_categories[i];
        if (c.hi && *c.hi <= c.lo) throw InvalidInput("empty output category '" + c.label + "'");
        if (i + 1 < output_categories.size()) {
            if (!c.hi) throw InvalidInput("open-ended output category '" + c.label + "' must be last");
            if (output_categories[i + 1].lo < *c.hi) {
                throw InvalidInput("output categories overlap or are out of order at '" + c.label + "'");
            }
        }
    }
}

Alphabet BinningConfig::output_alphabet() const {
    std::vector<std::string> labels;
    for (const auto& c : output_categories) labels.push_back(c.label);
    return Alphabet(std::move(labels));
}

int categorize_output(int count, const BinningConfig& cfg) {
    for (std::size_t i = 0; i < cfg.output_categories.size(); ++i) {
        if (cfg.output_categories[i].contains(count)) return static_cast<int>(i);
    }
    throw InvalidInput("spike count " + std::to_string(count) + " falls outside every output category");
}

}  // namespace pidcmp
