#include "pidcmp/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace pidcmp {

std::string_view to_string(Condition c) {
    return c == Condition::control ? "control" : "treatment";
}

Condition condition_from_string(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "control") return Condition::control;
    if (lower == "treatment") return Condition::treatment;
    throw InvalidInput("unknown condition '" + std::string(s) + "' (expected control or treatment)");
}

GridRange GridRange::parse(std::string_view text) {
    auto dash = text.find('-');
    if (dash == std::string_view::npos) throw InvalidInput("grid range '" + std::string(text) + "' is not lo-hi");
    GridRange r;
    auto lo = text.substr(0, dash);
    auto hi = text.substr(dash + 1);
    auto r1 = std::from_chars(lo.data(), lo.data() + lo.size(), r.lo);
    auto r2 = std::from_chars(hi.data(), hi.data() + hi.size(), r.hi);
    if (r1.ec != std::errc() || r1.ptr != lo.data() + lo.size() || r2.ec != std::errc() ||
        r2.ptr != hi.data() + hi.size() || r.lo < 0 || r.hi < r.lo) {
        throw InvalidInput("bad grid range '" + std::string(text) + "'");
    }
    return r;
}

std::vector<GridRange> parse_ranges(const std::string& text) {
    std::vector<GridRange> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
        if (!item.empty()) out.push_back(GridRange::parse(item));
    }
    if (out.empty()) throw InvalidInput("no ranges in '" + text + "'");
    return out;
}

JointDistribution ingest_trials(std::span<const TrialRecord> records, const BinningConfig& cfg) {
    if (records.empty()) throw InvalidInput("ingest_trials: no records");
    cfg.validate();

    std::vector<double> basal, apical;
    basal.reserve(records.size());
    apical.reserve(records.size());
    for (const auto& r : records) {
        if (r.spike_count < 0) throw InvalidInput("negative spike count");
        basal.push_back(r.mean_basal);
        apical.push_back(r.mean_apical);
    }

    auto bin_inputs = [&](const std::vector<double>& values) {
        const auto distinct = std::set<double>(values.begin(), values.end()).size();
        const int k = std::min(cfg.n_input_bins, static_cast<int>(distinct));
        if (k < 2) return std::vector<int>(values.size(), 0);
        return bin_quantile(values, k);
    };
    const auto b_bins = bin_inputs(basal);
    const auto a_bins = bin_inputs(apical);

    const Alphabet ya = cfg.output_alphabet();
    const auto nin = static_cast<std::size_t>(cfg.n_input_bins);
    std::vector<double> weights(ya.size() * nin * nin, 0.0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto y = static_cast<std::size_t>(categorize_output(records[i].spike_count, cfg));
        weights[(y * nin + static_cast<std::size_t>(b_bins[i])) * nin + static_cast<std::size_t>(a_bins[i])] += 1.0;
    }
    return build_joint({ya, Alphabet::integers(nin), Alphabet::integers(nin)}, weights);
}

namespace {

int grid_step(std::span<const GridRecord> records, int GridRecord::*field) {
    int g = 0;
    for (const auto& r : records) g = std::gcd(g, r.*field);
    return g;
}

void check_aligned(GridRange range, int step, const char* what) {
    if (step > 0 && (range.lo % step != 0 || range.hi % step != 0)) {
        throw InvalidInput(std::string(what) + " range " + range.label() + " is not aligned to grid step " +
                           std::to_string(step));
    }
}

}  // namespace

JointDistribution ingest_grid(std::span<const GridRecord> records, const BinningConfig& cfg, GridRange basal,
                              GridRange apical) {
    cfg.validate();
    check_aligned(basal, grid_step(records, &GridRecord::n_basal), "basal");
    check_aligned(apical, grid_step(records, &GridRecord::n_apical), "apical");

    std::set<std::pair<int, int>> seen;
    std::vector<const GridRecord*> kept;
    std::set<int> b_levels, a_levels;
    for (const auto& r : records) {
        if (r.n_basal < 0 || r.n_apical < 0 || r.spike_count < 0) throw InvalidInput("negative grid entry");
        if (!seen.insert({r.n_basal, r.n_apical}).second) {
            throw InvalidInput("duplicate grid cell (" + std::to_string(r.n_basal) + ", " + std::to_string(r.n_apical) +
                               ")");
        }
        if (basal.contains(r.n_basal) && apical.contains(r.n_apical)) {
            kept.push_back(&r);
            b_levels.insert(r.n_basal);
            a_levels.insert(r.n_apical);
        }
    }
    if (kept.empty()) {
        throw InvalidInput("no grid cells inside basal " + basal.label() + " x apical " + apical.label());
    }

    const std::vector<int> bv(b_levels.begin(), b_levels.end());
    const std::vector<int> av(a_levels.begin(), a_levels.end());
    std::vector<std::string> bl, al;
    for (int v : bv) bl.push_back(std::to_string(v));
    for (int v : av) al.push_back(std::to_string(v));

    const Alphabet ya = cfg.output_alphabet();
    const std::size_t nb = bv.size(), na = av.size();
    std::vector<double> weights(ya.size() * nb * na, 0.0);
    for (const GridRecord* r : kept) {
        const auto y = static_cast<std::size_t>(categorize_output(r->spike_count, cfg));
        const auto b = static_cast<std::size_t>(std::lower_bound(bv.begin(), bv.end(), r->n_basal) - bv.begin());
        const auto a = static_cast<std::size_t>(std::lower_bound(av.begin(), av.end(), r->n_apical) - av.begin());
        weights[(y * nb + b) * na + a] = 1.0;
    }
    return build_joint({ya, Alphabet(std::move(bl)), Alphabet(std::move(al))}, weights);
}

std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>> match_support(std::span<const TrialRecord> first,
                                                                            std::span<const TrialRecord> second) {
    if (first.empty() || second.empty()) throw InvalidInput("match_support: both conditions need records");
    using Key = std::pair<double, double>;
    std::set<Key> k1, k2;
    for (const auto& r : first) k1.insert({r.mean_basal, r.mean_apical});
    for (const auto& r : second) k2.insert({r.mean_basal, r.mean_apical});
    std::set<Key> shared;
    std::set_intersection(k1.begin(), k1.end(), k2.begin(), k2.end(), std::inserter(shared, shared.end()));
    if (shared.empty()) throw InvalidInput("match_support: conditions share no stimulus combination");

    auto keep = [&](std::span<const TrialRecord> in) {
        std::vector<TrialRecord> out;
        for (const auto& r : in) {
            if (shared.count({r.mean_basal, r.mean_apical})) out.push_back(r);
        }
        return out;
    };
    return {keep(first), keep(second)};
}

std::vector<TrialRecord> drop_silent_stimuli(std::span<const TrialRecord> records) {
    std::map<std::pair<double, double>, long> spikes;
    for (const auto& r : records) spikes[{r.mean_basal, r.mean_apical}] += r.spike_count;
    std::vector<TrialRecord> out;
    for (const auto& r : records) {
        if (spikes[{r.mean_basal, r.mean_apical}] > 0) out.push_back(r);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput("line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw InvalidInput("line " + std::to_string(line_no) + ": non-finite value");
    }
    return value;
}

// Reads a header-checked CSV and hands each split, stripped row to `row`.
template <typename F>
void read_csv(std::istream& in, const std::vector<std::string>& header, F&& row) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty CSV input");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    auto fields = split_csv_line(strip(line));
    for (auto& f : fields) f = strip(f);
    if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw InvalidInput("unexpected CSV header; expected '" + expected + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InvalidInput("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                               " fields");
        }
        for (auto& f : fields) f = strip(f);
        row(fields, line_no);
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return in;
}

}  // namespace

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
    std::vector<TrialRecord> out;
    read_csv(in, {"unit_id", "condition", "bin_index", "mean_basal", "mean_apical", "spike_count"},
             [&](const std::vector<std::string>& f, std::size_t line_no) {
                 TrialRecord r;
                 r.unit_id = f[0];
                 if (r.unit_id.empty()) throw InvalidInput("line " + std::to_string(line_no) + ": empty unit_id");
                 r.condition = condition_from_string(f[1]);
                 r.bin_index = parse_number<int>(f[2], line_no);
                 r.mean_basal = parse_number<double>(f[3], line_no);
                 r.mean_apical = parse_number<double>(f[4], line_no);
                 r.spike_count = parse_number<int>(f[5], line_no);
                 if (r.spike_count < 0) {
                     throw InvalidInput("line " + std::to_string(line_no) + ": negative spike count");
                 }
                 out.push_back(std::move(r));
             });
    return out;
}

std::vector<TrialRecord> read_trials_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return read_trials_csv(in);
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
    out << "unit_id,condition,bin_index,mean_basal,mean_apical,spike_count\n";
    char buf[64];
    for (const auto& r : records) {
        out << r.unit_id << ',' << to_string(r.condition) << ',' << r.bin_index << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.mean_basal);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.mean_apical);
        out << buf << ',' << r.spike_count << '\n';
    }
}

std::vector<GridRecord> read_grid_csv(std::istream& in) {
    std::vector<GridRecord> out;
    read_csv(in, {"n_basal", "n_apical", "spike_count"}, [&](const std::vector<std::string>& f, std::size_t line_no) {
        GridRecord r{parse_number<int>(f[0], line_no), parse_number<int>(f[1], line_no),
                     parse_number<int>(f[2], line_no)};
        if (r.n_basal < 0 || r.n_apical < 0 || r.spike_count < 0) {
            throw InvalidInput("line " + std::to_string(line_no) + ": negative value");
        }
        out.push_back(r);
    });
    return out;
}

std::vector<GridRecord> read_grid_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return read_grid_csv(in);
}

void write_grid_csv(std::ostream& out, std::span<const GridRecord> records) {
    out << "n_basal,n_apical,spike_count\n";
    for (const auto& r : records) out << r.n_basal << ',' << r.n_apical << ',' << r.spike_count << '\n';
}

}  // namespace pidcmp
