#include "pidcmp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace pidcmp {

std::string_view to_string(Var v) {
    switch (v) {
        case Var::Y: return "Y";
        case Var::B: return "B";
        case Var::A: return "A";
    }
    return "?";
}

std::string VarSet::to_string() const {
    std::string out;
    for (Var v : {Var::Y, Var::B, Var::A}) {
        if (contains(v)) out += pidcmp::to_string(v);
    }
    return out.empty() ? "{}" : out;
}

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidInput("alphabet must have at least one label");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw InvalidInput("duplicate alphabet label '" + l + "'");
    }
}

Alphabet Alphabet::integers(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return Alphabet(std::move(labels));
}

std::size_t Alphabet::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InvalidInput("label '" + label + "' not in alphabet");
    return static_cast<std::size_t>(it - labels_.begin());
}

Table::Table(VarSet vars, std::vector<std::size_t> shape, std::vector<double> data)
    : vars_(vars), shape_(std::move(shape)), data_(std::move(data)) {
    std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (static_cast<int>(shape_.size()) != vars_.size() || n != data_.size()) {
        throw InvalidInput("table shape does not match its data");
    }
}

std::size_t JointDistribution::support_size() const {
    return static_cast<std::size_t>(std::count_if(pmf_.begin(), pmf_.end(), [](double p) { return p > 0.0; }));
}

JointDistribution build_joint(std::array<Alphabet, 3> alphabets, std::span<const double> weights) {
    const std::size_t expected = alphabets[0].size() * alphabets[1].size() * alphabets[2].size();
    if (weights.size() != expected) {
        throw InvalidInput("weight table has " + std::to_string(weights.size()) + " entries, alphabets imply " +
                           std::to_string(expected));
    }
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidInput("weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw InvalidInput("at least one weight must be positive");

    std::vector<double> pmf(weights.begin(), weights.end());
    for (double& p : pmf) p /= total;
    return JointDistribution(std::move(alphabets), std::move(pmf));
}

JointDistribution with_weights(const JointDistribution& like, std::span<const double> weights) {
    return build_joint({like.alphabet(Var::Y), like.alphabet(Var::B), like.alphabet(Var::A)}, weights);
}

Table marginal(const JointDistribution& dist, VarSet keep) {
    if (keep.empty()) throw InvalidInput("marginal needs a nonempty variable subset");

    const std::array<std::size_t, 3> dims{dist.ny(), dist.nb(), dist.na()};
    std::vector<std::size_t> shape;
    std::array<std::size_t, 3> stride{0, 0, 0};
    std::size_t n = 1;
    for (int v = 2; v >= 0; --v) {
        if (keep.contains(static_cast<Var>(v))) {
            stride[static_cast<std::size_t>(v)] = n;
            n *= dims[static_cast<std::size_t>(v)];
        }
    }
    for (int v = 0; v < 3; ++v) {
        if (keep.contains(static_cast<Var>(v))) shape.push_back(dims[static_cast<std::size_t>(v)]);
    }

    std::vector<double> out(n, 0.0);
    auto pmf = dist.pmf();
    std::size_t i = 0;
    for (std::size_t y = 0; y < dims[0]; ++y) {
        for (std::size_t b = 0; b < dims[1]; ++b) {
            for (std::size_t a = 0; a < dims[2]; ++a, ++i) {
                out[y * stride[0] + b * stride[1] + a * stride[2]] += pmf[i];
            }
        }
    }
    return Table(keep, std::move(shape), std::move(out));
}

}  // namespace pidcmp
