#pragma once
// Finite trivariate joint distributions over (Y, B, A).
//
// Y is the output, B the basal (driving) input and A the apical (contextual)
// input. Every table in the library uses this axis order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pidcmp {

/// Raised for malformed inputs: bad shapes, negative weights, empty data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computed quantity violates an identity it must satisfy.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Var : std::uint8_t { Y = 0, B = 1, A = 2 };

std::string_view to_string(Var v);

/// Subset of {Y, B, A} stored as a bit mask (Y=1, B=2, A=4).
class VarSet {
public:
    constexpr VarSet() = default;
    constexpr VarSet(Var v) : bits_(static_cast<std::uint8_t>(1u << static_cast<unsigned>(v))) {}
    static constexpr VarSet from_bits(std::uint8_t bits) {
        VarSet s;
        s.bits_ = static_cast<std::uint8_t>(bits & 7u);
        return s;
    }
    static constexpr VarSet all() { return from_bits(7); }

    constexpr std::uint8_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(Var v) const { return (bits_ >> static_cast<unsigned>(v)) & 1u; }
    constexpr bool includes(VarSet other) const { return (bits_ & other.bits_) == other.bits_; }
    constexpr int size() const { return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }

    friend constexpr VarSet operator|(VarSet l, VarSet r) { return from_bits(l.bits_ | r.bits_); }
    friend constexpr VarSet operator&(VarSet l, VarSet r) { return from_bits(l.bits_ & r.bits_); }
    friend constexpr bool operator==(VarSet l, VarSet r) { return l.bits_ == r.bits_; }

    std::string to_string() const;

private:
    std::uint8_t bits_ = 0;
};

constexpr VarSet operator|(Var l, Var r) { return VarSet(l) | VarSet(r); }

/// Ordered set of distinct symbolic values; index <-> label is a bijection.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> labels);

    /// Labels "0", "1", ..., "n-1".
    static Alphabet integers(std::size_t n);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }
    /// Index of `label`; throws InvalidInput if absent.
    std::size_t index_of(const std::string& label) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<std::string> labels_;
};

/// Dense probability table over a subset of the variables, axes in Y, B, A
/// order restricted to the kept set.
class Table {
public:
    Table(VarSet vars, std::vector<std::size_t> shape, std::vector<double> data);

    VarSet vars() const { return vars_; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::span<const double> data() const { return data_; }
    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }

private:
    VarSet vars_;
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Joint pmf Pr(Y=y, B=b, A=a). Entries are nonnegative and sum to one;
/// zero cells are stored explicitly. Immutable.
class JointDistribution {
public:
    const Alphabet& alphabet(Var v) const { return alphabets_[static_cast<std::size_t>(v)]; }
    std::size_t size(Var v) const { return alphabet(v).size(); }
    std::size_t ny() const { return size(Var::Y); }
    std::size_t nb() const { return size(Var::B); }
    std::size_t na() const { return size(Var::A); }

    std::size_t index(std::size_t y, std::size_t b, std::size_t a) const {
        return (y * nb() + b) * na() + a;
    }
    double operator()(std::size_t y, std::size_t b, std::size_t a) const {
        return pmf_[index(y, b, a)];
    }
    std::span<const double> pmf() const { return pmf_; }
    std::size_t cell_count() const { return pmf_.size(); }
    std::size_t support_size() const;

    friend JointDistribution build_joint(std::array<Alphabet, 3> alphabets, std::span<const double> weights);

private:
    JointDistribution(std::array<Alphabet, 3> alphabets, std::vector<double> pmf)
        : alphabets_(std::move(alphabets)), pmf_(std::move(pmf)) {}

    std::array<Alphabet, 3> alphabets_;
    std::vector<double> pmf_;
};

/// Normalizes `weights` (laid out y-major, then b, then a) into a pmf.
/// Throws InvalidInput on a shape mismatch, a negative or non-finite weight,
/// or when every weight is zero.
JointDistribution build_joint(std::array<Alphabet, 3> alphabets, std::span<const double> weights);

/// Same alphabets as `like`, new weights.
JointDistribution with_weights(const JointDistribution& like, std::span<const double> weights);

/// Sums out every variable not in `keep`.
Table marginal(const JointDistribution& dist, VarSet keep);

}  // namespace pidcmp
