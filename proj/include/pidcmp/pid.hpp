#pragma once
// Four-component decomposition of I(Y; B, A) and the identities tying it to
// the classical measures:
//
//   I(Y;B)   = UnqB + Shd        I(Y;B|A) = UnqB + Syn
//   I(Y;A)   = UnqA + Shd        I(Y;A|B) = UnqA + Syn
//
// Every method supplies one free quantity (the shared part, or the pair of
// unique parts) and the rest is closed with these equations.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pidcmp/info.hpp"

namespace pidcmp {

enum class Method { ibroja, idep, iccs, ipm, isx };

inline constexpr std::array<Method, 5> kAllMethods{Method::ibroja, Method::idep, Method::iccs, Method::ipm,
                                                   Method::isx};

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);
/// "all" or a comma separated list of method names.
std::vector<Method> parse_methods(const std::string& text);

/// Tolerance ledger for identity checks. Iccs, Ibroja and Idep go through a
/// numerical fit or solve; Ipm and Isx are closed-form.
struct Tolerances {
    double analytic = 1e-9;
    double optimized = 1e-5;

    double for_method(Method m) const {
        return (m == Method::ipm || m == Method::isx) ? analytic : optimized;
    }
};

/// True for the methods whose components are provably nonnegative.
constexpr bool nonnegative_method(Method m) { return m == Method::ibroja || m == Method::idep; }

struct PidComponents {
    double unq_b = 0.0;
    double unq_a = 0.0;
    double shd = 0.0;
    double syn = 0.0;
    Method method = Method::ibroja;
    bool normalized = false;

    double sum() const { return unq_b + unq_a + shd + syn; }
    /// Components in the order unq_b, unq_a, shd, syn.
    std::array<double, 4> values() const { return {unq_b, unq_a, shd, syn}; }
};

inline constexpr std::array<std::string_view, 4> kComponentNames{"unq_b", "unq_a", "shd", "syn"};

/// Closes a decomposition from its shared information.
PidComponents from_shared(const InfoSummary& s, double shd, Method method);
PidComponents from_shared(const JointDistribution& dist, double shd, Method method);

/// Closes a decomposition from both unique informations. The pair must agree
/// with I(Y;B) - I(Y;A) to within `tol`, otherwise InvalidInput is thrown.
PidComponents from_uniques(const InfoSummary& s, double unq_b, double unq_a, Method method, double tol);
PidComponents from_uniques(const JointDistribution& dist, double unq_b, double unq_a, Method method, double tol);

/// Divides each component by `jmi`. No clamping: pointwise methods can give
/// components outside [0, 1]. Throws InvalidInput when jmi <= 0 or `c` is
/// already normalized.
PidComponents normalize_components(const PidComponents& c, double jmi);

/// UnqB - UnqA, which equals I(Y;B) - I(Y;A) for every method.
double unique_info_asymmetry(const JointDistribution& dist);
double unique_info_asymmetry(const InfoSummary& s);

/// Residuals (components minus measure) of the four linking equations, in the
/// order I(Y;B), I(Y;A), I(Y;B|A), I(Y;A|B), plus the sum identity.
struct Residuals {
    std::array<double, 4> linking{};
    double total = 0.0;

    double max_abs() const;
};

Residuals consistency_residuals(const PidComponents& c, const InfoSummary& s);

/// Interaction information when positive: a floor on synergy for methods with
/// nonnegative components. Empty otherwise.
std::optional<double> synergy_lower_bound(const InfoSummary& s);

}  // namespace pidcmp
