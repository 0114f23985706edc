#include "pidcmp/pid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pidcmp {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::ibroja: return "ibroja";
        case Method::idep: return "idep";
        case Method::iccs: return "iccs";
        case Method::ipm: return "ipm";
        case Method::isx: return "isx";
    }
    return "?";
}

Method method_from_string(std::string_view s) {
    for (Method m : kAllMethods) {
        if (to_string(m) == s) return m;
    }
    throw InvalidInput("unknown PID method '" + std::string(s) + "'");
}

std::vector<Method> parse_methods(const std::string& text) {
    if (text == "all") return {kAllMethods.begin(), kAllMethods.end()};
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        Method m = method_from_string(item);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw InvalidInput("no PID methods selected");
    // Canonical order keeps reports stable regardless of how the list was typed.
    std::sort(out.begin(), out.end());
    return out;
}

PidComponents from_shared(const InfoSummary& s, double shd, Method method) {
    PidComponents c;
    c.method = method;
    c.normalized = s.normalized;
    c.shd = shd;
    c.unq_b = s.mi_yb - shd;
    c.unq_a = s.mi_ya - shd;
    c.syn = s.cmi_yb_given_a - c.unq_b;
    return c;
}

PidComponents from_shared(const JointDistribution& dist, double shd, Method method) {
    return from_shared(summarize(dist), shd, method);
}

PidComponents from_uniques(const InfoSummary& s, double unq_b, double unq_a, Method method, double tol) {
    PidComponents c;
    c.method = method;
    c.normalized = s.normalized;
    c.unq_b = unq_b;
    c.shd = s.mi_yb - unq_b;
    c.syn = s.cmi_yb_given_a - unq_b;
    const double mismatch = (s.mi_ya - c.shd) - unq_a;
    if (!(std::abs(mismatch) <= tol)) {
        throw InvalidInput("unique informations disagree with I(Y;B) - I(Y;A) by " + std::to_string(mismatch) +
                           " bits");
    }
    // Keep the supplied value; the check above bounds its distance from the closure.
    c.unq_a = unq_a;
    return c;
}

PidComponents from_uniques(const JointDistribution& dist, double unq_b, double unq_a, Method method, double tol) {
    return from_uniques(summarize(dist), unq_b, unq_a, method, tol);
}

PidComponents normalize_components(const PidComponents& c, double jmi) {
    if (c.normalized) throw InvalidInput("components are already normalized");
    if (!(jmi > 0.0)) throw InvalidInput("cannot normalize by a non-positive joint mutual information");
    PidComponents n = c;
    n.unq_b /= jmi;
    n.unq_a /= jmi;
    n.shd /= jmi;
    n.syn /= jmi;
    n.normalized = true;
    return n;
}

double unique_info_asymmetry(const InfoSummary& s) { return s.mi_yb - s.mi_ya; }

double unique_info_asymmetry(const JointDistribution& dist) { return unique_info_asymmetry(summarize(dist)); }

double Residuals::max_abs() const {
    double m = std::abs(total);
    for (double r : linking) m = std::max(m, std::abs(r));
    return m;
}

Residuals consistency_residuals(const PidComponents& c, const InfoSummary& s) {
    Residuals r;
    r.linking = {c.unq_b + c.shd - s.mi_yb, c.unq_a + c.shd - s.mi_ya, c.unq_b + c.syn - s.cmi_yb_given_a,
                 c.unq_a + c.syn - s.cmi_ya_given_b};
    r.total = c.sum() - s.jmi;
    return r;
}

std::optional<double> synergy_lower_bound(const InfoSummary& s) {
    if (s.ii > 0.0) return s.ii;
    return std::nullopt;
}

}  // namespace pidcmp
