#include "pidcmp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include "pidcmp/broja.hpp"
#include "pidcmp/dep.hpp"

namespace pidcmp {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    // Rethrow the lowest-index failure so the outcome does not depend on scheduling.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

DistributionAnalysis analyze_distribution(const JointDistribution& dist, const std::vector<Method>& methods,
                                          bool ledgers) {
    DistributionAnalysis out{summarize(dist), std::nullopt, {}, dist};
    if (out.summary.jmi > 0.0) out.normalized = normalize_summary(out.summary);
    for (Method m : methods) {
        MethodResult r;
        r.method = m;
        try {
            switch (m) {
                case Method::ibroja: r.raw = pid_broja(dist); break;
                case Method::idep: r.raw = pid_dep(dist); break;
                case Method::iccs: {
                    auto res = pid_ccs(dist, ledgers);
                    r.raw = res.components;
                    r.ledger = std::move(res.ledger);
                    break;
                }
                case Method::ipm: {
                    auto res = pid_pm(dist, ledgers);
                    r.raw = res.components;
                    r.ledger = std::move(res.ledger);
                    break;
                }
                case Method::isx: {
                    auto res = pid_sx(dist, ledgers);
                    r.raw = res.components;
                    r.ledger = std::move(res.ledger);
                    break;
                }
            }
            if (out.normalized) r.normalized = normalize_components(*r.raw, out.summary.jmi);
        } catch (const std::exception& e) {
            r.raw.reset();
            r.normalized.reset();
            r.ledger.reset();
            r.error = e.what();
        }
        out.methods.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------- conditions

namespace {

double component_value(const PidComponents& c, std::string_view name) {
    if (name == "unq_b") return c.unq_b;
    if (name == "unq_a") return c.unq_a;
    if (name == "shd") return c.shd;
    return c.syn;
}

const MethodResult* find_method(const DistributionAnalysis& a, Method m) {
    for (const auto& r : a.methods) {
        if (r.method == m) return &r;
    }
    return nullptr;
}

UnitResult analyze_unit(const std::string& unit, const std::vector<TrialRecord>& control,
                        const std::vector<TrialRecord>& treatment, const ConditionsConfig& cfg) {
    UnitResult u;
    u.unit_id = unit;
    auto skip = [&](const std::string& why) {
        u.skipped = true;
        u.warnings.push_back(why);
        return u;
    };
    if (control.empty() || treatment.empty()) return skip("unit lacks records for both conditions");

    std::vector<TrialRecord> c = control, t = treatment;
    if (cfg.drop_silent) {
        c = drop_silent_stimuli(c);
        t = drop_silent_stimuli(t);
        if (c.empty() || t.empty()) return skip("no spiking stimuli left after dropping silent ones");
    }
    try {
        std::tie(c, t) = match_support(c, t);
    } catch (const InvalidInput& e) {
        return skip(std::string("support matching failed: ") + e.what());
    }

    try {
        for (auto [cond, recs] : {std::pair{Condition::control, &c}, std::pair{Condition::treatment, &t}}) {
            const JointDistribution d = ingest_trials(*recs, cfg.binning);
            u.conditions.push_back({cond, recs->size(), analyze_distribution(d, cfg.methods, cfg.ledgers)});
        }
    } catch (const InvalidInput& e) {
        u.conditions.clear();
        return skip(std::string("ingestion failed: ") + e.what());
    }

    const auto& ac = u.conditions[0].analysis;
    const auto& at = u.conditions[1].analysis;
    if (!ac.normalized || !at.normalized) {
        return skip("joint mutual information is zero in a condition; nothing to normalize by");
    }
    for (Method m : cfg.methods) {
        const MethodResult* rc = find_method(ac, m);
        const MethodResult* rt = find_method(at, m);
        for (const auto* r : {rc, rt}) {
            if (!r->error.empty()) u.warnings.push_back(std::string(to_string(m)) + " failed: " + r->error);
        }
        if (!rc->normalized || !rt->normalized) continue;
        for (auto name : kComponentNames) {
            u.differences[{m, std::string(name)}] =
                100.0 * (component_value(*rt->normalized, name) - component_value(*rc->normalized, name));
        }
    }
    u.uia_control = 100.0 * unique_info_asymmetry(*ac.normalized);
    u.uia_treatment = 100.0 * unique_info_asymmetry(*at.normalized);
    u.uia_diff = u.uia_treatment - u.uia_control;
    return u;
}

TestResult run_test(std::string id, std::vector<double> values) {
    TestResult t;
    t.id = std::move(id);
    t.values = std::move(values);
    if (t.values.empty()) {
        t.error = "no units";
        return t;
    }
    t.quartiles = median_quartiles(t.values);
    try {
        t.wilcoxon = wilcoxon_exact(t.values);
    } catch (const NoTestPossible&) {
        t.error = "no test possible";
    } catch (const InvalidInput& e) {
        t.error = e.what();
    }
    return t;
}

}  // namespace

ConditionsReport run_conditions(const std::vector<TrialRecord>& records, const ConditionsConfig& cfg) {
    cfg.binning.validate();
    if (cfg.methods.empty()) throw InvalidInput("no PID methods selected");

    std::map<std::string, std::pair<std::vector<TrialRecord>, std::vector<TrialRecord>>> by_unit;
    for (const auto& r : records) {
        auto& slot = by_unit[r.unit_id];
        (r.condition == Condition::control ? slot.first : slot.second).push_back(r);
    }
    if (by_unit.empty()) throw InvalidInput("no trial records");

    ConditionsReport rep;
    rep.config = cfg;
    std::vector<const std::string*> ids;
    for (const auto& [id, _] : by_unit) ids.push_back(&id);
    rep.units.resize(ids.size());
    parallel_for(ids.size(), cfg.threads, [&](std::size_t i) {
        const auto& [c, t] = by_unit.at(*ids[i]);
        rep.units[i] = analyze_unit(*ids[i], c, t, cfg);
    });
    for (const auto& u : rep.units) {
        for (const auto& w : u.warnings) rep.warnings.push_back("unit " + u.unit_id + ": " + w);
    }

    std::vector<const UnitResult*> used;
    for (const auto& u : rep.units) {
        if (!u.skipped) used.push_back(&u);
    }
    if (used.empty()) rep.warnings.push_back("no unit had usable data in both conditions");

    // Sample summaries and tests, one quantity at a time.
    for (Method m : cfg.methods) {
        for (auto name : kComponentNames) {
            std::vector<double> vc, vt, vd;
            for (const auto* u : used) {
                auto it = u->differences.find({m, std::string(name)});
                if (it == u->differences.end()) continue;
                vc.push_back(100.0 * component_value(*find_method(u->conditions[0].analysis, m)->normalized, name));
                vt.push_back(100.0 * component_value(*find_method(u->conditions[1].analysis, m)->normalized, name));
                vd.push_back(it->second);
            }
            const std::string method(to_string(m));
            for (auto [cond, v] : {std::pair{"control", &vc}, std::pair{"treatment", &vt}, std::pair{"diff", &vd}}) {
                if (!v->empty()) rep.summaries.push_back({std::string(name), method, cond, v->size(), median_quartiles(*v)});
            }
            rep.tests.push_back(run_test(std::string(name) + "." + method + ".diff", vd));
        }
    }
    std::vector<double> uc, ut, ud;
    for (const auto* u : used) {
        uc.push_back(u->uia_control);
        ut.push_back(u->uia_treatment);
        ud.push_back(u->uia_diff);
    }
    for (auto [cond, v] : {std::pair{"control", &uc}, std::pair{"treatment", &ut}, std::pair{"diff", &ud}}) {
        if (!v->empty()) rep.summaries.push_back({"uia", "", cond, v->size(), median_quartiles(*v)});
        rep.tests.push_back(run_test(std::string("uia.") + cond, *v));
    }
    std::sort(rep.tests.begin(), rep.tests.end(), [](const TestResult& l, const TestResult& r) { return l.id < r.id; });

    for (const auto& [family, members] : cfg.families) {
        const int m = static_cast<int>(members.size());
        for (const auto& id : members) {
            auto it = std::find_if(rep.tests.begin(), rep.tests.end(), [&](const TestResult& t) { return t.id == id; });
            if (it == rep.tests.end()) {
                rep.warnings.push_back("family " + family + " names unknown test " + id);
                continue;
            }
            // A test declared in several families takes the largest correction.
            if (m >= it->family_size) {
                it->family = family;
                it->family_size = m;
            }
        }
    }
    for (auto& t : rep.tests) {
        if (t.wilcoxon) t.p_corrected = bonferroni(t.wilcoxon->p, t.family_size);
    }
    return rep;
}

// --------------------------------------------------------------------- sweep

void SweepSpec::validate() const {
    if (basal_ranges.empty() || apical_ranges.empty()) throw InvalidInput("sweep needs at least one range per input");
    if (methods.empty()) throw InvalidInput("no PID methods selected");
    for (const auto& r : basal_ranges) {
        if (r.lo > r.hi || r.lo < 0) throw InvalidInput("bad basal range " + r.label());
    }
    for (const auto& r : apical_ranges) {
        if (r.lo > r.hi || r.lo < 0) throw InvalidInput("bad apical range " + r.label());
    }
    binning.validate();
}

int uia_sign(double v) {
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
}

std::vector<Bifurcation> find_bifurcations(const std::vector<SweepCell>& cells) {
    std::vector<GridRange> apicals;
    for (const auto& c : cells) {
        if (std::find(apicals.begin(), apicals.end(), c.apical) == apicals.end()) apicals.push_back(c.apical);
    }
    std::vector<Bifurcation> out;
    for (const auto& ap : apicals) {
        std::vector<const SweepCell*> row;
        for (const auto& c : cells) {
            if (c.apical == ap && c.analysis) row.push_back(&c);
        }
        std::stable_sort(row.begin(), row.end(), [](const SweepCell* l, const SweepCell* r) {
            return std::pair{l->basal.hi, l->basal.lo} < std::pair{r->basal.hi, r->basal.lo};
        });
        // Zero-UIA cells neither start nor end a flip.
        const SweepCell* last = nullptr;
        for (const SweepCell* c : row) {
            const int sign = uia_sign(c->uia);
            if (sign == 0) continue;
            if (last && uia_sign(last->uia) != sign) out.push_back({ap, last->basal, c->basal, last->uia, c->uia});
            last = c;
        }
    }
    return out;
}

SweepReport run_sweep(const std::vector<GridRecord>& records, const SweepSpec& spec) {
    spec.validate();
    int basal_step = 0, apical_step = 0;
    for (const auto& r : records) {
        basal_step = std::gcd(basal_step, r.n_basal);
        apical_step = std::gcd(apical_step, r.n_apical);
    }
    auto aligned = [](const GridRange& r, int step) { return step == 0 || (r.lo % step == 0 && r.hi % step == 0); };
    for (const auto& r : spec.basal_ranges) {
        if (!aligned(r, basal_step)) throw InvalidInput("basal range " + r.label() + " is off the grid step " + std::to_string(basal_step));
    }
    for (const auto& r : spec.apical_ranges) {
        if (!aligned(r, apical_step)) throw InvalidInput("apical range " + r.label() + " is off the grid step " + std::to_string(apical_step));
    }
    SweepReport rep;
    rep.spec = spec;
    for (const auto& b : spec.basal_ranges) {
        for (const auto& a : spec.apical_ranges) {
            SweepCell c;
            c.basal = b;
            c.apical = a;
            rep.cells.push_back(std::move(c));
        }
    }
    const Tolerances tol;
    double uia_tol = 0.0;
    for (Method m : spec.methods) uia_tol = std::max(uia_tol, tol.for_method(m));

    parallel_for(rep.cells.size(), spec.threads, [&](std::size_t i) {
        SweepCell& c = rep.cells[i];
        c.uia_tolerance = uia_tol;
        for (const auto& r : records) {
            if (c.basal.contains(r.n_basal) && c.apical.contains(r.n_apical)) ++c.n_records;
        }
        try {
            const JointDistribution d = ingest_grid(records, spec.binning, c.basal, c.apical);
            c.analysis = analyze_distribution(d, spec.methods, spec.ledgers);
        } catch (const InvalidInput& e) {
            c.error = e.what();
            return;
        }
        c.uia = unique_info_asymmetry(c.analysis->summary);
        double lo = c.uia, hi = c.uia;
        for (const auto& r : c.analysis->methods) {
            if (!r.raw) continue;
            const double v = r.raw->unq_b - r.raw->unq_a;
            c.method_uia[r.method] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.uia_spread = hi - lo;
        c.uia_consistent = c.uia_spread <= uia_tol;
    });
    for (const auto& c : rep.cells) {
        const std::string where = "cell " + c.basal.label() + " x " + c.apical.label() + ": ";
        if (!c.error.empty()) rep.warnings.push_back(where + c.error);
        if (!c.analysis) continue;
        for (const auto& r : c.analysis->methods) {
            if (!r.error.empty()) rep.warnings.push_back(where + std::string(to_string(r.method)) + " failed: " + r.error);
        }
        if (!c.uia_consistent) rep.warnings.push_back(where + "methods disagree on UIA beyond tolerance");
    }
    rep.bifurcations = find_bifurcations(rep.cells);
    return rep;
}

// ----------------------------------------------------------------------- CCS

std::string_view to_string(Tri t) {
    switch (t) {
        case Tri::yes: return "yes";
        case Tri::no: return "no";
        case Tri::indeterminate: return "indeterminate";
    }
    return "?";
}

Tri derive_ccs1(int apical_zero_rows, int apical_zero_spiking) {
    if (apical_zero_rows == 0) return Tri::indeterminate;
    return apical_zero_spiking > 0 ? Tri::yes : Tri::no;
}

Tri derive_ccs2(int basal_zero_rows, int basal_zero_spiking) {
    if (basal_zero_rows == 0) return Tri::indeterminate;
    return basal_zero_spiking == 0 ? Tri::yes : Tri::no;
}

Tri derive_ccs3(const std::optional<Ccs3Numbers>& n, const CcsThresholds& t) {
    if (!n) return Tri::indeterminate;
    const bool ok = n->unq_b >= t.theta_b && std::abs(n->unq_a) <= t.theta_a && (n->syn >= t.theta_s || n->shd >= t.theta_s);
    return ok ? Tri::yes : Tri::no;
}

Tri derive_ccs4(const std::vector<double>& s) {
    if (s.size() < 3) return Tri::indeterminate;
    const auto peak = std::max_element(s.begin(), s.end());
    return (peak != s.begin() && s.back() < *peak - 1e-12) ? Tri::yes : Tri::no;
}

CcsReport classify_ccs(const std::vector<GridRecord>& records, const SweepSpec& spec, const CcsThresholds& t) {
    CcsReport rep;
    rep.thresholds = t;
    rep.sweep = run_sweep(records, spec);
    const auto& cells = rep.sweep.cells;

    auto numbers_for = [](const SweepCell& c, Method m) -> std::optional<Ccs3Numbers> {
        if (!c.analysis || !(c.analysis->summary.jmi > 0.0)) return std::nullopt;
        const MethodResult* r = find_method(*c.analysis, m);
        if (!r || !r->raw) return std::nullopt;
        const double j = c.analysis->summary.jmi;
        return Ccs3Numbers{r->raw->unq_b / j, r->raw->unq_a / j, r->raw->shd / j, r->raw->syn / j};
    };

    for (const auto& c : cells) {
        int az = 0, azs = 0, bz = 0, bzs = 0;
        for (const auto& r : records) {
            if (r.n_apical == 0 && c.basal.contains(r.n_basal)) {
                ++az;
                if (r.spike_count > 0) ++azs;
            }
            if (r.n_basal == 0 && c.apical.contains(r.n_apical)) {
                ++bz;
                if (r.spike_count > 0) ++bzs;
            }
        }
        // Basal ranges of this apical range in (hi, lo) order.
        std::vector<const SweepCell*> row;
        for (const auto& o : cells) {
            if (o.apical == c.apical) row.push_back(&o);
        }
        std::stable_sort(row.begin(), row.end(), [](const SweepCell* l, const SweepCell* r) {
            return std::pair{l->basal.hi, l->basal.lo} < std::pair{r->basal.hi, r->basal.lo};
        });

        for (Method m : spec.methods) {
            CcsVerdict v;
            v.basal = c.basal;
            v.apical = c.apical;
            v.method = m;
            v.apical_zero_rows = az;
            v.apical_zero_spiking = azs;
            v.basal_zero_rows = bz;
            v.basal_zero_spiking = bzs;
            v.numbers = numbers_for(c, m);
            for (const auto* o : row) {
                if (auto n = numbers_for(*o, m)) v.ccs4_series.push_back(n->shd + n->syn);
            }
            v.ccs1 = derive_ccs1(az, azs);
            v.ccs2 = derive_ccs2(bz, bzs);
            v.ccs3 = derive_ccs3(v.numbers, t);
            v.ccs4 = derive_ccs4(v.ccs4_series);
            rep.verdicts.push_back(std::move(v));
        }
    }
    return rep;
}

}  // namespace pidcmp
