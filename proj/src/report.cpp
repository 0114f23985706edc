#include "pidcmp/report.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pidcmp {

using nlohmann::json;

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string pct1(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
    return buf;
}

std::string pct1_of_percent(double percent) { return pct1(percent / 100.0); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir.string());
}

json summary_json(const InfoSummary& s) {
    return {{"h_y", s.h_y},
            {"mi_yb", s.mi_yb},
            {"mi_ya", s.mi_ya},
            {"cmi_yb_given_a", s.cmi_yb_given_a},
            {"cmi_ya_given_b", s.cmi_ya_given_b},
            {"jmi", s.jmi},
            {"ii", s.ii}};
}

json components_json(const PidComponents& c) {
    return {{"unq_b", c.unq_b}, {"unq_a", c.unq_a}, {"shd", c.shd}, {"syn", c.syn}};
}

json analysis_json(const DistributionAnalysis& a) {
    json j;
    j["shape"] = {a.dist.ny(), a.dist.nb(), a.dist.na()};
    j["measures_bits"] = summary_json(a.summary);
    j["measures_normalized"] = a.normalized ? summary_json(*a.normalized) : json(nullptr);
    json methods = json::object();
    for (const auto& r : a.methods) {
        json m;
        m["bits"] = r.raw ? components_json(*r.raw) : json(nullptr);
        m["fraction_of_jmi"] = r.normalized ? components_json(*r.normalized) : json(nullptr);
        if (!r.error.empty()) m["error"] = r.error;
        methods[std::string(to_string(r.method))] = m;
    }
    j["methods"] = methods;
    return j;
}

json methods_json(const std::vector<Method>& ms) {
    json j = json::array();
    for (Method m : ms) j.push_back(std::string(to_string(m)));
    return j;
}

json binning_json(const BinningConfig& b) {
    json cats = json::array();
    for (const auto& c : b.output_categories) cats.push_back(c.label);
    return {{"n_input_bins", b.n_input_bins}, {"output_categories", cats}};
}

json range_list(const std::vector<GridRange>& rs) {
    json j = json::array();
    for (const auto& r : rs) j.push_back(r.label());
    return j;
}

json quartiles_json(const Quartiles& q) { return {{"q_lower", q.lower}, {"median", q.median}, {"q_upper", q.upper}}; }

std::string safe_name(std::string s) {
    for (char& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return s;
}

void write_ledgers(const DistributionAnalysis& a, const std::filesystem::path& dir, const std::string& stem) {
    for (const auto& r : a.methods) {
        if (!r.ledger) continue;
        prepare_dir(dir);
        std::ostringstream os;
        r.ledger->write_csv(os, a.dist);
        write_file(dir / (safe_name(stem + "_" + std::string(to_string(r.method))) + ".csv"), os.str());
    }
}

const char* kMeasureNames[] = {"h_y", "mi_yb", "mi_ya", "cmi_yb_given_a", "cmi_ya_given_b", "jmi", "ii"};

std::array<double, 7> measure_values(const InfoSummary& s) {
    return {s.h_y, s.mi_yb, s.mi_ya, s.cmi_yb_given_a, s.cmi_ya_given_b, s.jmi, s.ii};
}

}  // namespace

// ---------------------------------------------------------------- conditions

json to_json(const ConditionsReport& r) {
    json j;
    json cfg;
    cfg["binning"] = binning_json(r.config.binning);
    cfg["methods"] = methods_json(r.config.methods);
    cfg["drop_silent"] = r.config.drop_silent;
    cfg["families"] = r.config.families;
    j["config"] = cfg;
    j["conventions"] = {{"values", "percent of joint mutual information unless marked bits"},
                        {"differences", "treatment minus control"},
                        {"zero_differences", "dropped before ranking"},
                        {"ties", "mid-ranks, exact null distribution over sign assignments"},
                        {"quantiles", "type 7 linear interpolation"},
                        {"correction", "Bonferroni min(m p, 1), m = declared family size"}};

    json units = json::array();
    for (const auto& u : r.units) {
        json ju;
        ju["unit"] = u.unit_id;
        ju["skipped"] = u.skipped;
        ju["warnings"] = u.warnings;
        json conds = json::object();
        for (const auto& c : u.conditions) {
            json jc = analysis_json(c.analysis);
            jc["n_records"] = c.n_records;
            conds[std::string(to_string(c.condition))] = jc;
        }
        ju["conditions"] = conds;
        if (!u.skipped) {
            json diffs = json::object();
            for (const auto& [key, v] : u.differences) diffs[std::string(to_string(key.first))][key.second] = v;
            ju["differences_percent"] = diffs;
            ju["uia_percent"] = {{"control", u.uia_control}, {"treatment", u.uia_treatment}, {"diff", u.uia_diff}};
        }
        units.push_back(ju);
    }
    j["units"] = units;

    json tests = json::array();
    for (const auto& t : r.tests) {
        json jt;
        jt["id"] = t.id;
        jt["values"] = t.values;
        jt["family"] = t.family.empty() ? json(nullptr) : json(t.family);
        jt["family_size"] = t.family_size;
        if (!t.values.empty()) jt["quartiles"] = quartiles_json(t.quartiles);
        if (t.wilcoxon) {
            jt["p"] = t.wilcoxon->p;
            jt["n_used"] = t.wilcoxon->n_used;
            jt["n_zero_dropped"] = t.wilcoxon->n_zero_dropped;
            jt["w_plus"] = t.wilcoxon->w_plus;
            jt["ties"] = t.wilcoxon->ties;
        }
        jt["p_corrected"] = t.p_corrected ? json(*t.p_corrected) : json(nullptr);
        if (!t.error.empty()) jt["error"] = t.error;
        tests.push_back(jt);
    }
    j["tests"] = tests;

    json sums = json::array();
    for (const auto& s : r.summaries) {
        json js = quartiles_json(s.quartiles);
        js["quantity"] = s.quantity;
        js["method"] = s.method;
        js["condition"] = s.condition;
        js["n"] = s.n;
        sums.push_back(js);
    }
    j["summaries"] = sums;
    j["warnings"] = r.warnings;
    return j;
}

void write_report(const ConditionsReport& r, const std::filesystem::path& dir) {
    prepare_dir(dir);
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");

    std::ostringstream comp, meas, diff, tests, sums, txt;
    comp << "unit,condition,method,component,value\n";
    meas << "unit,condition,measure,value\n";
    diff << "unit,method,component,value\n";
    for (const auto& u : r.units) {
        for (const auto& c : u.conditions) {
            const std::string cond(to_string(c.condition));
            const auto mv = measure_values(c.analysis.summary);
            for (std::size_t i = 0; i < mv.size(); ++i) {
                meas << u.unit_id << ',' << cond << ',' << kMeasureNames[i] << ',' << format_g6(mv[i]) << '\n';
            }
            for (const auto& m : c.analysis.methods) {
                if (!m.normalized) continue;
                const auto vals = m.normalized->values();
                for (std::size_t i = 0; i < 4; ++i) {
                    comp << u.unit_id << ',' << cond << ',' << to_string(m.method) << ',' << kComponentNames[i] << ','
                         << format_g6(100.0 * vals[i]) << '\n';
                }
            }
            if (r.config.ledgers) {
                write_ledgers(c.analysis, dir / "ledgers", u.unit_id + "_" + cond);
            }
        }
        if (u.skipped) continue;
        for (const auto& [key, v] : u.differences) {
            diff << u.unit_id << ',' << to_string(key.first) << ',' << key.second << ',' << format_g6(v) << '\n';
        }
        diff << u.unit_id << ",any,uia," << format_g6(u.uia_diff) << '\n';
    }

    tests << "test,n_used,n_zero_dropped,w_plus,ties,p,family,family_size,p_corrected,note\n";
    for (const auto& t : r.tests) {
        tests << t.id << ',';
        if (t.wilcoxon) {
            tests << t.wilcoxon->n_used << ',' << t.wilcoxon->n_zero_dropped << ',' << format_g6(t.wilcoxon->w_plus)
                  << ',' << (t.wilcoxon->ties ? "yes" : "no") << ',' << format_g6(t.wilcoxon->p);
        } else {
            tests << ",,,,";
        }
        tests << ',' << t.family << ',' << t.family_size << ','
              << (t.p_corrected ? format_g6(*t.p_corrected) : std::string()) << ',' << t.error << '\n';
    }

    sums << "quantity,method,condition,n,q_lower,median,q_upper\n";
    for (const auto& s : r.summaries) {
        sums << s.quantity << ',' << s.method << ',' << s.condition << ',' << s.n << ','
             << format_g6(s.quartiles.lower) << ',' << format_g6(s.quartiles.median) << ','
             << format_g6(s.quartiles.upper) << '\n';
    }

    txt << "Condition comparison (percent of joint MI; median [q1, q3])\n\n";
    std::size_t used = 0;
    for (const auto& u : r.units) used += u.skipped ? 0 : 1;
    txt << "units analysed: " << used << " of " << r.units.size() << "\n\n";
    for (const auto& s : r.summaries) {
        txt << (s.method.empty() ? std::string("-") : s.method) << ' ' << s.quantity << ' ' << s.condition << ": "
            << pct1_of_percent(s.quartiles.median) << " [" << pct1_of_percent(s.quartiles.lower) << ", "
            << pct1_of_percent(s.quartiles.upper) << "] n=" << s.n << '\n';
    }
    txt << "\nSigned-rank tests (two-sided, exact)\n";
    for (const auto& t : r.tests) {
        txt << t.id << ": ";
        if (t.wilcoxon) {
            txt << "p=" << format_g6(t.wilcoxon->p);
            if (t.family_size > 1) txt << " corrected=" << format_g6(*t.p_corrected) << " (m=" << t.family_size << ")";
        } else {
            txt << t.error;
        }
        txt << '\n';
    }
    if (!r.warnings.empty()) {
        txt << "\nWarnings\n";
        for (const auto& w : r.warnings) txt << "- " << w << '\n';
    }

    write_file(dir / "components.csv", comp.str());
    write_file(dir / "measures.csv", meas.str());
    write_file(dir / "differences.csv", diff.str());
    write_file(dir / "tests.csv", tests.str());
    write_file(dir / "summaries.csv", sums.str());
    write_file(dir / "summary.txt", txt.str());
}

// --------------------------------------------------------------------- sweep

json to_json(const SweepReport& r) {
    json j;
    json spec;
    spec["basal_ranges"] = range_list(r.spec.basal_ranges);
    spec["apical_ranges"] = range_list(r.spec.apical_ranges);
    spec["binning"] = binning_json(r.spec.binning);
    spec["methods"] = methods_json(r.spec.methods);
    spec["normalize"] = r.spec.normalize;
    j["spec"] = spec;

    json cells = json::array();
    for (const auto& c : r.cells) {
        json jc;
        jc["basal_range"] = c.basal.label();
        jc["apical_range"] = c.apical.label();
        jc["n_records"] = c.n_records;
        if (c.analysis) {
            jc["analysis"] = analysis_json(*c.analysis);
            jc["uia_bits"] = c.uia;
            json mu = json::object();
            for (const auto& [m, v] : c.method_uia) mu[std::string(to_string(m))] = v;
            jc["method_uia_bits"] = mu;
            jc["uia_spread_bits"] = c.uia_spread;
            jc["uia_tolerance_bits"] = c.uia_tolerance;
            jc["uia_consistent"] = c.uia_consistent;
        }
        if (!c.error.empty()) jc["error"] = c.error;
        cells.push_back(jc);
    }
    j["cells"] = cells;

    json bif = json::array();
    for (const auto& b : r.bifurcations) {
        bif.push_back({{"apical_range", b.apical.label()},
                       {"basal_from", b.basal_from.label()},
                       {"basal_to", b.basal_to.label()},
                       {"uia_from_bits", b.uia_from},
                       {"uia_to_bits", b.uia_to}});
    }
    j["bifurcations"] = bif;
    j["warnings"] = r.warnings;
    return j;
}

namespace {

void write_sweep_tables(const SweepReport& r, const std::filesystem::path& dir) {
    std::ostringstream comp, meas, uia, bif, txt;
    comp << "basal_range,apical_range,method,component,value\n";
    meas << "basal_range,apical_range,measure,value\n";
    uia << "basal_range,apical_range,method,uia,uia_spread,uia_tolerance,uia_consistent\n";
    bif << "apical_range,basal_from,basal_to,uia_from,uia_to\n";
    const char* unit = r.spec.normalize ? "percent of joint MI" : "bits";
    txt << "Grid sweep (components in " << unit << ")\n\n";

    for (const auto& c : r.cells) {
        const std::string key = c.basal.label() + ',' + c.apical.label();
        txt << "B " << c.basal.label() << " x A " << c.apical.label() << ": ";
        if (!c.analysis) {
            txt << "skipped (" << c.error << ")\n";
            continue;
        }
        const auto& a = *c.analysis;
        const auto mv = measure_values(a.summary);
        for (std::size_t i = 0; i < mv.size(); ++i) meas << key << ',' << kMeasureNames[i] << ',' << format_g6(mv[i]) << '\n';
        meas << key << ",n_records," << c.n_records << '\n';
        txt << "JMI " << format_g6(a.summary.jmi) << " bits, UIA " << format_g6(c.uia) << " bits\n";
        for (const auto& m : a.methods) {
            const PidComponents* pc = r.spec.normalize ? (m.normalized ? &*m.normalized : nullptr) : (m.raw ? &*m.raw : nullptr);
            txt << "  " << to_string(m.method) << ':';
            if (!pc) {
                txt << " failed\n";
                continue;
            }
            const auto vals = pc->values();
            for (std::size_t i = 0; i < 4; ++i) {
                const double v = r.spec.normalize ? 100.0 * vals[i] : vals[i];
                comp << key << ',' << to_string(m.method) << ',' << kComponentNames[i] << ',' << format_g6(v) << '\n';
                txt << ' ' << kComponentNames[i] << '=' << (r.spec.normalize ? pct1(vals[i]) : format_g6(vals[i]));
            }
            txt << '\n';
        }
        uia << key << ",shannon," << format_g6(c.uia) << ',' << format_g6(c.uia_spread) << ','
            << format_g6(c.uia_tolerance) << ',' << (c.uia_consistent ? "yes" : "no") << '\n';
        for (const auto& [m, v] : c.method_uia) {
            uia << key << ',' << to_string(m) << ',' << format_g6(v) << ',' << format_g6(c.uia_spread) << ','
                << format_g6(c.uia_tolerance) << ',' << (c.uia_consistent ? "yes" : "no") << '\n';
        }
        if (r.spec.ledgers) write_ledgers(a, dir / "ledgers", c.basal.label() + "_" + c.apical.label());
    }
    txt << "\nUIA sign changes along basal ranges\n";
    if (r.bifurcations.empty()) txt << "none\n";
    for (const auto& b : r.bifurcations) {
        bif << b.apical.label() << ',' << b.basal_from.label() << ',' << b.basal_to.label() << ','
            << format_g6(b.uia_from) << ',' << format_g6(b.uia_to) << '\n';
        txt << "A " << b.apical.label() << ": " << b.basal_from.label() << " -> " << b.basal_to.label() << " ("
            << format_g6(b.uia_from) << " -> " << format_g6(b.uia_to) << " bits)\n";
    }
    if (!r.warnings.empty()) {
        txt << "\nWarnings\n";
        for (const auto& w : r.warnings) txt << "- " << w << '\n';
    }
    write_file(dir / "components.csv", comp.str());
    write_file(dir / "measures.csv", meas.str());
    write_file(dir / "uia.csv", uia.str());
    write_file(dir / "bifurcations.csv", bif.str());
    write_file(dir / "summary.txt", txt.str());
}

}  // namespace

void write_report(const SweepReport& r, const std::filesystem::path& dir) {
    prepare_dir(dir);
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_sweep_tables(r, dir);
}

// ----------------------------------------------------------------------- CCS

json to_json(const CcsReport& r) {
    json j = to_json(r.sweep);
    j["thresholds"] = {{"theta_b", r.thresholds.theta_b}, {"theta_a", r.thresholds.theta_a}, {"theta_s", r.thresholds.theta_s}};
    json vs = json::array();
    for (const auto& v : r.verdicts) {
        json jv;
        jv["basal_range"] = v.basal.label();
        jv["apical_range"] = v.apical.label();
        jv["method"] = std::string(to_string(v.method));
        jv["ccs1"] = std::string(to_string(v.ccs1));
        jv["ccs2"] = std::string(to_string(v.ccs2));
        jv["ccs3"] = std::string(to_string(v.ccs3));
        jv["ccs4"] = std::string(to_string(v.ccs4));
        jv["apical_zero_rows"] = v.apical_zero_rows;
        jv["apical_zero_spiking"] = v.apical_zero_spiking;
        jv["basal_zero_rows"] = v.basal_zero_rows;
        jv["basal_zero_spiking"] = v.basal_zero_spiking;
        jv["numbers"] = v.numbers ? json{{"unq_b", v.numbers->unq_b},
                                         {"unq_a", v.numbers->unq_a},
                                         {"shd", v.numbers->shd},
                                         {"syn", v.numbers->syn}}
                                  : json(nullptr);
        jv["ccs4_series"] = v.ccs4_series;
        vs.push_back(jv);
    }
    j["verdicts"] = vs;
    return j;
}

void write_report(const CcsReport& r, const std::filesystem::path& dir) {
    prepare_dir(dir);
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_sweep_tables(r.sweep, dir);

    std::ostringstream csv, txt;
    csv << "basal_range,apical_range,method,ccs1,ccs2,ccs3,ccs4,unq_b,unq_a,shd,syn,"
           "apical_zero_rows,apical_zero_spiking,basal_zero_rows,basal_zero_spiking\n";
    txt << "Cooperative context-sensitivity (thresholds: unq_b >= " << pct1(r.thresholds.theta_b)
        << "%, |unq_a| <= " << pct1(r.thresholds.theta_a) << "%, syn or shd >= " << pct1(r.thresholds.theta_s)
        << "% of joint MI)\n\n";
    for (const auto& v : r.verdicts) {
        csv << v.basal.label() << ',' << v.apical.label() << ',' << to_string(v.method) << ',' << to_string(v.ccs1)
            << ',' << to_string(v.ccs2) << ',' << to_string(v.ccs3) << ',' << to_string(v.ccs4);
        if (v.numbers) {
            csv << ',' << format_g6(v.numbers->unq_b) << ',' << format_g6(v.numbers->unq_a) << ','
                << format_g6(v.numbers->shd) << ',' << format_g6(v.numbers->syn);
        } else {
            csv << ",,,,";
        }
        csv << ',' << v.apical_zero_rows << ',' << v.apical_zero_spiking << ',' << v.basal_zero_rows << ','
            << v.basal_zero_spiking << '\n';
        txt << "B " << v.basal.label() << " x A " << v.apical.label() << ' ' << to_string(v.method)
            << ": CCS1=" << to_string(v.ccs1) << " CCS2=" << to_string(v.ccs2) << " CCS3=" << to_string(v.ccs3)
            << " CCS4=" << to_string(v.ccs4) << '\n';
    }
    write_file(dir / "ccs.csv", csv.str());
    write_file(dir / "ccs_summary.txt", txt.str());
}

}  // namespace pidcmp
