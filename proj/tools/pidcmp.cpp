// pidcmp: condition comparison, grid sweeps and CCS classification from CSV.
// Exit status: 0 success, 2 finished with warnings, 1 fatal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pidcmp/analysis.hpp"
#include "pidcmp/report.hpp"

using nlohmann::json;
using namespace pidcmp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitWarnings = 2;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return v.dump();
    throw std::runtime_error("unsupported config value " + v.dump());
}

// Ranges and method lists may be given as JSON arrays or comma-separated text.
std::string list_text(const json& v) {
    if (!v.is_array()) return scalar_text(v);
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : ",") + scalar_text(x);
    return out;
}

// Fills options that were not given on the command line from a JSON object
// whose keys are long option names without dashes.
void apply_config(CLI::App& sub, const json& cfg) {
    if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config") continue;
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt) throw std::runtime_error("unknown config key '" + key + "' for " + sub.get_name());
        if (opt->count() > 0) continue;
        if (key == "family" && value.is_object()) {
            for (const auto& [name, ids] : value.items()) opt->add_result(name + "=" + list_text(ids));
        } else if (key == "family" && value.is_array()) {
            for (const auto& item : value) opt->add_result(scalar_text(item));
        } else if (opt->get_expected_max() == 0 && value.is_boolean()) {
            if (value.get<bool>()) opt->add_result("true");
            else continue;
        } else {
            opt->add_result(list_text(value));
        }
        opt->run_callback();
    }
}

std::map<std::string, std::vector<std::string>> parse_families(const std::vector<std::string>& specs) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidInput("family must look like name=id1,id2: " + s);
        std::vector<std::string> ids;
        std::string rest = s.substr(eq + 1), item;
        std::stringstream ss(rest);
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) ids.push_back(item);
        }
        if (ids.empty()) throw InvalidInput("family " + s.substr(0, eq) + " has no tests");
        out[s.substr(0, eq)] = ids;
    }
    return out;
}

void print_warnings(const std::vector<std::string>& ws) {
    for (const auto& w : ws) std::cerr << "warning: " << w << '\n';
}

SweepSpec spec_from_json(const json& j) {
    SweepSpec spec;
    auto need = [&](const char* k) -> const json& {
        if (!j.contains(k)) throw InvalidInput(std::string("spec file lacks '") + k + "'");
        return j.at(k);
    };
    spec.basal_ranges = parse_ranges(list_text(need("basal_ranges")));
    spec.apical_ranges = parse_ranges(list_text(need("apical_ranges")));
    if (j.contains("outputs")) spec.binning = BinningConfig::parse(list_text(j.at("outputs")));
    if (j.contains("methods")) spec.methods = parse_methods(list_text(j.at("methods")));
    if (j.contains("normalize")) spec.normalize = j.at("normalize").get<bool>();
    if (j.contains("ledger")) spec.ledgers = j.at("ledger").get<bool>();
    return spec;
}

CcsThresholds thresholds_from_json(const json& j) {
    CcsThresholds t;
    if (!j.contains("thresholds")) return t;
    const auto& th = j.at("thresholds");
    if (th.contains("theta_b")) t.theta_b = th.at("theta_b").get<double>();
    if (th.contains("theta_a")) t.theta_a = th.at("theta_a").get<double>();
    if (th.contains("theta_s")) t.theta_s = th.at("theta_s").get<double>();
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial information decomposition comparison of two-input neurons"};
    app.require_subcommand(1);

    // conditions
    struct {
        std::string trials, outputs = "0,1,2+", methods = "all", out, config;
        int bins = 4, threads = 1;
        bool ledger = false, drop_silent = false;
        std::vector<std::string> families;
    } c;
    auto* cond = app.add_subcommand("conditions", "Within-unit control vs treatment comparison");
    cond->add_option("--trials", c.trials, "Trial CSV");
    cond->add_option("--bins", c.bins, "Quantile bins per input")->check(CLI::PositiveNumber);
    cond->add_option("--outputs", c.outputs, "Output spike-count categories");
    cond->add_option("--methods", c.methods, "Comma-separated methods or 'all'");
    cond->add_option("--out", c.out, "Output directory");
    cond->add_flag("--ledger", c.ledger, "Write pointwise ledgers");
    cond->add_flag("--drop-silent", c.drop_silent, "Drop stimuli with no spikes in any trial");
    cond->add_option("--family", c.families, "Bonferroni family name=test1,test2 (repeatable)");
    cond->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cond->add_option("--config", c.config, "JSON file with defaults for these flags");

    // sweep
    struct {
        std::string grid, basal, apical, outputs = "0,1-2,3-4", methods = "all", out, config;
        bool no_normalize = false, ledger = false;
        int threads = 1;
    } s;
    auto* sweep = app.add_subcommand("sweep", "Grid sweep over basal x apical input ranges");
    sweep->add_option("--grid", s.grid, "Grid CSV");
    sweep->add_option("--basal-ranges", s.basal, "Basal ranges, e.g. 0-100,0-110");
    sweep->add_option("--apical-ranges", s.apical, "Apical ranges");
    sweep->add_option("--outputs", s.outputs, "Output spike-count categories");
    sweep->add_option("--methods", s.methods, "Comma-separated methods or 'all'");
    sweep->add_option("--out", s.out, "Output directory");
    sweep->add_flag("--no-normalize", s.no_normalize, "Report components in bits");
    sweep->add_flag("--ledger", s.ledger, "Write pointwise ledgers");
    sweep->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--config", s.config, "JSON file with defaults for these flags");

    // ccs
    struct {
        std::string grid, spec, out, config;
        int threads = 1;
    } k;
    auto* ccs = app.add_subcommand("ccs", "Cooperative context-sensitivity verdicts per sweep cell");
    ccs->add_option("--grid", k.grid, "Grid CSV");
    ccs->add_option("--spec", k.spec, "JSON sweep spec with optional thresholds");
    ccs->add_option("--out", k.out, "Output directory");
    ccs->add_option("--threads", k.threads, "Worker threads")->check(CLI::PositiveNumber);
    ccs->add_option("--config", k.config, "JSON file with defaults for these flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitFatal;
    }

    auto require = [](const std::string& v, const char* flag) {
        if (v.empty()) throw InvalidInput(std::string("missing required ") + flag);
    };

    try {
        std::vector<std::string> warnings;
        if (cond->parsed()) {
            if (!c.config.empty()) apply_config(*cond, load_json(c.config));
            require(c.trials, "--trials");
            require(c.out, "--out");
            ConditionsConfig cfg;
            cfg.binning = BinningConfig::parse(c.outputs, c.bins);
            cfg.methods = parse_methods(c.methods);
            cfg.ledgers = c.ledger;
            cfg.drop_silent = c.drop_silent;
            if (!c.families.empty()) cfg.families = parse_families(c.families);
            cfg.threads = c.threads;
            const auto report = run_conditions(read_trials_csv(c.trials), cfg);
            write_report(report, c.out);
            warnings = report.warnings;
        } else if (sweep->parsed()) {
            if (!s.config.empty()) apply_config(*sweep, load_json(s.config));
            require(s.grid, "--grid");
            require(s.basal, "--basal-ranges");
            require(s.apical, "--apical-ranges");
            require(s.out, "--out");
            SweepSpec spec;
            spec.basal_ranges = parse_ranges(s.basal);
            spec.apical_ranges = parse_ranges(s.apical);
            spec.binning = BinningConfig::parse(s.outputs);
            spec.methods = parse_methods(s.methods);
            spec.normalize = !s.no_normalize;
            spec.ledgers = s.ledger;
            spec.threads = s.threads;
            const auto report = run_sweep(read_grid_csv(s.grid), spec);
            write_report(report, s.out);
            warnings = report.warnings;
        } else {
            if (!k.config.empty()) apply_config(*ccs, load_json(k.config));
            require(k.grid, "--grid");
            require(k.spec, "--spec");
            require(k.out, "--out");
            const json sj = load_json(k.spec);
            SweepSpec spec = spec_from_json(sj);
            spec.threads = k.threads;
            const auto report = classify_ccs(read_grid_csv(k.grid), spec, thresholds_from_json(sj));
            write_report(report, k.out);
            warnings = report.sweep.warnings;
        }
        print_warnings(warnings);
        return warnings.empty() ? kExitOk : kExitWarnings;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFatal;
    }
}
