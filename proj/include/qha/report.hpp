#pragma once
// Experiment reports: named scalars, data series, and pass/fail verdicts,
// each verdict carrying the tolerance it was judged against. Serialized as
// JSON (everything) plus CSV (the data series, long format) for plotting.
//
// Determinism contract: identical config and seed give bit-identical values
// in the results and verdicts subtrees. Wall time lives in a separate timing
// field which is exempt.

#include "qha/common.hpp"
#include "qha/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qha {

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double tolerance = 0.0;  // bound it was judged against
    std::string relation;    // how value relates to tolerance when passing
    std::string note;
};

struct ExperimentReport {
    int schema_version = 1;
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::pair<std::string, std::vector<double>>> arrays;
    std::vector<Verdict> verdicts;
    std::string convention_ledger;  // normalization constants in effect
    std::string notes;
    double wall_seconds = 0.0;

    bool all_pass() const {
        for (const Verdict& v : verdicts)
            if (!v.pass) return false;
        return true;
    }

    int fail_count() const {
        int n = 0;
        for (const Verdict& v : verdicts) n += v.pass ? 0 : 1;
        return n;
    }

    void scalar(const std::string& name, double value) {
        scalars.emplace_back(name, value);
    }

    void series(const std::string& name, std::vector<double> values) {
        arrays.emplace_back(name, std::move(values));
    }

    // value must stay below (or equal to) the bound
    Verdict& check_below(const std::string& name, double value, double bound,
                         const std::string& note = "") {
        verdicts.push_back({name, value <= bound, value, bound, "<=", note});
        return verdicts.back();
    }

    // value must stay above (or equal to) the bound
    Verdict& check_above(const std::string& name, double value, double bound,
                         const std::string& note = "") {
        verdicts.push_back({name, value >= bound, value, bound, ">=", note});
        return verdicts.back();
    }

    // exact integer equality, tolerance zero by construction
    Verdict& check_equal(const std::string& name, long value, long expected,
                         const std::string& note = "") {
        verdicts.push_back({name, value == expected, double(value),
                            double(expected), "==", note});
        return verdicts.back();
    }

    Verdict& check_true(const std::string& name, bool pass,
                        const std::string& note = "") {
        verdicts.push_back({name, pass, pass ? 1.0 : 0.0, 1.0, "==", note});
        return verdicts.back();
    }
};

inline nlohmann::json verdict_json(const Verdict& v) {
    nlohmann::json j;
    j["name"] = v.name;
    j["pass"] = v.pass;
    j["value"] = v.value;
    j["tolerance"] = v.tolerance;
    j["relation"] = v.relation;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["schema_version"] = r.schema_version;
    j["experiment"] = r.experiment;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : r.config_echo) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::json scalars = nlohmann::json::object();
    for (const auto& [k, v] : r.scalars) scalars[k] = v;
    nlohmann::json arrays = nlohmann::json::object();
    for (const auto& [k, v] : r.arrays) arrays[k] = v;
    j["results"] = {{"scalars", scalars}, {"arrays", arrays}};
    j["verdicts"] = nlohmann::json::array();
    for (const Verdict& v : r.verdicts) j["verdicts"].push_back(verdict_json(v));
    j["all_pass"] = r.all_pass();
    j["convention_ledger"] = r.convention_ledger;
    if (!r.notes.empty()) j["notes"] = r.notes;
    j["timing"] = {{"wall_seconds", r.wall_seconds}};
    return j;
}

// The deterministic portion: everything except timing.
inline std::string report_fingerprint(const ExperimentReport& r) {
    nlohmann::json j = report_json(r);
    j.erase("timing");
    return j.dump();
}

// <dir>/<experiment>.json plus <dir>/<experiment>.csv; the CSV holds every
// scalar (index 0) and series element as rows of series,index,value.
inline void write_report_files(const std::string& dir, const ExperimentReport& r) {
    std::filesystem::create_directories(dir);
    const std::string base = (std::filesystem::path(dir) / r.experiment).string();
    {
        std::ofstream out(base + ".json");
        if (!out) throw std::runtime_error(base + ".json: cannot open for writing");
        out << report_json(r).dump(2) << '\n';
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, value] : r.scalars)
        rows.push_back({name, "0", format_real(value)});
    for (const auto& [name, values] : r.arrays)
        for (std::size_t i = 0; i < values.size(); ++i)
            rows.push_back({name, std::to_string(i), format_real(values[i])});
    write_csv(base + ".csv", {"series", "index", "value"}, rows);
}

}  // namespace qha
