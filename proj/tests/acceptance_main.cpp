// Acceptance gate: one line per shipped criterion, nonzero exit when any
// fails. Everything derives from the default configuration; the last
// criterion reruns the suite for determinism, runtime, the negative control,
// and halved-dimension spot checks.

#include "qha/experiments.hpp"

#include <cstdio>
#include <set>
#include <string>
#include <vector>

namespace {

struct Line {
    int number;
    std::string description;
    bool pass;
    std::vector<std::string> details;
};

const qha::ExperimentReport& find_report(const qha::SuiteResult& suite,
                                         const std::string& name) {
    for (const qha::ExperimentReport& r : suite.reports)
        if (r.experiment == name) return r;
    throw std::runtime_error("missing report " + name);
}

void collect_failures(const qha::ExperimentReport& r, Line& line) {
    for (const qha::Verdict& v : r.verdicts)
        if (!v.pass)
            line.details.push_back(r.experiment + ": " + v.name + " (value " +
                                   std::to_string(v.value) + ", bound " +
                                   std::to_string(v.tolerance) + ")");
}

Line experiment_criterion(int number, const std::string& description,
                          const qha::SuiteResult& suite,
                          const std::vector<std::string>& names,
                          double runtime_bound = 0.0) {
    Line line{number, description, true, {}};
    for (const std::string& name : names) {
        const qha::ExperimentReport& r = find_report(suite, name);
        line.pass = line.pass && r.all_pass();
        collect_failures(r, line);
        if (runtime_bound > 0.0 && r.wall_seconds >= runtime_bound) {
            line.pass = false;
            line.details.push_back(name + ": took " + std::to_string(r.wall_seconds) +
                                   "s, budget " + std::to_string(runtime_bound) + "s");
        }
    }
    return line;
}

}  // namespace

int main() {
    using namespace qha;
    std::vector<Line> lines;
    try {
        ExperimentContext ctx = make_context(ConfigMap{});
        SuiteResult first = run_suite(ctx);

        lines.push_back(experiment_criterion(
            1, "displacement product law holds on the interior block", first,
            {"ccr-check"}, 30.0));
        lines.push_back(experiment_criterion(
            2, "parity conjugates displacements to their reflections", first,
            {"parity-check"}, 10.0));
        lines.push_back(experiment_criterion(
            3, "weighted-shift weights match the radial oracle and approach one",
            first, {"toeplitz-shift"}));
        lines.push_back(experiment_criterion(
            4, "winding symbol carries index -1, stable under refinement", first,
            {"index"}, 60.0));
        lines.push_back(experiment_criterion(
            5, "index matches the symmetry class mod 2; even blocks share one index",
            first, {"index-parity", "even-odd"}));
        lines.push_back(experiment_criterion(
            6, "index is congruent to the rotation class with a consistent sign",
            first, {"congruence"}));
        lines.push_back(experiment_criterion(
            7, "parity is modulation invariant yet discontinuous under shifts",
            first, {"modulation-scan"}));
        lines.push_back(experiment_criterion(
            8, "coherent localization profiles match the Gaussian oracle", first,
            {"localization-scan"}));
        lines.push_back(experiment_criterion(
            9, "Berezin envelope decays along moving directions, flat along fixed",
            first, {"intersection-probe"}));
        lines.push_back(experiment_criterion(
            10, "synthesis inverts analysis on the seeded interior family", first,
            {"fourier-roundtrip"}, 120.0));
        lines.push_back(experiment_criterion(
            11, "operator transform acts as right multiplication by parity", first,
            {"fop-identity"}, 300.0));
        lines.push_back(experiment_criterion(
            12, "analysis maps operator products to twisted convolutions", first,
            {"twisted-conv"}));
        lines.push_back(experiment_criterion(
            13, "narrowing spikes quantize toward the parity operator", first,
            {"delta-parity"}));

        // the ideal experiment carries two criteria: the conjugation family
        // and everything about ranks, singular values, and annihilation
        {
            const ExperimentReport& ideal = find_report(first, "ideal-suite");
            const std::string conj_name =
                "parity conjugation matches the reflected quantization";
            Line c14{14, "parity conjugation of a quantization mirrors symbol reflection",
                     true, {}};
            Line c15{15,
                     "annihilation, ranks, and singular values survive the "
                     "transform partners",
                     true, {}};
            for (const Verdict& v : ideal.verdicts) {
                Line& target = v.name == conj_name ? c14 : c15;
                if (!v.pass) {
                    target.pass = false;
                    target.details.push_back("ideal-suite: " + v.name);
                }
            }
            lines.push_back(c14);
            lines.push_back(c15);
        }

        // criterion 16: run-level properties
        {
            Line c16{16,
                     "suite is deterministic, inside budget, and fails exactly "
                     "the negative control",
                     true, {}};

            if (!first.all_pass()) {
                c16.pass = false;
                c16.details.push_back("default suite has failing experiments");
            }
            if (first.wall_seconds >= 600.0) {
                c16.pass = false;
                c16.details.push_back("suite took " +
                                      std::to_string(first.wall_seconds) +
                                      "s, budget 600s");
            } else {
                c16.details.push_back("suite wall " +
                                      std::to_string(first.wall_seconds) + "s");
            }

            SuiteResult second = run_suite(ctx);
            bool identical = true;
            for (std::size_t i = 0; i < first.reports.size(); ++i)
                identical = identical && report_fingerprint(first.reports[i]) ==
                                             report_fingerprint(second.reports[i]);
            if (!identical) {
                c16.pass = false;
                c16.details.push_back("rerun fingerprints differ");
            } else {
                c16.details.push_back("rerun fingerprints identical");
            }

            ConfigMap negative;
            negative.values["haar"] = "1";
            ExperimentContext neg_ctx = make_context(std::move(negative));
            SuiteResult control = run_suite(neg_ctx);
            std::set<std::string> failed, expected{"fourier-roundtrip", "fop-identity",
                                                   "convention-audit"};
            for (const ExperimentReport& r : control.reports)
                if (!r.all_pass()) failed.insert(r.experiment);
            if (failed != expected) {
                c16.pass = false;
                std::string got;
                for (const std::string& f : failed) got += (got.empty() ? "" : ", ") + f;
                c16.details.push_back("negative control failed {" + got + "}");
            } else {
                c16.details.push_back(
                    "negative control fails exactly the synthesis-bound "
                    "experiments");
            }

            ConfigMap halved_ccr;
            halved_ccr.values["ccr-check.dim"] = "32";
            halved_ccr.values["ccr-check.refined_dim"] = "64";
            ExperimentReport spot_ccr =
                run_experiment("ccr-check", make_context(std::move(halved_ccr)));
            ConfigMap halved_rt;
            halved_rt.values["fourier-roundtrip.dim"] = "24";
            ExperimentReport spot_rt = run_experiment(
                "fourier-roundtrip", make_context(std::move(halved_rt)));
            if (!spot_ccr.all_pass() || !spot_rt.all_pass()) {
                c16.pass = false;
                c16.details.push_back("halved-dimension spot checks failed");
            } else {
                c16.details.push_back("halved-dimension spot checks pass");
            }
            lines.push_back(c16);
        }
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }

    int failed = 0;
    for (const Line& line : lines) {
        std::printf("[%s] criterion %2d: %s\n", line.pass ? "PASS" : "FAIL",
                    line.number, line.description.c_str());
        for (const std::string& d : line.details) std::printf("        %s\n", d.c_str());
        if (!line.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", int(lines.size()) - failed, lines.size());
    return failed == 0 ? 0 : 1;
}
