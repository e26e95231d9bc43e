// qha: configuration-driven experiment runner.
//
// Exit codes: 0 every verdict passed, 1 at least one failed, 2 configuration
// problem, 3 runtime failure.

#include <CLI11.hpp>

#include "qha/experiments.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

void print_report(const qha::ExperimentReport& r, bool verdict_lines) {
    std::printf("%s %-20s %6.2fs  %zu checks", r.all_pass() ? "[pass]" : "[FAIL]",
                r.experiment.c_str(), r.wall_seconds, r.verdicts.size());
    if (r.fail_count() > 0) std::printf(", %d failed", r.fail_count());
    std::printf("\n");
    for (const qha::Verdict& v : r.verdicts) {
        if (v.pass && !verdict_lines) continue;
        std::printf("   %s %s: %.6g %s %.6g\n", v.pass ? "ok  " : "FAIL",
                    v.name.c_str(), v.value, v.relation.c_str(), v.tolerance);
        if (!v.pass && !v.note.empty()) std::printf("        %s\n", v.note.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space experiment runner for truncated Fock spaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool show_checks = false;

    std::vector<std::string> requested;  // experiments to run, empty = suite
    CLI::App* suite = app.add_subcommand("suite", "run every experiment");
    CLI::App* schema = app.add_subcommand("schema", "print the configuration schema");
    std::vector<CLI::App*> runners{suite};
    for (const std::string& name : qha::experiment_names())
        runners.push_back(app.add_subcommand(name, "run the " + name + " experiment"));
    for (CLI::App* sub : runners) {
        sub->add_option("--config", config_path, "configuration file (defaults apply without one)");
        sub->add_option("--out", out_dir, "directory for JSON and CSV reports");
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_flag("--checks", show_checks, "print every check line, not only failures");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (schema->parsed()) {
        std::cout << qha::schema_text();
        return 0;
    }

    try {
        qha::ConfigMap cfg = config_path.empty() ? qha::ConfigMap{}
                                                 : qha::load_config(config_path);
        std::optional<std::string> out_override;
        if (!out_dir.empty()) out_override = out_dir;
        qha::ExperimentContext ctx = qha::make_context(std::move(cfg), seed, out_override);

        if (suite->parsed()) {
            qha::SuiteResult result = qha::run_suite(ctx);
            for (const qha::ExperimentReport& r : result.reports)
                print_report(r, show_checks);
            std::printf("%s suite  %6.2fs wall\n",
                        result.all_pass() ? "[pass]" : "[FAIL]", result.wall_seconds);
            if (!ctx.out_dir.empty()) {
                qha::write_suite_files(ctx.out_dir, result);
                std::printf("reports written to %s\n", ctx.out_dir.c_str());
            }
            return result.all_pass() ? 0 : 1;
        }

        for (CLI::App* sub : runners) {
            if (sub == suite || !sub->parsed()) continue;
            qha::ExperimentReport r = qha::run_experiment(sub->get_name(), ctx);
            print_report(r, show_checks);
            if (!ctx.out_dir.empty()) {
                qha::write_report_files(ctx.out_dir, r);
                std::printf("reports written to %s\n", ctx.out_dir.c_str());
            }
            return r.all_pass() ? 0 : 1;
        }
        std::cerr << "error: no experiment selected\n";
        return 2;
    } catch (const qha::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
