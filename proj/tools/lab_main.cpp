#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sklab/core.hpp"
#include "sklab/lab/criteria.hpp"
#include "sklab/lab/experiment.hpp"

namespace {

int cmd_run(const std::string& path) {
    using namespace sklab::lab;
    ExperimentConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const sklab::LabError& e) {
        std::cerr << "lab: " << sklab::error_kind_name(e.kind()) << ": " << e.what() << "\n";
        return 1;
    }
    cfg.workers = effective_workers(cfg.workers);
    try {
        std::string summary;
        int code = run_and_write(cfg, &summary);
        std::cout << summary;
        return code;
    } catch (const sklab::LabError& e) {
        std::cerr << "lab: numerical failure: " << sklab::error_kind_name(e.kind()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return 2;
    }
}

int cmd_suite(const std::string& level, int workers, const std::string& json_path, const std::string& only) {
    using namespace sklab::lab;
    auto tier = parse_tier(level);
    if (!tier) {
        std::cerr << "lab: unknown suite level '" << level << "' (smoke, desk, full)\n";
        return 1;
    }
    workers = effective_workers(workers);
    auto print = [](const CriterionReport& r) {
        std::cout << format_report(r);
        std::cout.flush();
    };
    std::vector<CriterionReport> reports;
    if (!only.empty()) {
        try {
            reports.push_back(run_criterion(only, workers));
        } catch (const sklab::LabError& e) {
            std::cerr << "lab: " << e.what() << "\n";
            return 1;
        }
        print(reports.back());
    } else {
        reports = run_suite(*tier, workers, print);
    }
    int failed = 0;
    for (const auto& r : reports) failed += r.passed ? 0 : 1;
    std::cout << (failed ? "FAILED " : "PASSED ") << reports.size() - failed << "/" << reports.size() << "\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << report_json(reports).dump(2) << "\n";
    }
    return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random section statistics lab"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("config", config_path, "Config file")->required();

    std::string level, json_path, only;
    int workers = 1;
    auto* suite = app.add_subcommand("suite", "Run an acceptance tier (smoke, desk, full)");
    suite->add_option("level", level, "smoke, desk or full")->required();
    suite->add_option("-w,--workers", workers, "Worker threads (LAB_WORKERS overrides)")->check(CLI::PositiveNumber);
    suite->add_option("--json", json_path, "Write a machine-readable report");
    suite->add_option("--only", only, "Run a single criterion id");

    std::string experiment;
    auto* print = app.add_subcommand("print-config", "Print a documented config template");
    print->add_option("experiment", experiment, "Experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run) return cmd_run(config_path);
    if (*suite) return cmd_suite(level, workers, json_path, only);
    auto e = sklab::lab::parse_experiment(experiment);
    if (!e) {
        std::cerr << "lab: unknown experiment '" << experiment << "'\n";
        return 1;
    }
    std::cout << sklab::lab::config_template(*e).dump(2) << "\n";
    return 0;
}
