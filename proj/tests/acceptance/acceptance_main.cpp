#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sklab/lab/criteria.hpp"

int main(int argc, char** argv) {
    using namespace sklab::lab;
    CLI::App app{"Acceptance criteria: one PASS/FAIL line per criterion"};
    std::string tier_name = "desk", json_path, only;
    int workers = 1;
    app.add_option("--tier", tier_name, "smoke, desk or full");
    app.add_option("-w,--workers", workers, "Worker threads (LAB_WORKERS overrides)")->check(CLI::PositiveNumber);
    app.add_option("--json", json_path, "Write a machine-readable report");
    app.add_option("--only", only, "Run a single criterion id");
    CLI11_PARSE(app, argc, argv);

    auto tier = parse_tier(tier_name);
    if (!tier) {
        std::cerr << "unknown tier '" << tier_name << "'\n";
        return 1;
    }
    workers = effective_workers(workers);
    std::vector<std::string> ids = only.empty() ? tier_criteria(*tier) : std::vector<std::string>{only};
    std::vector<CriterionReport> reports;
    for (const auto& id : ids) {
        reports.push_back(run_criterion(id, workers));
        std::cout << format_report(reports.back()) << std::flush;
    }
    int failed = 0;
    for (const auto& r : reports) failed += r.passed ? 0 : 1;
    std::cout << "SUMMARY " << reports.size() - failed << "/" << reports.size() << " criteria passed\n";
    if (!json_path.empty()) std::ofstream(json_path) << report_json(reports).dump(2) << "\n";
    return failed ? 1 : 0;
}
