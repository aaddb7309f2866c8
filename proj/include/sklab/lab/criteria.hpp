#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sklab/lab/experiment.hpp"

namespace sklab::lab {

enum class Tier { smoke, desk, full };

std::optional<Tier> parse_tier(std::string_view name);
std::string_view tier_name(Tier t);

struct CriterionReport {
    std::string id;  // "1".."12", "7.full", "10.full" or "smoke.*"
    std::string title;
    bool passed = false;
    std::vector<Check> checks;
    double seconds = 0.0;
};

// Criterion ids run by a tier, in order.
std::vector<std::string> tier_criteria(Tier tier);

// Runs one criterion; exceptions are reported as a failed check.
CriterionReport run_criterion(const std::string& id, int workers);

// Runs every criterion of the tier, invoking on_done after each.
std::vector<CriterionReport> run_suite(Tier tier, int workers,
                                       const std::function<void(const CriterionReport&)>& on_done = {});

// "PASS <id> <title> (<seconds>s)" followed by indented check lines.
std::string format_report(const CriterionReport& r);
Json report_json(const std::vector<CriterionReport>& reports);

}  // namespace sklab::lab
