#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sklab::lab {

using Json = nlohmann::json;

enum class Experiment {
    density,
    paircorr,
    linstat,
    normality,
    numbervar,
    hole,
    crit,
    critvals,
    excursion,
    metricflow,
    kernels,
};

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

struct ExperimentConfig {
    Experiment experiment = Experiment::density;
    Json params;  // experiment-specific keys, validated by parse_config
    std::size_t n = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string output = ".";
    bool assert_mode = false;
    bool svg = true;

    // Canonical JSON of everything that determines the results (no workers, output or svg).
    std::string param_json() const;
    // 16 hex digits of FNV-1a over param_json().
    std::string hash() const;
};

// Throws LabError(ConfigError) on missing or invalid keys; seed is mandatory.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
// Documented template for `lab print-config`.
Json config_template(Experiment e);

// LAB_WORKERS overrides the configured count when set.
int effective_workers(int configured);

struct ResultRow {
    std::string experiment;
    std::string param_json;
    std::string stat;
    double value = 0.0;
    double stderr_value = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string build;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Plot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<double> curve_x, curve_y;               // closed-form reference
    std::vector<double> point_x, point_y, point_err;  // Monte Carlo estimates
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<Check> checks;
    std::optional<Plot> plot;
};

RunResult run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);
std::string render_svg(const Plot& plot);

// Shortest round-trip decimal form.
std::string format_double(double v);

const char* build_id();

// Writes CSV (and SVG) under config.output; returns the process exit code (0, or 2 on failed checks / NaN).
int run_and_write(const ExperimentConfig& config, std::string* summary = nullptr);

}  // namespace sklab::lab
