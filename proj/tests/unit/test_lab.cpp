#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sklab/core.hpp"
#include "sklab/lab/criteria.hpp"
#include "sklab/lab/experiment.hpp"

using namespace sklab;
using namespace sklab::lab;

namespace {

ErrorKind parse_error_kind(const Json& j) {
    try {
        parse_config(j);
    } catch (const LabError& e) {
        return e.kind();
    }
    FAIL("expected a LabError");
    return ErrorKind::DomainError;
}

}  // namespace

TEST_CASE("config validation") {
    Json ok{{"experiment", "density"}, {"k", 50}, {"n", 100}, {"seed", 7}};
    CHECK_NOTHROW(parse_config(ok));
    Json no_seed = ok;
    no_seed.erase("seed");
    CHECK(parse_error_kind(no_seed) == ErrorKind::ConfigError);
    CHECK(parse_error_kind({{"experiment", "nope"}, {"n", 1}, {"seed", 1}}) == ErrorKind::ConfigError);
    Json wide{{"experiment", "paircorr"}, {"k", 400}, {"n", 10}, {"seed", 1}, {"bins", {{"hi", 3.0}, {"width", 0.3}}}};
    CHECK(parse_error_kind(wide) == ErrorKind::BinTooWide);
    Json bad_k = ok;
    bad_k["k"] = 0;
    CHECK(parse_error_kind(bad_k) == ErrorKind::ConfigError);
    for (Experiment e : all_experiments()) CHECK_NOTHROW(parse_config(config_template(e)));
}

TEST_CASE("hash ignores runtime-only keys") {
    Json a{{"experiment", "density"}, {"k", 50}, {"n", 100}, {"seed", 7}, {"workers", 1}, {"output", "x"}};
    Json b = a;
    b["workers"] = 8;
    b["output"] = "y";
    CHECK(parse_config(a).hash() == parse_config(b).hash());
    b["seed"] = 8;
    CHECK(parse_config(a).hash() != parse_config(b).hash());
    CHECK(parse_config(a).hash().size() == 16);
}

TEST_CASE("CSV format") {
    ResultRow r{"density", R"({"k":50,"region":"a,b"})", "mean_count", 0.1, 2.5e-3, 10, 7, "v1"};
    std::string csv = to_csv({r});
    CHECK(csv == "experiment,param_json,stat,value,stderr,n,seed,build\n"
                 "density,\"{\"\"k\"\":50,\"\"region\"\":\"\"a,b\"\"}\",mean_count,0.1,0.0025,10,7,v1\n");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("runs are byte-identical across worker counts") {
    Json j{{"experiment", "density"}, {"k", 50}, {"n", 400}, {"seed", 7}, {"region", {{"kind", "half-sphere"}}}};
    ExperimentConfig c = parse_config(j);
    std::string ref = to_csv(run_experiment(c).rows);
    for (int w : {4, 8, 1}) {
        c.workers = w;
        CHECK(to_csv(run_experiment(c).rows) == ref);
    }
    CHECK(ref.find("mean_count") != std::string::npos);
}

TEST_CASE("run_and_write emits CSV and SVG and reports failed assertions") {
    auto dir = std::filesystem::temp_directory_path() / "sklab_test_out";
    std::filesystem::remove_all(dir);
    Json j{{"experiment", "excursion"}, {"k", 6}, {"u", {0.5, 0.8}}, {"n", 300}, {"seed", 3}, {"output", dir.string()}};
    ExperimentConfig c = parse_config(j);
    std::string summary;
    CHECK(run_and_write(c, &summary) == 0);
    std::string stem = "excursion-" + c.hash();
    CHECK(std::filesystem::exists(dir / (stem + ".csv")));
    std::ifstream svg(dir / (stem + ".svg"));
    std::stringstream ss;
    ss << svg.rdbuf();
    CHECK(ss.str().find("<polyline") != std::string::npos);
    CHECK(ss.str().find("<circle") != std::string::npos);

    // Covariance at k = 1 is far from the prediction with this few paths; assert mode turns that into exit 2.
    Json f{{"experiment", "metricflow"}, {"k", 1}, {"t", 1.0}, {"mode", "covariance"}, {"w", {0.01, 0.0}},
           {"n", 4}, {"seed", 1}, {"assert", true}, {"output", dir.string()}};
    ExperimentConfig fc = parse_config(f);
    RunResult rr = run_experiment(fc);
    bool any_failed = false;
    for (const auto& ch : rr.checks) any_failed = any_failed || !ch.passed;
    if (any_failed) CHECK(run_and_write(fc) == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("suite tiers") {
    CHECK(tier_criteria(Tier::smoke).size() == 3);
    CHECK(tier_criteria(Tier::desk).size() == 12);
    CHECK(tier_criteria(Tier::full).size() == 14);
    for (const auto& r : run_suite(Tier::smoke, 1)) CHECK(r.passed);
}
