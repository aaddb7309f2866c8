#include <cmath>
#include <vector>

#include "doctest.h"
#include "sklab/parallel.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"

using namespace sklab;

TEST_CASE("summaries") {
    std::vector<double> x{1, 2, 3, 4};
    StatSummary s = summarize(x);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.se_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
    LinearFit f = linear_fit(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("KS distance of uniform samples") {
    Rng rng = replicate_rng(41, 0);
    std::uniform_real_distribution<double> u;
    std::vector<double> x(20000);
    for (double& v : x) v = u(rng);
    CHECK(ks_distance(x, [](double t) { return std::clamp(t, 0.0, 1.0); }) < 0.015);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("ordered_map is independent of the worker count") {
    auto run = [](int workers) {
        std::vector<double> out;
        ordered_map<double>(
            1000, workers,
            [](std::size_t i) {
                Rng rng = replicate_rng(42, i);
                return std::normal_distribution<double>()(rng);
            },
            [&](std::size_t, double v) { out.push_back(v); });
        return out;
    };
    auto a = run(1);
    CHECK(a == run(4));
    CHECK(a == run(8));
    CHECK(replicate_rng(1, 2)() != replicate_rng(1, 3)());
}
