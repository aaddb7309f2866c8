#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "doctest.h"
#include "sklab/critical.hpp"
#include "sklab/excursion.hpp"
#include "sklab/rng.hpp"

using namespace sklab;

TEST_CASE("expected critical count") {
    CHECK(expected_crit_count(1) == doctest::Approx(1.0));
    CHECK(expected_crit_count(2) == doctest::Approx(2.0));
    CHECK(expected_crit_count(10) == doctest::Approx(424.0 / 28.0));
}

TEST_CASE("k = 1 sections have a single maximum at the antipode of the zero") {
    for (std::uint64_t i = 0; i < 10; ++i) {
        Rng rng = replicate_rng(21, i);
        Section s = sample({1, 1, EnsembleKind::gaussian}, rng);
        CriticalSet cs = find_critical_points(s);
        REQUIRE(cs.points.size() == 1);
        CHECK(cs.points[0].index == CriticalIndex::max);
    }
}

TEST_CASE("Morse count #max - #saddle = 2 - k") {
    for (int k : {3, 8, 15}) {
        for (std::uint64_t i = 0; i < 10; ++i) {
            Rng rng = replicate_rng(22, i);
            CriticalSet cs = find_critical_points(sample({1, k, EnsembleKind::gaussian}, rng));
            int nmax = 0, nsad = 0;
            for (const auto& p : cs.points) (p.index == CriticalIndex::max ? nmax : nsad)++;
            CHECK(nmax - nsad == 2 - k);
        }
    }
}

TEST_CASE("critical value density integrates to 5/3") {
    double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double t) { return critical_value_density(t); }, 0.0, std::numeric_limits<double>::infinity(), 15);
    CHECK(integral == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
    CHECK(critical_value_bin_average(0.5, 0.5 + 1e-7) == doctest::Approx(critical_value_density(0.5)).epsilon(1e-6));
}

TEST_CASE("Euler characteristic polynomial") {
    for (int k : {2, 5, 10}) {
        CHECK(expected_euler_char(k, 1, 0, 1e-9) == doctest::Approx(2.0 - k));
        CHECK(expected_euler_char(k, 1, 0, 1.0) == doctest::Approx(0.0));
    }
    double u = 0.8, k = 10, v = 1 - u * u;
    CHECK(expected_euler_char(10, 1, 0, u) == doctest::Approx(std::pow(v, k - 1) * (k * k * u * u - k * v + 2 * v)));
}

TEST_CASE("coherent state attains the pointwise bound") {
    FSPoint z0 = FSPoint::affine({0.2, 0.7});
    Section s = coherent_state(12, z0);
    CHECK(s.hnorm(z0) / s.coeff_norm() == doctest::Approx(coherent_amplitude(12)).epsilon(1e-12));
    CHECK(sup_hnorm(s) / s.coeff_norm() == doctest::Approx(coherent_amplitude(12)).epsilon(1e-9));
    // A k-fold zero is not a Morse configuration.
    CHECK_THROWS_AS(euler_characteristic(s, 0.999), LabError);
}
