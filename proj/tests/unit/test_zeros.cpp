#include <cmath>

#include "doctest.h"
#include "sklab/ensembles.hpp"
#include "sklab/rng.hpp"
#include "sklab/special.hpp"
#include "sklab/zero_stats.hpp"
#include "sklab/zeros.hpp"

using namespace sklab;

TEST_CASE("roots of a known polynomial") {
    // (z - 1)(z - 2)(z + i) = z^3 + (i - 3) z^2 + (2 - 3i) z + 2i
    std::vector<cdouble> a{{0, 2}, {2, -3}, {-3, 1}, {1, 0}};
    ZeroSet zs = polynomial_zeros(a);
    REQUIRE(zs.total_multiplicity() == 3);
    for (cdouble r : {cdouble(1, 0), cdouble(2, 0), cdouble(0, -1)}) {
        double best = 1e9;
        for (const auto& p : zs.points) best = std::min(best, fs_distance(p.point, FSPoint::affine(r)));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("degree drop sends roots to infinity") {
    std::vector<cdouble> a{{-1, 0}, {1, 0}, {0, 0}, {0, 0}};
    ZeroSet zs = polynomial_zeros(a);
    CHECK(zs.total_multiplicity() == 3);
    int at_inf = 0;
    for (const auto& p : zs.points)
        if (p.point.is_infinity()) at_inf += p.multiplicity;
    CHECK(at_inf == 2);
}

TEST_CASE("every draw has exactly k zeros with multiplicity") {
    for (int k : {1, 5, 20, 100}) {
        for (auto kind : {EnsembleKind::gaussian, EnsembleKind::spherical}) {
            for (std::uint64_t i = 0; i < 20; ++i) {
                Rng rng = replicate_rng(11, i);
                Section s = sample({1, k, kind}, rng);
                ZeroSet zs = find_zeros(s);
                CHECK(zs.total_multiplicity() == k);
                for (const auto& p : zs.points) CHECK(s.hnorm(p.point) < 1e-8 * s.coeff_norm());
            }
        }
    }
}

TEST_CASE("variance bipotential approaches the leading coefficient") {
    TestFunction y1 = TestFunction::harmonic(1, 0);
    double lead = variance_leading_coeff(y1);
    CHECK(lead == doctest::Approx(zeta_value(3.0) / (16 * kPi) * laplacian_norm2(y1)).epsilon(1e-12));
    double prev = std::abs(50 * variance_bipotential(50, y1) / lead - 1.0);
    double cur = std::abs(400 * variance_bipotential(400, y1) / lead - 1.0);
    CHECK(cur < prev);
    CHECK(cur < 0.02);
}

TEST_CASE("universal pair correlation limits") {
    CHECK(universal_pair_correlation(0.01) < 1e-3);
    CHECK(universal_pair_correlation(6.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(validate_pair_bins({0.0, 0.3}), LabError);
}

TEST_CASE("mean count in a half-sphere") {
    StatSummary s = expected_density_check({1, 30, EnsembleKind::gaussian},
                                           Region::cap_with_area(FSPoint::affine(0.0), kPi / 2), 2000, {3, 1});
    CHECK(std::abs(s.mean - 15.0) < 4 * s.se_mean);
}
