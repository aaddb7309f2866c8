#include <cmath>

#include "doctest.h"
#include "sklab/fs_geometry.hpp"
#include "sklab/kernel_oracle.hpp"
#include "sklab/rng.hpp"
#include "sklab/special.hpp"
#include "sklab/test_function.hpp"

using namespace sklab;

TEST_CASE("special functions") {
    CHECK(dilog(0.0) == 0.0);
    CHECK(dilog(1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-15));
    CHECK(dilog(0.5) == doctest::Approx(kPi * kPi / 12.0 - 0.5 * std::log(2.0) * std::log(2.0)).epsilon(1e-15));
    for (double x : {0.1, 0.3, 0.7, 0.99}) {
        CHECK(dilog(x) + dilog(1 - x) ==
              doctest::Approx(kPi * kPi / 6.0 - std::log(x) * std::log(1 - x)).epsilon(1e-14));
    }
    CHECK(zeta_value(3.0) == doctest::Approx(1.2020569031595942).epsilon(1e-14));
    CHECK(zeta_value(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-14));
    CHECK(std::exp(log_binomial(10, 3)) == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("Fubini-Study geometry") {
    FSPoint o = FSPoint::affine(0.0), one = FSPoint::affine(1.0), inf = FSPoint::infinity();
    CHECK(fs_distance(o, inf) == doctest::Approx(kPi / 2));
    CHECK(fs_distance(o, one) == doctest::Approx(kPi / 4));
    CHECK(berezin_base(o, one) == doctest::Approx(0.5));
    CHECK(berezin_gap(o, FSPoint::affine(1e-9)) == doctest::Approx(1e-18).epsilon(1e-6));
    CHECK(phi_h(1.0) == doctest::Approx(0.5 * std::log(2.0)));
    CHECK(region_geometry(Region::whole_space()).area == doctest::Approx(kPi));
    Region half = Region::cap_with_area(o, kPi / 2);
    CHECK(region_geometry(half).area == doctest::Approx(kPi / 2));
    CHECK(*region_geometry(half).boundary_length == doctest::Approx(kPi));
    Region b = Region::cap_with_boundary(FSPoint::affine({0.3, -0.2}), kPi / 2);
    CHECK(*region_geometry(b).boundary_length == doctest::Approx(kPi / 2));
    FSPoint z = FSPoint::affine({0.4, -1.7});
    FSPoint back = FSPoint::from_unit_vector(z.unit_vector());
    CHECK(fs_distance(z, back) < 1e-12);
}

TEST_CASE("Bergman kernel: closed form against the quadrature-built kernel") {
    Rng rng = replicate_rng(5, 0);
    std::normal_distribution<double> g;
    for (int k = 1; k <= 10; ++k) {
        QuadratureKernel q(k);
        CHECK(bergman_diagonal({1, k}) == doctest::Approx((k + 1) / kPi).epsilon(1e-13));
        for (int i = 0; i < 10; ++i) {
            FSPoint z = FSPoint::from_unit_vector(normalized(Vec3{g(rng), g(rng), g(rng)}));
            FSPoint w = FSPoint::from_unit_vector(normalized(Vec3{g(rng), g(rng), g(rng)}));
            CHECK(std::abs(q.normalized(z, w) - normalized_kernel({1, k}, z, w)) < 1e-9);
            CHECK(std::abs(q.diagonal(z) - (k + 1) / kPi) < 1e-10);
        }
    }
    CHECK(normalized_kernel({1, 4}, FSPoint::affine(0.0), FSPoint::affine(1.0)) == doctest::Approx(0.25));
}

TEST_CASE("spherical harmonics are Laplacian eigenfunctions") {
    Vec3 n = normalized(Vec3{0.3, -0.5, 0.8});
    for (int l = 1; l <= 4; ++l) {
        for (int m = -l; m <= l; ++m) {
            TestFunction f = TestFunction::harmonic(l, m);
            CHECK(std::abs(f.laplacian(n)) == doctest::Approx(4.0 * l * (l + 1) * std::abs(f(n))).epsilon(1e-9));
        }
    }
    CHECK(integrate_fs([](const Vec3&) { return 1.0; }, 16) == doctest::Approx(kPi));
}
