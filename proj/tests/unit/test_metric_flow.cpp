#include <cmath>

#include "doctest.h"
#include "sklab/metric_flow.hpp"
#include "sklab/special.hpp"

using namespace sklab;

TEST_CASE("walk stays on det-one positive Hermitian matrices") {
    for (int k : {1, 2, 5}) {
        Rng rng = replicate_rng(31, std::uint64_t(k));
        PositiveHermitian p = brownian_path({k, 2.0, Rescale::none, 0.0}, rng);
        CHECK(p.dim() == k + 1);
        CHECK(p.hermitian_error() < 1e-12);
        CHECK(p.det_error() < 1e-8);
        CHECK(p.min_eigenvalue() > 0.0);
    }
}

TEST_CASE("default step respects the step budget and is even") {
    for (int k : {1, 3, 8}) {
        for (double t : {0.1, 1.0, 10.0}) {
            FlowConfig f{k, t, Rescale::none, 0.0};
            CHECK(f.steps() % 2 == 0);
            CHECK(f.step() <= std::min(t / 200.0, 0.01) + 1e-15);
        }
    }
    Rng rng = replicate_rng(34, 0);
    try {
        brownian_path({8, 10.0, Rescale::none, 0.5}, rng);
        FAIL("expected StepTooLarge");
    } catch (const LabError& e) {
        CHECK(e.kind() == ErrorKind::StepTooLarge);
    }
}

TEST_CASE("Mabuchi rescaling is a change of clock") {
    FlowConfig a{3, 0.01, Rescale::mabuchi, 0.0};
    FlowConfig b{3, 0.01 * 9 * 4, Rescale::none, 0.0};
    CHECK(a.effective_time() == b.effective_time());
    Rng r1 = replicate_rng(32, 0), r2 = replicate_rng(32, 0);
    PositiveHermitian pa = brownian_path(a, r1), pb = brownian_path(b, r2);
    CHECK((pa.p - pb.p).norm() == 0.0);
}

TEST_CASE("potentials") {
    CMatrix p = CMatrix::Identity(2, 2);
    p(0, 0) = 3.0;
    p(1, 1) = 1.0 / 3.0;
    CHECK(relative_potential(p, FSPoint::affine(0.0), 1) == doctest::Approx(0.5 * std::log(3.0)));
    CHECK(relative_potential(p, FSPoint::infinity(), 1) == doctest::Approx(-0.5 * std::log(3.0)));
    CHECK(relative_potential(CMatrix::Identity(4, 4), FSPoint::affine({0.3, 2.0}), 3) == doctest::Approx(0.0));
    cdouble z(0.7, -0.4);
    CHECK(bergman_potential(CMatrix::Identity(6, 6), z, 5) == doctest::Approx(identity_potential(z, 5)).epsilon(1e-13));
    CHECK(identity_potential(z, 5) - phi_h(z) == doctest::Approx(std::log(6.0 / kPi) / 10.0));
}

TEST_CASE("I2 kernel") {
    CHECK(i2_kernel(1.0, 0.0) == 0.0);
    for (double x : {0.1, 0.5, 0.9, 1.0}) CHECK(std::abs(i2_kernel(50.0, x) - dilog(x)) < 1e-3);
    CHECK(i2_kernel(0.5, 0.5) < i2_kernel(2.0, 0.5));
    CHECK(i2_kernel(2.0, 0.5) < i2_kernel(10.0, 0.5));
    CHECK(std::isfinite(i2_derivative(2.0, 1e-12)));
    CHECK(i2_derivative(50.0, 0.5) == doctest::Approx(-std::log(0.5) / 0.5).epsilon(1e-4));
}

TEST_CASE("hyperbolic radial law") {
    CHECK(h3_radial_cdf(0.5, 0.0) == 0.0);
    CHECK(h3_radial_cdf(0.5, 50.0) == doctest::Approx(1.0).epsilon(1e-9));
    double a = 1.0, h = 1e-4;
    double deriv = (h3_radial_cdf(0.5, a + h) - h3_radial_cdf(0.5, a - h)) / (2 * h);
    CHECK(deriv == doctest::Approx(h3_radial_density(0.5, a)).epsilon(1e-6));
}

TEST_CASE("small-time walk: E delta^2 = 2 (d^2 - 1) t") {
    auto d2 = path_distances({1, 0.01, Rescale::none, 0.0}, 4000, {33, 1});
    StatSummary s = summarize(d2);
    CHECK(std::abs(s.mean - 0.06) < 4 * s.se_mean + 0.002);
}

TEST_CASE("potential mean stays unbiased when P is far beyond double-precision conditioning") {
    FlowConfig f{5, 10.0, Rescale::none, 0.0};
    MeanPotentialResult m = mean_potential_check(f, {FSPoint::affine(0.0), FSPoint::infinity()}, 200, {35, 1});
    CHECK(m.drift == 5.0);
    CHECK(std::abs(m.pooled.mean - 5.0) < 4 * m.pooled.se_mean);
}
