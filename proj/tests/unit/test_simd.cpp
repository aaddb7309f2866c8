#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "sklab/simd.hpp"

using namespace sklab::simd;

namespace {

struct Data {
    std::vector<double> ar, ai, zr, zi;
};

Data make(int degree, std::size_t count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Data d;
    for (int j = 0; j <= degree; ++j) {
        d.ar.push_back(g(rng));
        d.ai.push_back(g(rng));
    }
    for (std::size_t i = 0; i < count; ++i) {
        d.zr.push_back(0.6 * g(rng));
        d.zi.push_back(0.6 * g(rng));
    }
    return d;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(1.0, scale); }

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree") {
    const KernelTable* v = avx2_kernels();
    if (!v) {
        MESSAGE("AVX2 kernels unavailable; only the scalar path is tested");
        return;
    }
    const KernelTable& s = scalar_kernels();
    for (int degree : {1, 2, 3, 4, 5, 7, 16, 33, 100, 301}) {
        for (std::size_t count : {std::size_t(1), std::size_t(3), std::size_t(4), std::size_t(9), std::size_t(64)}) {
            Data d = make(degree, count, unsigned(degree * 100 + count));
            PolyView a{d.ar.data(), d.ai.data(), degree};
            std::vector<double> b(10 * count), c(10 * count);
            auto p = [&](std::vector<double>& v, int i) { return v.data() + i * count; };
            s.horner2(a, d.zr.data(), d.zi.data(), count, p(b, 0), p(b, 1), p(b, 2), p(b, 3), p(b, 4), p(b, 5));
            v->horner2(a, d.zr.data(), d.zi.data(), count, p(c, 0), p(c, 1), p(c, 2), p(c, 3), p(c, 4), p(c, 5));
            s.horner(a, d.zr.data(), d.zi.data(), count, p(b, 6), p(b, 7), p(b, 8), p(b, 9));
            v->horner(a, d.zr.data(), d.zi.data(), count, p(c, 6), p(c, 7), p(c, 8), p(c, 9));
            for (std::size_t i = 0; i < 10 * count; ++i) {
                CHECK(rel(b[i], c[i], std::abs(b[i])) < 1e-12);
            }
            for (std::size_t i = 0; i < count; ++i) {
                double sr1, si1, sr2, si2;
                s.pair_sum(d.zr.data(), d.zi.data(), count, i, &sr1, &si1);
                v->pair_sum(d.zr.data(), d.zi.data(), count, i, &sr2, &si2);
                CHECK(rel(sr1, sr2, std::abs(sr1)) < 1e-12);
                CHECK(rel(si1, si2, std::abs(si1)) < 1e-12);
            }
        }
    }
}

TEST_CASE("scalar Horner matches direct evaluation") {
    Data d = make(5, 3, 7);
    PolyView a{d.ar.data(), d.ai.data(), 5};
    std::vector<double> pr(3), pi(3), dr(3), di(3);
    scalar_kernels().horner(a, d.zr.data(), d.zi.data(), 3, pr.data(), pi.data(), dr.data(), di.data());
    for (int i = 0; i < 3; ++i) {
        std::complex<double> z(d.zr[i], d.zi[i]), p = 0, dp = 0, zk = 1;
        for (int j = 0; j <= 5; ++j) {
            p += std::complex<double>(d.ar[j], d.ai[j]) * zk;
            if (j < 5) dp += double(j + 1) * std::complex<double>(d.ar[j + 1], d.ai[j + 1]) * zk;
            zk *= z;
        }
        CHECK(pr[i] == doctest::Approx(p.real()).epsilon(1e-13));
        CHECK(pi[i] == doctest::Approx(p.imag()).epsilon(1e-13));
        CHECK(dr[i] == doctest::Approx(dp.real()).epsilon(1e-13));
        CHECK(di[i] == doctest::Approx(dp.imag()).epsilon(1e-13));
    }
}
