// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace sklab::simd::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// acc = acc * x + c (complex, lane-wise)
inline void cmuladd(__m256d& accr, __m256d& acci, __m256d xr, __m256d xi, __m256d cr, __m256d ci) {
    __m256d nr = _mm256_fmadd_pd(accr, xr, _mm256_fnmadd_pd(acci, xi, cr));
    __m256d ni = _mm256_fmadd_pd(accr, xi, _mm256_fmadd_pd(acci, xr, ci));
    accr = nr;
    acci = ni;
}

void pair_sum_range(double xr, double xi, const double* zr, const double* zi, std::size_t lo, std::size_t hi,
                    double& sr, double& si) {
    __m256d vxr = _mm256_set1_pd(xr), vxi = _mm256_set1_pd(xi);
    __m256d accr = _mm256_setzero_pd(), acci = _mm256_setzero_pd();
    __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = lo;
    for (; j + 4 <= hi; j += 4) {
        __m256d ur = _mm256_sub_pd(vxr, _mm256_loadu_pd(zr + j));
        __m256d ui = _mm256_sub_pd(vxi, _mm256_loadu_pd(zi + j));
        __m256d inv = _mm256_div_pd(one, _mm256_fmadd_pd(ur, ur, _mm256_mul_pd(ui, ui)));
        accr = _mm256_fmadd_pd(ur, inv, accr);
        acci = _mm256_fnmadd_pd(ui, inv, acci);
    }
    double ar = hsum(accr), ai = hsum(acci);
    for (; j < hi; ++j) {
        double ur = xr - zr[j], ui = xi - zi[j];
        double inv = 1.0 / (ur * ur + ui * ui);
        ar += ur * inv;
        ai -= ui * inv;
    }
    sr += ar;
    si += ai;
}

}  // namespace

void horner_avx2(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                 double* dr, double* di) {
    std::size_t t = 0;
    for (; t + 4 <= count; t += 4) {
        __m256d xr = _mm256_loadu_pd(zr + t), xi = _mm256_loadu_pd(zi + t);
        __m256d p_r = _mm256_set1_pd(a.re[a.degree]), p_i = _mm256_set1_pd(a.im[a.degree]);
        __m256d d_r = _mm256_setzero_pd(), d_i = _mm256_setzero_pd();
        for (int j = a.degree - 1; j >= 0; --j) {
            cmuladd(d_r, d_i, xr, xi, p_r, p_i);
            cmuladd(p_r, p_i, xr, xi, _mm256_set1_pd(a.re[j]), _mm256_set1_pd(a.im[j]));
        }
        _mm256_storeu_pd(pr + t, p_r);
        _mm256_storeu_pd(pi + t, p_i);
        _mm256_storeu_pd(dr + t, d_r);
        _mm256_storeu_pd(di + t, d_i);
    }
    if (t < count) horner_scalar(a, zr + t, zi + t, count - t, pr + t, pi + t, dr + t, di + t);
}

void horner2_avx2(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                  double* dr, double* di, double* sr, double* si) {
    std::size_t t = 0;
    for (; t + 4 <= count; t += 4) {
        __m256d xr = _mm256_loadu_pd(zr + t), xi = _mm256_loadu_pd(zi + t);
        __m256d p_r = _mm256_set1_pd(a.re[a.degree]), p_i = _mm256_set1_pd(a.im[a.degree]);
        __m256d d_r = _mm256_setzero_pd(), d_i = _mm256_setzero_pd();
        __m256d s_r = _mm256_setzero_pd(), s_i = _mm256_setzero_pd();
        for (int j = a.degree - 1; j >= 0; --j) {
            cmuladd(s_r, s_i, xr, xi, d_r, d_i);
            cmuladd(d_r, d_i, xr, xi, p_r, p_i);
            cmuladd(p_r, p_i, xr, xi, _mm256_set1_pd(a.re[j]), _mm256_set1_pd(a.im[j]));
        }
        __m256d two = _mm256_set1_pd(2.0);
        _mm256_storeu_pd(pr + t, p_r);
        _mm256_storeu_pd(pi + t, p_i);
        _mm256_storeu_pd(dr + t, d_r);
        _mm256_storeu_pd(di + t, d_i);
        _mm256_storeu_pd(sr + t, _mm256_mul_pd(two, s_r));
        _mm256_storeu_pd(si + t, _mm256_mul_pd(two, s_i));
    }
    if (t < count)
        horner2_scalar(a, zr + t, zi + t, count - t, pr + t, pi + t, dr + t, di + t, sr + t, si + t);
}

void pair_sum_avx2(const double* zr, const double* zi, std::size_t n, std::size_t i, double* sr, double* si) {
    double ar = 0.0, ai = 0.0;
    pair_sum_range(zr[i], zi[i], zr, zi, 0, i, ar, ai);
    pair_sum_range(zr[i], zi[i], zr, zi, i + 1, n, ar, ai);
    *sr = ar;
    *si = ai;
}

}  // namespace sklab::simd::detail
