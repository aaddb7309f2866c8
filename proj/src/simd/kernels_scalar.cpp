#include "kernels_impl.hpp"

namespace sklab::simd::detail {

void horner_scalar(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                   double* dr, double* di) {
    for (std::size_t t = 0; t < count; ++t) {
        double xr = zr[t], xi = zi[t];
        double p_r = a.re[a.degree], p_i = a.im[a.degree];
        double d_r = 0.0, d_i = 0.0;
        for (int j = a.degree - 1; j >= 0; --j) {
            double nr = d_r * xr - d_i * xi + p_r;
            double ni = d_r * xi + d_i * xr + p_i;
            d_r = nr;
            d_i = ni;
            nr = p_r * xr - p_i * xi + a.re[j];
            ni = p_r * xi + p_i * xr + a.im[j];
            p_r = nr;
            p_i = ni;
        }
        pr[t] = p_r;
        pi[t] = p_i;
        dr[t] = d_r;
        di[t] = d_i;
    }
}

void horner2_scalar(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                    double* dr, double* di, double* sr, double* si) {
    for (std::size_t t = 0; t < count; ++t) {
        double xr = zr[t], xi = zi[t];
        double p_r = a.re[a.degree], p_i = a.im[a.degree];
        double d_r = 0.0, d_i = 0.0, s_r = 0.0, s_i = 0.0;
        for (int j = a.degree - 1; j >= 0; --j) {
            double nr = s_r * xr - s_i * xi + d_r;
            double ni = s_r * xi + s_i * xr + d_i;
            s_r = nr;
            s_i = ni;
            nr = d_r * xr - d_i * xi + p_r;
            ni = d_r * xi + d_i * xr + p_i;
            d_r = nr;
            d_i = ni;
            nr = p_r * xr - p_i * xi + a.re[j];
            ni = p_r * xi + p_i * xr + a.im[j];
            p_r = nr;
            p_i = ni;
        }
        pr[t] = p_r;
        pi[t] = p_i;
        dr[t] = d_r;
        di[t] = d_i;
        sr[t] = 2.0 * s_r;
        si[t] = 2.0 * s_i;
    }
}

void pair_sum_scalar(const double* zr, const double* zi, std::size_t n, std::size_t i, double* sr, double* si) {
    double ar = 0.0, ai = 0.0;
    double xr = zr[i], xi = zi[i];
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double ur = xr - zr[j];
        double ui = xi - zi[j];
        double inv = 1.0 / (ur * ur + ui * ui);
        ar += ur * inv;
        ai -= ui * inv;
    }
    *sr = ar;
    *si = ai;
}

}  // namespace sklab::simd::detail
