#pragma once

#include "sklab/simd.hpp"

namespace sklab::simd::detail {

void horner_scalar(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                   double* dr, double* di);
void horner2_scalar(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                    double* dr, double* di, double* sr, double* si);
void pair_sum_scalar(const double* zr, const double* zi, std::size_t n, std::size_t i, double* sr, double* si);

#if defined(SKLAB_HAVE_AVX2)
void horner_avx2(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                 double* dr, double* di);
void horner2_avx2(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                  double* dr, double* di, double* sr, double* si);
void pair_sum_avx2(const double* zr, const double* zi, std::size_t n, std::size_t i, double* sr, double* si);
#endif

}  // namespace sklab::simd::detail
