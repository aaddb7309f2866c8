#pragma once

#include <cstddef>

namespace sklab::simd {

// Complex data is passed split into real and imaginary arrays.
struct PolyView {
    const double* re;
    const double* im;
    int degree;  // coefficients 0..degree, ascending
};

// p(z_i), p'(z_i) for count points.
using HornerFn = void (*)(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                          double* dr, double* di);
// p, p', p''.
using Horner2Fn = void (*)(PolyView a, const double* zr, const double* zi, std::size_t count, double* pr, double* pi,
                           double* dr, double* di, double* sr, double* si);
// sum_{j != i} 1 / (z_i - z_j) over n points.
using PairSumFn = void (*)(const double* zr, const double* zi, std::size_t n, std::size_t i, double* sr, double* si);

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    const char* name;
    HornerFn horner;
    Horner2Fn horner2;
    PairSumFn pair_sum;
};

const KernelTable& scalar_kernels();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();
// Best available table; SKLAB_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace sklab::simd
