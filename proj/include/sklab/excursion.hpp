#pragma once

#include <vector>

#include "sklab/critical.hpp"

namespace sklab {

struct ExcursionSpec {
    int k = 1;
    double u = 0.8;  // threshold in (0, 1]

    void validate() const;
};

// sqrt((k+1)/pi): the pointwise bound for unit-norm sections.
double coherent_amplitude(int k);

// max |s|_h over CP^1: Fibonacci grid in both charts, then Newton on the best grid points.
double sup_hnorm(const Section& section);

// Morse count over critical points above u * |c| * sqrt((k+1)/pi); maxima +1, saddles -1.
int euler_characteristic(const CriticalSet& cs, double coeff_norm, double u);
int euler_characteristic(const Section& section, double u);

// Tube-volume polynomial on a genus g curve, degree delta:
// (1-u^2)^{k delta - g - 1} [k^2 delta^2 u^2 - k delta (g u^2 + 1 - u^2) + (2 - 2g)(1 - u^2)].
// At u -> 0 it gives 2 - 2g - k delta, the Morse count with the zeros removed.
double expected_euler_char(int k, int delta, int genus, double u);
// Large-k shape d^2 (1-u^2)^{d-2} u^2 with d = k + 1 on CP^1.
double euler_char_estimate(int k, double u);

struct ExcursionStudy {
    std::vector<double> u;
    std::vector<StatSummary> chi;
    std::vector<std::size_t> contractibility_violations;  // nonempty draws with chi != 1
    std::vector<std::size_t> nonempty;
    std::size_t low_level_failures = 0;  // draws with chi(0+) != 2 - k
    std::size_t skipped = 0;             // degenerate draws
    std::size_t n = 0;
};

// Spherical draws; all thresholds share the same critical sets.
ExcursionStudy excursion_study(int k, const std::vector<double>& u, std::size_t n, const McOptions& mc);

struct SupStudy {
    StatSummary sup;
    StatSummary sup2;
    double max_ratio = 0.0;  // largest sup / sqrt((k+1)/pi) seen
};

SupStudy sup_study(const EnsembleSpec& spec, std::size_t n, const McOptions& mc);

}  // namespace sklab
