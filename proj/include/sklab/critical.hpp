#pragma once

#include <cstdint>
#include <vector>

#include "sklab/ensembles.hpp"
#include "sklab/parallel.hpp"
#include "sklab/stats.hpp"
#include "sklab/zero_stats.hpp"

namespace sklab {

// Abscissa scale alpha for critical values, fitted once at k = 200.
inline constexpr double kCriticalValueScale = 1.7625;

enum class CriticalIndex { saddle, max };

struct CriticalPoint {
    FSPoint point;  // canonical chart
    double value = 0.0;  // |s|_h at the point
    CriticalIndex index = CriticalIndex::saddle;
};

struct CriticalSet {
    int k = 0;
    std::vector<CriticalPoint> points;
    int zeros_as_minima = 0;
    int refinements = 0;  // extra seed rounds needed to certify

    int n_max() const;
    int n_saddle() const;
};

struct CriticalOptions {
    double grid_spacing = 0.4;  // seed grid step in chart coordinates, units of 1/sqrt(k)
    double ring_radius = 0.15;  // flood-fill ring step around found points, units of 1/sqrt(k)
    double pair_reach = 2.0;  // zero pairs closer than this (units of 1/sqrt(k)) seed their midpoint
    int max_refinements = 3;
    int max_iterations = 80;
    double residual_tol = 1e-9;
    double degenerate_tol = 1e-8;
    double dedup_distance = 1e-7;
    bool certify = true;  // false returns the last round uncertified, for diagnostics
};

// Critical points of |s|_h away from the zeros, certified by #max - #saddle = 2 - k.
CriticalSet find_critical_points(const Section& section, const CriticalOptions& opt = {});

// Local Newton from the given seeds; returns the distinct critical points reached, unclassified by certification.
std::vector<CriticalPoint> polish_critical_points(const Section& section, const std::vector<FSPoint>& seeds,
                                                  const CriticalOptions& opt = {});

double expected_crit_count(int k);
double expected_crit_count_cp2(int k);

// f_1(t) = (2/pi)(t^2 - 2 + 4 e^{-t^2/2}).
double f1(double t);
// pi f_1(t) t e^{-t^2}; integrates to 5/3.
double critical_value_density(double t);
// Mean of the density over [a, b].
double critical_value_bin_average(double a, double b);
// Global abscissa scale alpha, fixed once at k = 200.
double critical_value_scale();

struct CritCountStudy {
    StatSummary count;
    StatSummary n_max;
    StatSummary n_saddle;
    std::size_t euler_failures = 0;  // draws not certified even after refinement
    std::size_t draws = 0;
};

// Degenerate draws are skipped and counted; they do not enter the summaries.
CritCountStudy crit_count_study(const EnsembleSpec& spec, std::size_t n, const McOptions& mc,
                                const CriticalOptions& opt = {});

struct CritValueHistogram {
    std::vector<double> edges;
    std::vector<double> density;  // per unit t, per k, per draw
    std::vector<double> se;
    double total_mass = 0.0;  // mean count / k
    double total_mass_se = 0.0;
    double alpha = 1.0;
    std::size_t n = 0;
    std::size_t skipped = 0;
};

CritValueHistogram critical_value_histogram(const EnsembleSpec& spec, std::size_t n, const std::vector<double>& edges,
                                            const McOptions& mc, double alpha = critical_value_scale());
double histogram_sup_mismatch(const CritValueHistogram& h);

struct FmEstimate {
    double value = 0.0;
    double se = 0.0;
};

// f_m(t) by sampling complex symmetric Xi; m = 2 output is experimental.
FmEstimate fm_monte_carlo(int m, double t, std::size_t n, std::uint64_t seed);

double crit_pair_correlation_constant();
// Pair correlation of critical points normalized by the expected count.
PairCorrEstimate crit_pair_correlation_estimate(const EnsembleSpec& spec, const std::vector<double>& edges,
                                                std::size_t n, const McOptions& mc);

}  // namespace sklab
