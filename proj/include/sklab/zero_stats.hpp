#pragma once

#include <vector>

#include "sklab/ensembles.hpp"
#include "sklab/parallel.hpp"
#include "sklab/stats.hpp"
#include "sklab/test_function.hpp"
#include "sklab/zeros.hpp"

namespace sklab {

StatSummary expected_density_check(const EnsembleSpec& spec, const Region& region, std::size_t n,
                                   const McOptions& mc);

// Counts in several regions from the same draws.
std::vector<StatSummary> count_study(const EnsembleSpec& spec, const std::vector<Region>& regions, std::size_t n,
                                     const McOptions& mc);

double universal_pair_correlation(double r);

struct PairCorrEstimate {
    std::vector<double> edges;
    std::vector<double> r;  // bin centres, sqrt(k) * FS distance
    std::vector<double> kappa;
    std::vector<double> se;
    std::size_t n = 0;
};

// Ripley-type estimator on point sets sampled per replicate; shared with the critical-point version.
class PairCorrAccumulator {
public:
    explicit PairCorrAccumulator(std::vector<double> edges, int k);
    // Ordered-pair counts per bin for one point set.
    std::vector<double> bin_counts(const std::vector<Vec3>& pts) const;
    // Adds one replicate; `expected_pairs_per_area` is intensity^2 * pi per unit FS area.
    void add(const std::vector<double>& counts, double expected_pairs_per_area);
    PairCorrEstimate result() const;

private:
    std::vector<double> edges_;
    int k_;
    std::vector<double> annulus_;
    std::vector<Accumulator> acc_;
};

void validate_pair_bins(const std::vector<double>& edges);

PairCorrEstimate pair_correlation_estimate(const EnsembleSpec& spec, const std::vector<double>& edges,
                                           std::size_t n, const McOptions& mc);

struct BipotentialOptions {
    double rel_tol = 1e-6;
    int max_levels = 6;
};

double variance_bipotential(int k, const TestFunction& f, const BipotentialOptions& opt = {});
double variance_leading_coeff(const TestFunction& f);
// Squared L2(omega_h) norm of the FS Laplacian.
double laplacian_norm2(const TestFunction& f);

// Linear statistic over n draws, one value per replicate.
std::vector<double> linear_statistic_samples(const EnsembleSpec& spec, const TestFunction& f, std::size_t n,
                                             const McOptions& mc);

struct NormalityDiagnostics {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ks = 0.0;
    StatSummary raw;
};

NormalityDiagnostics normality_diagnostics(const EnsembleSpec& spec, const TestFunction& f, std::size_t n,
                                           const McOptions& mc);
NormalityDiagnostics normality_from_samples(const std::vector<double>& x);

struct NumberVariance {
    StatSummary counts;
    double ratio = 0.0;  // Var / (sqrt(k) Len)
    double ratio_se = 0.0;
};

NumberVariance number_variance(const EnsembleSpec& spec, const Region& region, std::size_t n, const McOptions& mc);
NumberVariance number_variance_from(const StatSummary& counts, int k, const Region& region);
double nu1();

struct HoleEstimate {
    double p = 0.0;
    double log_p = 0.0;
    double se = 0.0;
    std::size_t hits = 0;
    std::size_t n = 0;
};

HoleEstimate hole_probability(const EnsembleSpec& spec, const Region& region, std::size_t n, const McOptions& mc);

double zhu_constant(int m, double r);
double higher_codim_correlation_leading(int m, double r);

}  // namespace sklab
