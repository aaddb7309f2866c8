#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sklab {

struct Histogram {
    std::vector<double> edges;
    std::vector<double> counts;
};

struct StatSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;  // delete-one jackknife
    std::optional<Histogram> histogram;
};

StatSummary summarize(std::span<const double> x);
Histogram make_histogram(std::span<const double> x, std::vector<double> edges);
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

Moments moments(std::span<const double> x);

double normal_cdf(double x);
// sup |F_n - F| for a continuous reference cdf.
double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Welford running moments, fed in replicate-index order.
struct Accumulator {
    std::size_t n = 0;
    double mu = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        double d = v - mu;
        mu += d / double(n);
        m2 += d * (v - mu);
    }
    double mean() const { return mu; }
    double variance() const { return n < 2 ? 0.0 : m2 / double(n - 1); }
    double se_mean() const;
};

}  // namespace sklab
