#include "sklab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sklab/core.hpp"

namespace sklab {

StatSummary summarize(std::span<const double> x) {
    StatSummary s;
    s.n = x.size();
    if (s.n == 0) return s;
    double m = 0.0;
    for (double v : x) m += v;
    m /= double(s.n);
    s.mean = m;
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    double n = double(s.n);
    s.variance = ss / (n - 1.0);
    s.se_mean = std::sqrt(s.variance / n);
    if (s.n < 3) return s;
    // Leave-one-out variances from centred sums; the centred first sum is ~0 so carry it explicitly.
    double s1 = 0.0;
    for (double v : x) s1 += v - m;
    double jm = 0.0;
    std::vector<double> loo(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
        double d = x[i] - m;
        double a1 = s1 - d, a2 = ss - d * d;
        loo[i] = (a2 - a1 * a1 / (n - 1.0)) / (n - 2.0);
        jm += loo[i];
    }
    jm /= n;
    double acc = 0.0;
    for (double v : loo) acc += (v - jm) * (v - jm);
    s.se_variance = std::sqrt((n - 1.0) / n * acc);
    return s;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * double(i) / double(bins);
    return e;
}

Histogram make_histogram(std::span<const double> x, std::vector<double> edges) {
    Histogram h{std::move(edges), {}};
    h.counts.assign(h.edges.size() - 1, 0.0);
    for (double v : x) {
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        if (it == h.edges.begin() || it == h.edges.end()) continue;
        h.counts[std::size_t(it - h.edges.begin()) - 1] += 1.0;
    }
    return h;
}

Moments moments(std::span<const double> x) {
    Moments r;
    double n = double(x.size());
    if (x.size() < 2) return r;
    for (double v : x) r.mean += v;
    r.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double d = v - r.mean, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    r.sd = std::sqrt(m2 * n / (n - 1.0));
    if (m2 > 0.0) {
        r.skewness = m3 / std::pow(m2, 1.5);
        r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = cdf(x[i]);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0, na = double(a.size()), nb = double(b.size());
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw LabError(ErrorKind::DomainError, "linear_fit needs >= 2 pairs");
    double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

double Accumulator::se_mean() const { return n < 2 ? 0.0 : std::sqrt(variance() / double(n)); }

}  // namespace sklab
