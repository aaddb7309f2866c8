#include "sklab/zero_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sklab/special.hpp"

namespace sklab {

namespace {

Section draw(const EnsembleSpec& spec, const McOptions& mc, std::size_t i) {
    Rng rng = replicate_rng(mc.seed, i);
    return sample(spec, rng);
}

void require_cp1(const EnsembleSpec& spec) {
    if (spec.m != 1) throw LabError(ErrorKind::DomainError, "zero statistics are implemented on CP^1 only");
}

}  // namespace

std::vector<StatSummary> count_study(const EnsembleSpec& spec, const std::vector<Region>& regions, std::size_t n,
                                     const McOptions& mc) {
    require_cp1(spec);
    std::vector<std::vector<double>> counts(regions.size(), std::vector<double>(n));
    ordered_map<std::vector<int>>(
        n, mc.workers,
        [&](std::size_t i) {
            ZeroSet zs = find_zeros(draw(spec, mc, i));
            if (zs.total_multiplicity() != spec.k)
                throw LabError(ErrorKind::NotConverged, "root count differs from the degree");
            std::vector<int> c(regions.size());
            for (std::size_t r = 0; r < regions.size(); ++r) c[r] = count_in_region(zs, regions[r]);
            return c;
        },
        [&](std::size_t i, std::vector<int> c) {
            for (std::size_t r = 0; r < regions.size(); ++r) counts[r][i] = c[r];
        });
    std::vector<StatSummary> out;
    for (auto& c : counts) out.push_back(summarize(c));
    return out;
}

StatSummary expected_density_check(const EnsembleSpec& spec, const Region& region, std::size_t n,
                                   const McOptions& mc) {
    if (n < 100) throw LabError(ErrorKind::DomainError, "expected_density_check needs n >= 100");
    return count_study(spec, {region}, n, mc).front();
}

double universal_pair_correlation(double r) {
    if (!(r > 0.0)) throw LabError(ErrorKind::DomainError, "pair correlation needs r > 0");
    double s = 0.5 * r * r;
    if (s < 0.5) {
        // Odd series in s = r^2 / 2.
        static const double c[] = {1.0,
                                   -2.0 / 9.0,
                                   2.0 / 45.0,
                                   -4.0 / 525.0,
                                   2.0 / 1701.0,
                                   -2764.0 / 16372125.0,
                                   4.0 / 173745.0,
                                   -28936.0 / 9577693125.0};
        double s2 = s * s, term = s, sum = 0.0;
        for (double ci : c) {
            sum += ci * term;
            term *= s2;
        }
        return sum;
    }
    double sh = std::sinh(s);
    double q = s / sh;
    return (1.0 + q * q) / std::tanh(s) - 2.0 * q / sh;
}

void validate_pair_bins(const std::vector<double>& edges) {
    if (edges.size() < 2) throw LabError(ErrorKind::DomainError, "need at least one bin");
    if (!(edges.front() >= 0.0) || edges.back() > 3.0 + 1e-12)
        throw LabError(ErrorKind::DomainError, "pair-correlation bins must lie in (0, 3]");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double w = edges[i + 1] - edges[i];
        if (!(w > 0.0)) throw LabError(ErrorKind::DomainError, "bin edges must increase");
        if (w > 0.25 + 1e-12)
            throw LabError(ErrorKind::BinTooWide, "bin width " + std::to_string(w) + " exceeds 0.25");
    }
}

PairCorrAccumulator::PairCorrAccumulator(std::vector<double> edges, int k) : edges_(std::move(edges)), k_(k) {
    validate_pair_bins(edges_);
    double sk = std::sqrt(double(k));
    for (std::size_t b = 0; b + 1 < edges_.size(); ++b) {
        double ra = std::sin(edges_[b] / sk), rb = std::sin(edges_[b + 1] / sk);
        annulus_.push_back(kPi * (rb * rb - ra * ra));
    }
    acc_.resize(annulus_.size());
}

std::vector<double> PairCorrAccumulator::bin_counts(const std::vector<Vec3>& in) const {
    std::vector<Vec3> pts = in;
    std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) { return a[2] < b[2]; });
    double sk = std::sqrt(double(k_));
    double rmax = edges_.back();
    double rmin = edges_.front();
    // Round angle 2 r / sqrt(k) bounds the chord and hence the z gap.
    double max_angle = 2.0 * rmax / sk;
    double max_chord2 = 4.0 * std::sin(0.5 * max_angle) * std::sin(0.5 * max_angle);
    std::vector<double> counts(acc_.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size() && pts[j][2] - pts[i][2] <= max_angle; ++j) {
            double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1], dz = pts[i][2] - pts[j][2];
            double c2 = dx * dx + dy * dy + dz * dz;
            if (c2 >= max_chord2) continue;
            // FS distance is half the round angle.
            double r = sk * std::asin(0.5 * std::sqrt(c2));
            if (r < rmin || r >= rmax) continue;
            auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
            counts[std::size_t(it - edges_.begin()) - 1] += 2.0;
        }
    }
    return counts;
}

void PairCorrAccumulator::add(const std::vector<double>& counts, double expected_pairs_per_area) {
    for (std::size_t b = 0; b < acc_.size(); ++b) acc_[b].add(counts[b] / (expected_pairs_per_area * annulus_[b]));
}

PairCorrEstimate PairCorrAccumulator::result() const {
    PairCorrEstimate e;
    e.edges = edges_;
    for (std::size_t b = 0; b < acc_.size(); ++b) {
        e.r.push_back(0.5 * (edges_[b] + edges_[b + 1]));
        e.kappa.push_back(acc_[b].mean());
        e.se.push_back(acc_[b].se_mean());
        e.n = acc_[b].n;
    }
    return e;
}

PairCorrEstimate pair_correlation_estimate(const EnsembleSpec& spec, const std::vector<double>& edges,
                                           std::size_t n, const McOptions& mc) {
    require_cp1(spec);
    if (spec.k < 100) throw LabError(ErrorKind::DomainError, "pair correlation estimator needs k >= 100");
    PairCorrAccumulator acc(edges, spec.k);
    // Uncorrelated level: (k/pi)^2 * pi * area = k^2 area / pi ordered pairs.
    double expected = double(spec.k) * double(spec.k) / kPi;
    ordered_map<std::vector<double>>(
        n, mc.workers, [&](std::size_t i) { return acc.bin_counts(find_zeros(draw(spec, mc, i)).unit_vectors()); },
        [&](std::size_t, std::vector<double> c) { acc.add(c, expected); });
    return acc.result();
}

namespace {

struct PolarRule {
    std::vector<double> theta, weight;  // weight includes sin(theta) / 4 and Li2(beta_k)
};

PolarRule polar_rule(int k, int nodes) {
    // u = sqrt(k) theta / 2 so that beta_k ~ exp(-u^2); graded panels near the diagonal.
    const double umax_cut = std::sqrt(45.0);
    double sk = std::sqrt(double(k));
    double umax = std::min(umax_cut, 0.5 * sk * kPi);
    std::vector<double> breaks = {0.0, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 0.25, 0.5, 0.75, 1.0, 1.5,
                                  2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, umax_cut};
    PolarRule rule;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        double a = breaks[p], b = std::min(breaks[p + 1], umax);
        if (a >= umax) break;
        QuadratureRule g = gauss_legendre(nodes, a, b);
        for (int i = 0; i < nodes; ++i) {
            double theta = 2.0 * g.x[i] / sk;
            double dtheta = 2.0 / sk;
            double c = std::cos(0.5 * theta);
            double beta = std::exp(2.0 * k * std::log(c));
            rule.theta.push_back(theta);
            rule.weight.push_back(g.w[i] * dtheta * 0.25 * std::sin(theta) * dilog(beta));
        }
    }
    return rule;
}

double bipotential_level(int k, const TestFunction& f, int level) {
    int L = f.max_degree();
    int n_outer = L + 3 + 2 * level;
    int n_phi = 2 * n_outer;
    int n_psi = 2 * L + 4 + 4 * level;
    int n_panel = 8 + 4 * level;
    PolarRule polar = polar_rule(k, n_panel);
    QuadratureRule outer = gauss_legendre(n_outer);
    double total = 0.0;
    for (int i = 0; i < n_outer; ++i) {
        double ct = outer.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2.0 * kPi * (j + 0.5) / n_phi;
            Vec3 z{st * std::cos(phi), st * std::sin(phi), ct};
            double lz = f.laplacian(z);
            if (lz == 0.0) continue;
            auto frame = tangent_frame(z);
            double inner = 0.0;
            for (std::size_t q = 0; q < polar.theta.size(); ++q) {
                double ring = 0.0;
                for (int s = 0; s < n_psi; ++s) {
                    double psi = 2.0 * kPi * s / n_psi;
                    ring += f.laplacian(sphere_exp(z, frame, polar.theta[q], psi));
                }
                inner += polar.weight[q] * ring * (2.0 * kPi / n_psi);
            }
            total += outer.w[i] * (2.0 * kPi / n_phi) * 0.25 * lz * inner;
        }
    }
    return total / (16.0 * kPi * kPi);
}

}  // namespace

double variance_bipotential(int k, const TestFunction& f, const BipotentialOptions& opt) {
    if (k < 1) throw LabError(ErrorKind::DomainError, "variance_bipotential needs k >= 1");
    if (f.max_degree() == 0) return 0.0;
    double prev = bipotential_level(k, f, 0);
    double floor = 1e-14 * laplacian_norm2(f) / k;
    for (int level = 1; level < opt.max_levels; ++level) {
        double cur = bipotential_level(k, f, level);
        if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur) + floor) return cur;
        prev = cur;
    }
    throw LabError(ErrorKind::QuadratureNotConverged, "bipotential quadrature did not settle");
}

double laplacian_norm2(const TestFunction& f) {
    int n = f.max_degree() + 4;
    return integrate_fs([&](const Vec3& v) { double l = f.laplacian(v); return l * l; }, n);
}

double variance_leading_coeff(const TestFunction& f) {
    if (f.max_degree() == 0) return 0.0;
    return zeta_value(3.0) / (16.0 * kPi) * laplacian_norm2(f);
}

std::vector<double> linear_statistic_samples(const EnsembleSpec& spec, const TestFunction& f, std::size_t n,
                                             const McOptions& mc) {
    require_cp1(spec);
    std::vector<double> x(n);
    ordered_map<double>(
        n, mc.workers, [&](std::size_t i) { return linear_statistic(find_zeros(draw(spec, mc, i)), f); },
        [&](std::size_t i, double v) { x[i] = v; });
    return x;
}

NormalityDiagnostics normality_from_samples(const std::vector<double>& x) {
    NormalityDiagnostics d;
    d.raw = summarize(x);
    Moments m = moments(x);
    if (!(m.sd > 1e-12 * (1.0 + std::abs(m.mean))))
        throw LabError(ErrorKind::NotRandom, "linear statistic has zero variance");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m.mean) / m.sd;
    d.skewness = m.skewness;
    d.excess_kurtosis = m.excess_kurtosis;
    d.ks = ks_distance(std::move(z), normal_cdf);
    return d;
}

NormalityDiagnostics normality_diagnostics(const EnsembleSpec& spec, const TestFunction& f, std::size_t n,
                                           const McOptions& mc) {
    if (n < 2000) throw LabError(ErrorKind::DomainError, "normality diagnostics need n >= 2000");
    if (f.max_degree() == 0) throw LabError(ErrorKind::NotRandom, "constant test function gives a constant statistic");
    return normality_from_samples(linear_statistic_samples(spec, f, n, mc));
}

double nu1() { return zeta_value(1.5) / (8.0 * std::pow(kPi, 1.5)); }

NumberVariance number_variance_from(const StatSummary& counts, int k, const Region& region) {
    NumberVariance v;
    v.counts = counts;
    double len = region_geometry(region, 1).boundary_length.value();
    if (len <= 0.0) return v;
    double scale = std::sqrt(double(k)) * len;
    v.ratio = counts.variance / scale;
    v.ratio_se = counts.se_variance / scale;
    return v;
}

NumberVariance number_variance(const EnsembleSpec& spec, const Region& region, std::size_t n, const McOptions& mc) {
    return number_variance_from(count_study(spec, {region}, n, mc).front(), spec.k, region);
}

HoleEstimate hole_probability(const EnsembleSpec& spec, const Region& region, std::size_t n, const McOptions& mc) {
    require_cp1(spec);
    HoleEstimate h;
    h.n = n;
    ordered_map<char>(
        n, mc.workers, [&](std::size_t i) { return char(count_in_region(find_zeros(draw(spec, mc, i)), region) == 0); },
        [&](std::size_t, char hit) { h.hits += std::size_t(hit); });
    h.p = double(h.hits) / double(n);
    h.se = std::sqrt(h.p * (1.0 - h.p) / double(n));
    h.log_p = h.hits ? std::log(h.p) : -HUGE_VAL;
    return h;
}

double zhu_constant(int m, double r) {
    if (m < 1 || !(r >= 1.0)) throw LabError(ErrorKind::DomainError, "zhu_constant needs m >= 1 and r >= 1");
    double tail = 0.0;
    for (int j = 1; j <= m; ++j) tail += 1.0 / (j + 1.0);
    return 2.0 * m * std::log(r) / std::exp(log_factorial(m + 1)) + tail / std::exp(log_factorial(m));
}

double higher_codim_correlation_leading(int m, double r) {
    if (m < 1 || !(r > 0.0)) throw LabError(ErrorKind::DomainError, "needs m >= 1 and r > 0");
    return 0.25 * (m + 1) * std::pow(r, 4.0 - 2.0 * m);
}

}  // namespace sklab
