#include "sklab/critical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sklab/log.hpp"
#include "sklab/simd.hpp"
#include "sklab/zeros.hpp"

namespace sklab {

int CriticalSet::n_max() const {
    return int(std::count_if(points.begin(), points.end(), [](const CriticalPoint& p) { return p.index == CriticalIndex::max; }));
}

int CriticalSet::n_saddle() const { return int(points.size()) - n_max(); }

namespace {

struct Candidate {
    int chart;  // 0 affine, 1 infinity
    cdouble x;
    double residual;
    cdouble g;  // polynomial value in the chart
    cdouble a;  // holomorphic Hessian entry of log |s|^2
    double b;   // mixed entry, always negative
};

struct Walker {
    int chart;
    cdouble x;
    bool active = true;
    bool converged = false;
    bool has_base = false;
    int base_chart = 0;
    cdouble base_x, dir;
    double frac = 1.0;
    Candidate last{};
};

struct ChartData {
    std::array<std::vector<double>, 2> re, im;
    int k = 0;

    explicit ChartData(const Section& s) : k(s.degree()) {
        auto a = s.monomial();
        for (int c = 0; c < 2; ++c) {
            re[c].resize(a.size());
            im[c].resize(a.size());
        }
        for (std::size_t j = 0; j < a.size(); ++j) {
            re[0][j] = a[j].real();
            im[0][j] = a[j].imag();
            re[1][a.size() - 1 - j] = a[j].real();
            im[1][a.size() - 1 - j] = a[j].imag();
        }
    }
    simd::PolyView view(int chart) const { return {re[chart].data(), im[chart].data(), k}; }
};

Vec3 chart_unit_vector(int chart, cdouble x) {
    return chart == 0 ? FSPoint::affine(x).unit_vector() : FSPoint::at_infinity_chart(x).unit_vector();
}

// Seeds at row or column minima of the scaled gradient |h| (1 + |x|^2) on a square grid in each chart.
std::vector<Walker> grid_seeds(const ChartData& cd, double delta) {
    const auto& kt = simd::active_kernels();
    const double k = cd.k;
    const double reach = 1.0 + 2.0 * delta;
    const int m = int(std::ceil(reach / delta));
    const int side = 2 * m + 1;
    std::vector<Walker> seeds;
    std::vector<double> xr(std::size_t(side) * side), xi(xr.size()), pr(xr.size()), pi(xr.size()), dr(xr.size()),
        di(xr.size()), g(xr.size());
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            xr[std::size_t(i) * side + j] = (i - m) * delta;
            xi[std::size_t(i) * side + j] = (j - m) * delta;
        }
    for (int chart = 0; chart < 2; ++chart) {
        kt.horner(cd.view(chart), xr.data(), xi.data(), xr.size(), pr.data(), pi.data(), dr.data(), di.data());
        for (std::size_t t = 0; t < xr.size(); ++t) {
            cdouble x(xr[t], xi[t]), p(pr[t], pi[t]), d(dr[t], di[t]);
            double q2 = 1.0 + std::norm(x);
            g[t] = p == cdouble(0.0) ? HUGE_VAL : std::norm(d / p - k * std::conj(x) / q2) * q2 * q2;
        }
        for (int i = 1; i + 1 < side; ++i)
            for (int j = 1; j + 1 < side; ++j) {
                std::size_t t = std::size_t(i) * side + j;
                if (xr[t] * xr[t] + xi[t] * xi[t] > reach * reach) continue;
                // Minimum along the row or the column; G has long thin valleys.
                bool is_min = std::isfinite(g[t]) && ((g[t] <= g[t - 1] && g[t] <= g[t + 1]) ||
                                                      (g[t] <= g[t - side] && g[t] <= g[t + side]));
                if (is_min) {
                    Walker w;
                    w.chart = chart;
                    w.x = cdouble(xr[t], xi[t]);
                    seeds.push_back(w);
                }
            }
    }
    for (auto& w : seeds)
        if (std::norm(w.x) > 1.0) {
            w.x = 1.0 / w.x;
            w.chart = 1 - w.chart;
        }
    return seeds;
}

// Geodesic midpoints between each zero and its neighbours within `reach` FS distance.
std::vector<Walker> zero_pair_seeds(const Section& section, double reach) {
    std::vector<Vec3> z = find_zeros(section).unit_vectors();
    std::sort(z.begin(), z.end(), [](const Vec3& a, const Vec3& b) { return a[2] < b[2]; });
    double angle = 2.0 * reach;
    std::vector<Walker> seeds;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size() && z[j][2] - z[i][2] <= angle; ++j) {
            if (round_angle(z[i], z[j]) > angle) continue;
            Vec3 m{z[i][0] + z[j][0], z[i][1] + z[j][1], z[i][2] + z[j][2]};
            if (norm(m) < 1e-12) continue;
            FSPoint p = FSPoint::from_unit_vector(normalized(m)).canonical();
            Walker w;
            w.chart = p.chart == Chart::affine ? 0 : 1;
            w.x = p.coord;
            seeds.push_back(w);
        }
    return seeds;
}

// Two rings around a found point; close partners of a fold pair sit inside them.
void ring_seeds(std::vector<Walker>& out, int chart, cdouble x0, double fs_radius) {
    double scale = 1.0 + std::norm(x0);
    for (int ring = 1; ring <= 2; ++ring)
        for (int j = 0; j < 6; ++j) {
            Walker w;
            w.chart = chart;
            w.x = x0 + std::polar(ring * fs_radius * scale, kPi / 3.0 * (j + 0.5 * ring));
            if (std::norm(w.x) > 1.0) {
                w.x = 1.0 / w.x;
                w.chart = 1 - chart;
            }
            out.push_back(w);
        }
}

// Newton on d log|s|^2 = 0 with backtracking on G = |h|^2 (1 + |x|^2)^2, all walkers in lockstep.
void newton_lockstep(const ChartData& cd, std::vector<Walker>& walkers, const CriticalOptions& opt) {
    const auto& kt = simd::active_kernels();
    const double k = cd.k;
    const double sk = std::sqrt(k);
    const double max_step = 0.5 / sk;
    std::vector<std::size_t> idx;
    std::vector<double> xr, xi, pr, pi, dr, di, sr, si;
    auto place = [](Walker& w) {
        w.chart = w.base_chart;
        w.x = w.base_x + w.frac * w.dir;
        if (std::norm(w.x) > 1.0) {
            w.x = 1.0 / w.x;
            w.chart = 1 - w.chart;
        }
    };
    for (int it = 0; it < opt.max_iterations; ++it) {
        bool any = false;
        for (int chart = 0; chart < 2; ++chart) {
            idx.clear();
            for (std::size_t i = 0; i < walkers.size(); ++i)
                if (walkers[i].active && walkers[i].chart == chart) idx.push_back(i);
            if (idx.empty()) continue;
            any = true;
            std::size_t n = idx.size();
            xr.resize(n), xi.resize(n), pr.resize(n), pi.resize(n), dr.resize(n), di.resize(n), sr.resize(n),
                si.resize(n);
            for (std::size_t t = 0; t < n; ++t) {
                xr[t] = walkers[idx[t]].x.real();
                xi[t] = walkers[idx[t]].x.imag();
            }
            kt.horner2(cd.view(chart), xr.data(), xi.data(), n, pr.data(), pi.data(), dr.data(), di.data(),
                       sr.data(), si.data());
            for (std::size_t t = 0; t < n; ++t) {
                Walker& w = walkers[idx[t]];
                cdouble g(pr[t], pi[t]), g1(dr[t], di[t]), g2(sr[t], si[t]);
                double q2 = 1.0 + std::norm(w.x);
                cdouble q = g1 / g;
                cdouble h = q - k * std::conj(w.x) / q2;
                double res = std::sqrt(std::norm(h)) * q2 / sk;
                bool ok = g != cdouble(0.0) && std::isfinite(res);
                if (!ok || (w.has_base && res >= w.last.residual)) {
                    // Reject the trial point and backtrack.
                    w.frac *= 0.5;
                    if (!w.has_base || w.frac < 1e-8) {
                        w.active = false;
                        continue;
                    }
                    place(w);
                    continue;
                }
                cdouble a = g2 / g - q * q + k * std::conj(w.x) * std::conj(w.x) / (q2 * q2);
                double b = -k / (q2 * q2);
                w.last = {chart, w.x, res, g, a, b};
                w.has_base = true;
                if (res <= 1e-13 * std::max(1.0, sk)) {
                    w.active = false;
                    w.converged = true;
                    continue;
                }
                double den = std::norm(a) - b * b;
                if (den == 0.0) {
                    w.active = false;
                    continue;
                }
                cdouble dx = (-h * std::conj(a) + b * std::conj(h)) / den;
                double len = std::sqrt(std::norm(dx)) / q2;
                if (len > max_step) dx *= max_step / len;
                w.base_chart = chart;
                w.base_x = w.x;
                w.dir = dx;
                w.frac = 1.0;
                place(w);
            }
        }
        if (!any) break;
    }
    for (auto& w : walkers)
        if (!w.converged && w.has_base && w.last.residual <= opt.residual_tol) w.converged = true;
}

// Deduplicated candidates keyed by the z component of their unit vectors.
class CandidateSet {
public:
    explicit CandidateSet(double dedup) : angle_(2.0 * dedup) {}

    // Returns the index of a new entry, or -1 if it matched a known point.
    long insert(const Candidate& c) {
        Vec3 u = chart_unit_vector(c.chart, c.x);
        auto lo = std::lower_bound(keys_.begin(), keys_.end(), std::make_pair(u[2] - angle_, std::size_t(0)));
        for (auto it = lo; it != keys_.end() && it->first <= u[2] + angle_; ++it) {
            if (round_angle(u, units_[it->second]) <= angle_) {
                Candidate& old = items_[it->second];
                if (c.residual < old.residual) old = c;
                return -1;
            }
        }
        items_.push_back(c);
        units_.push_back(u);
        std::pair<double, std::size_t> key{u[2], items_.size() - 1};
        keys_.insert(std::upper_bound(keys_.begin(), keys_.end(), key), key);
        return long(items_.size() - 1);
    }
    const std::vector<Candidate>& items() const { return items_; }

private:
    double angle_;  // FS distance is half the round angle
    std::vector<Candidate> items_;
    std::vector<Vec3> units_;
    std::vector<std::pair<double, std::size_t>> keys_;
};

}  // namespace

CriticalSet find_critical_points(const Section& section, const CriticalOptions& opt) {
    if (section.coeff_norm() == 0.0) throw LabError(ErrorKind::ZeroSection, "critical points of the zero section");
    const int k = section.degree();
    ChartData cd(section);
    CandidateSet cands(opt.dedup_distance);
    const double sk = std::sqrt(double(k));
    double delta = opt.grid_spacing / sk;
    for (int round = 0; round <= opt.max_refinements; ++round) {
        std::vector<Walker> walkers = grid_seeds(cd, delta);
        if (round == 0) {
            std::vector<Walker> mids = zero_pair_seeds(section, opt.pair_reach / sk);
            walkers.insert(walkers.end(), mids.begin(), mids.end());
        }
        // Flood fill: ring seeds around every newly found point until nothing new appears.
        for (int wave = 0; !walkers.empty() && wave < 8; ++wave) {
            newton_lockstep(cd, walkers, opt);
            std::vector<Walker> next;
            for (const auto& w : walkers) {
                if (!w.converged) continue;
                if (cands.insert(w.last) >= 0) ring_seeds(next, w.last.chart, w.last.x, opt.ring_radius / sk);
            }
            walkers.swap(next);
        }
        int nmax = 0, nsad = 0;
        for (const auto& c : cands.items()) {
            double det = c.b * c.b - std::norm(c.a);
            if (std::abs(det) < opt.degenerate_tol * c.b * c.b)
                throw LabError(ErrorKind::Degenerate, "near-singular Hessian at a critical point");
            (det > 0.0 ? nmax : nsad)++;
        }
        if (nmax - nsad == 2 - k || (!opt.certify && round == opt.max_refinements)) {
            CriticalSet cs;
            cs.k = k;
            cs.zeros_as_minima = k;
            cs.refinements = round;
            for (const auto& c : cands.items()) {
                FSPoint p = c.chart == 0 ? FSPoint::affine(c.x) : FSPoint::at_infinity_chart(c.x);
                double det = c.b * c.b - std::norm(c.a);
                double value = std::exp(std::log(std::abs(c.g)) - 0.5 * k * std::log1p(std::norm(c.x)));
                cs.points.push_back({p.canonical(), value,
                                     det > 0.0 ? CriticalIndex::max : CriticalIndex::saddle});
            }
            if (round > 0) log_message(LogLevel::debug, "critical set certified after " + std::to_string(round) + " refinements");
            return cs;
        }
        delta *= 0.5;
    }
    throw LabError(ErrorKind::Degenerate, "Morse-Euler identity not met after refinement");
}

std::vector<CriticalPoint> polish_critical_points(const Section& section, const std::vector<FSPoint>& seeds,
                                                  const CriticalOptions& opt) {
    ChartData cd(section);
    std::vector<Walker> walkers;
    for (const auto& p : seeds) {
        FSPoint c = p.canonical();
        Walker w;
        w.chart = c.chart == Chart::affine ? 0 : 1;
        w.x = c.coord;
        walkers.push_back(w);
    }
    newton_lockstep(cd, walkers, opt);
    CandidateSet cands(opt.dedup_distance);
    for (const auto& w : walkers)
        if (w.converged) cands.insert(w.last);
    std::vector<CriticalPoint> out;
    const double k = section.degree();
    for (const auto& c : cands.items()) {
        FSPoint p = c.chart == 0 ? FSPoint::affine(c.x) : FSPoint::at_infinity_chart(c.x);
        double det = c.b * c.b - std::norm(c.a);
        double value = std::exp(std::log(std::abs(c.g)) - 0.5 * k * std::log1p(std::norm(c.x)));
        out.push_back({p.canonical(), value, det > 0.0 ? CriticalIndex::max : CriticalIndex::saddle});
    }
    return out;
}

double expected_crit_count(int k) {
    if (k < 1) throw LabError(ErrorKind::DomainError, "expected_crit_count needs k >= 1");
    double x = k;
    return (5.0 * x * x - 8.0 * x + 4.0) / (3.0 * x - 2.0);
}

double expected_crit_count_cp2(int k) {
    if (k < 1) throw LabError(ErrorKind::DomainError, "expected_crit_count_cp2 needs k >= 1");
    double x = k;
    double num = (((59.0 * x - 231.0) * x + 375.0) * x - 310.0) * x * x + 132.0 * x - 24.0;
    double d = 3.0 * x - 2.0;
    return num / (d * d * d);
}

double f1(double t) { return 2.0 / kPi * (t * t - 2.0 + 4.0 * std::exp(-0.5 * t * t)); }

double critical_value_density(double t) {
    if (!(t >= 0.0)) throw LabError(ErrorKind::DomainError, "critical_value_density needs t >= 0");
    // Small t: t^2 - 2 + 4 e^{-t^2/2} = t^4/2 - t^6/12 + ..., keep the expm1 form.
    double u = t * t;
    double g = u + 4.0 * std::expm1(-0.5 * u) + 2.0;
    return 2.0 * g * t * std::exp(-u);
}

namespace {

// Antiderivative in u = t^2.
double density_primitive(double t) {
    double u = t * t;
    return (1.0 - u) * std::exp(-u) - 8.0 / 3.0 * std::exp(-1.5 * u);
}

}  // namespace

double critical_value_bin_average(double a, double b) {
    if (!(b > a) || a < 0.0) throw LabError(ErrorKind::DomainError, "bin must satisfy 0 <= a < b");
    return (density_primitive(b) - density_primitive(a)) / (b - a);
}

double critical_value_scale() { return kCriticalValueScale; }

CritCountStudy crit_count_study(const EnsembleSpec& spec, std::size_t n, const McOptions& mc,
                                const CriticalOptions& opt) {
    if (spec.m != 1) throw LabError(ErrorKind::DomainError, "critical points are solved on CP^1 only");
    struct Row {
        bool ok;
        int nmax, nsad;
    };
    std::vector<double> total, maxes, saddles;
    CritCountStudy out;
    ordered_map<Row>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            Section s = sample(spec, rng);
            try {
                CriticalSet cs = find_critical_points(s, opt);
                return Row{true, cs.n_max(), cs.n_saddle()};
            } catch (const LabError& e) {
                if (e.kind() != ErrorKind::Degenerate) throw;
                return Row{false, 0, 0};
            }
        },
        [&](std::size_t, Row r) {
            ++out.draws;
            if (!r.ok) {
                ++out.euler_failures;
                return;
            }
            total.push_back(r.nmax + r.nsad);
            maxes.push_back(r.nmax);
            saddles.push_back(r.nsad);
        });
    out.count = summarize(total);
    out.n_max = summarize(maxes);
    out.n_saddle = summarize(saddles);
    return out;
}

CritValueHistogram critical_value_histogram(const EnsembleSpec& spec, std::size_t n, const std::vector<double>& edges,
                                            const McOptions& mc, double alpha) {
    if (spec.m != 1 || spec.kind != EnsembleKind::spherical)
        throw LabError(ErrorKind::DomainError, "critical values use the spherical ensemble on CP^1");
    if (spec.k < 50) throw LabError(ErrorKind::DomainError, "critical_value_histogram needs k >= 50");
    if (edges.size() < 2) throw LabError(ErrorKind::DomainError, "need at least one bin");
    std::size_t nb = edges.size() - 1;
    std::vector<Accumulator> bins(nb);
    Accumulator mass;
    CritValueHistogram h;
    h.edges = edges;
    h.alpha = alpha;
    double k = spec.k;
    ordered_map<std::vector<double>>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            Section s = sample(spec, rng);
            std::vector<double> row(nb + 1, 0.0);
            try {
                CriticalSet cs = find_critical_points(s);
                for (const auto& p : cs.points) {
                    double t = alpha * p.value;
                    auto it = std::upper_bound(edges.begin(), edges.end(), t);
                    if (it != edges.begin() && it != edges.end()) row[std::size_t(it - edges.begin()) - 1] += 1.0;
                }
                row[nb] = double(cs.points.size());
            } catch (const LabError& e) {
                if (e.kind() != ErrorKind::Degenerate) throw;
                row[nb] = -1.0;
            }
            return row;
        },
        [&](std::size_t, std::vector<double> row) {
            if (row[nb] < 0.0) {
                ++h.skipped;
                return;
            }
            for (std::size_t b = 0; b < nb; ++b) bins[b].add(row[b] / (k * (edges[b + 1] - edges[b])));
            mass.add(row[nb] / k);
        });
    for (std::size_t b = 0; b < nb; ++b) {
        h.density.push_back(bins[b].mean());
        h.se.push_back(bins[b].se_mean());
    }
    h.total_mass = mass.mean();
    h.total_mass_se = mass.se_mean();
    h.n = mass.n;
    return h;
}

double histogram_sup_mismatch(const CritValueHistogram& h) {
    double sup = 0.0;
    for (std::size_t b = 0; b < h.density.size(); ++b)
        sup = std::max(sup, std::abs(h.density[b] - critical_value_bin_average(h.edges[b], h.edges[b + 1])));
    return sup;
}

FmEstimate fm_monte_carlo(int m, double t, std::size_t n, std::uint64_t seed) {
    if (m != 1 && m != 2) throw LabError(ErrorKind::DomainError, "fm_monte_carlo supports m in {1, 2}");
    if (!(t >= 0.0) || n < 2) throw LabError(ErrorKind::DomainError, "fm_monte_carlo needs t >= 0 and n >= 2");
    Rng rng = replicate_rng(seed, 0, 0x464d);
    ComplexGaussian gauss;
    double t2 = t * t;
    // Normalization matched to the closed form at m = 1.
    double cm = 2.0 * std::pow(kPi, 0.5 * (m * m + m) + 2.0 - m * (m + 3.0));
    const double r2 = std::sqrt(2.0);
    Accumulator acc;
    for (std::size_t i = 0; i < n; ++i) {
        double v;
        if (m == 1) {
            cdouble a = r2 * gauss(rng);
            v = std::abs(std::norm(a) - t2);
        } else {
            cdouble a11 = r2 * gauss(rng), a12 = gauss(rng), a22 = r2 * gauss(rng);
            // M = A A^* - t^2 I for symmetric A.
            double m11 = std::norm(a11) + std::norm(a12) - t2;
            double m22 = std::norm(a12) + std::norm(a22) - t2;
            cdouble m12 = a11 * std::conj(a12) + a12 * std::conj(a22);
            v = std::abs(m11 * m22 - std::norm(m12));
        }
        acc.add(cm * v);
    }
    return {acc.mean(), acc.se_mean()};
}

double crit_pair_correlation_constant() { return 2.0 / (3.0 * kPi * kPi); }

PairCorrEstimate crit_pair_correlation_estimate(const EnsembleSpec& spec, const std::vector<double>& edges,
                                                std::size_t n, const McOptions& mc) {
    if (spec.m != 1) throw LabError(ErrorKind::DomainError, "critical points are solved on CP^1 only");
    if (spec.k < 100) throw LabError(ErrorKind::DomainError, "pair correlation estimator needs k >= 100");
    PairCorrAccumulator acc(edges, spec.k);
    double nc = expected_crit_count(spec.k);
    double expected = nc * nc / kPi;
    ordered_map<std::vector<double>>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            CriticalSet cs = find_critical_points(sample(spec, rng));
            std::vector<Vec3> pts;
            for (const auto& p : cs.points) pts.push_back(p.point.unit_vector());
            return acc.bin_counts(pts);
        },
        [&](std::size_t, std::vector<double> c) { acc.add(c, expected); });
    return acc.result();
}

}  // namespace sklab
