#include "sklab/lab/criteria.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sklab/critical.hpp"
#include "sklab/excursion.hpp"
#include "sklab/kernel_oracle.hpp"
#include "sklab/metric_flow.hpp"
#include "sklab/special.hpp"
#include "sklab/zero_stats.hpp"

namespace sklab::lab {

namespace {

using Checks = std::vector<Check>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// |a - b| <= 3 se, with the z-score in the detail.
Check within_3se(const std::string& name, double a, double b, double se) {
    double z = se > 0.0 ? (a - b) / se : (a == b ? 0.0 : INFINITY);
    return {name, std::abs(z) <= 3.0, "value " + fmt(a) + " target " + fmt(b) + " se " + fmt(se) + " z " + fmt(z)};
}

Check within_rel(const std::string& name, double a, double b, double tol) {
    double rel = std::abs(a / b - 1.0);
    return {name, rel <= tol, "value " + fmt(a) + " target " + fmt(b) + " rel " + fmt(rel)};
}

Check within_abs(const std::string& name, double err, double tol) {
    return {name, err <= tol, "max error " + fmt(err) + " tol " + fmt(tol)};
}

FSPoint random_point(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return FSPoint::from_unit_vector(normalized(Vec3{g(rng), g(rng), g(rng)}));
}

const Region kHalfSphere = Region::cap_with_area(FSPoint::affine(0.0), 0.5 * kPi);

Checks kernel_exactness(int kmax, int pairs, std::uint64_t seed) {
    Rng rng = replicate_rng(seed, 0);
    double dp = 0.0, dd = 0.0, dc = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        QuadratureKernel q(k);
        for (int i = 0; i < pairs; ++i) {
            FSPoint z = random_point(rng), w = random_point(rng);
            dp = std::max(dp, std::abs(q.normalized(z, w) - normalized_kernel({1, k}, z, w)));
            dd = std::max(dd, std::abs(q.diagonal(z) - (k + 1) / kPi));
            dc = std::max(dc, std::abs(bergman_diagonal({1, k}) - (k + 1) / kPi));
        }
    }
    return {within_abs("P_k closed form vs quadrature kernel, k <= " + std::to_string(kmax), dp, 1e-9),
            within_abs("quadrature diagonal equals (k+1)/pi", dd, 1e-10),
            within_abs("closed-form diagonal equals (k+1)/pi", dc, 1e-10)};
}

Checks dilog_identities() {
    double err = std::abs(dilog(1.0) - kPi * kPi / 6.0);
    err = std::max(err, std::abs(dilog(0.5) - (kPi * kPi / 12.0 - 0.5 * std::log(2.0) * std::log(2.0))));
    err = std::max(err, std::abs(dilog(0.0)));
    for (double x : {0.05, 0.2, 0.37, 0.61, 0.83, 0.97}) {
        double refl = kPi * kPi / 6.0 - std::log(x) * std::log(1.0 - x);
        err = std::max(err, std::abs(dilog(x) + dilog(1.0 - x) - refl));
        double dup = 0.5 * dilog(x * x) - dilog(x);  // Li2(-x) via duplication
        double series = 0.0, p = -x;
        for (int n = 1; n < 4000; ++n, p *= -x) series += p / (double(n) * n);
        err = std::max(err, std::abs(dup - series));
    }
    return {within_abs("Li2 special values, reflection and duplication", err, 1e-12),
            within_abs("zeta(2) = pi^2/6", std::abs(zeta_value(2.0) - kPi * kPi / 6.0), 1e-12)};
}

Checks root_count(int k, std::size_t n, std::uint64_t seed, int workers) {
    auto s = count_study({1, k, EnsembleKind::gaussian}, {Region::whole_space()}, n, {seed, workers});
    return {{"full-sphere count is exactly k = " + std::to_string(k) + " for every draw",
             s[0].mean == double(k) && s[0].variance == 0.0,
             "mean " + fmt(s[0].mean) + " variance " + fmt(s[0].variance) + " n " + std::to_string(s[0].n)}};
}

Checks criterion2(int workers) {
    Checks c;
    StatSummary s = expected_density_check({1, 50, EnsembleKind::gaussian}, kHalfSphere, 10000, {101, workers});
    c.push_back(within_3se("half-sphere mean count = k/2 at k = 50, n = 1e4", s.mean, 25.0, s.se_mean));
    auto r = root_count(50, 10000, 102, workers);
    c.insert(c.end(), r.begin(), r.end());
    return c;
}

Checks criterion3(int workers) {
    std::vector<double> edges;
    for (int i = 0; i <= 30; ++i) edges.push_back(0.1 * i);
    PairCorrEstimate est = pair_correlation_estimate({1, 400, EnsembleKind::gaussian}, edges, 100000, {103, workers});
    double worst = 0.0, worst_r = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < est.r.size(); ++i) {
        if (est.r[i] < 0.5 || est.r[i] > 3.0) continue;
        double dev = std::abs(est.kappa[i] - universal_pair_correlation(est.r[i]));
        if (dev > std::max(0.03, 3.0 * est.se[i])) ok = false;
        if (dev > worst) {
            worst = dev;
            worst_r = est.r[i];
        }
    }
    return {{"sup |kappa_hat - kappa| <= max(0.03, 3 se) on [0.5, 3] at k = 400, n = 1e5", ok,
             "sup deviation " + fmt(worst) + " at r = " + fmt(worst_r)}};
}

Checks criterion4(int workers) {
    Checks c;
    TestFunction y1 = TestFunction::harmonic(1, 0);
    std::uint64_t seed = 104;
    for (int k : {50, 150, 300}) {
        auto x = linear_statistic_samples({1, k, EnsembleKind::gaussian}, y1, 100000, {seed++, workers});
        StatSummary s = summarize(x);
        c.push_back(within_3se("Var (Z, Y1) vs Li2 quadrature at k = " + std::to_string(k), s.variance,
                               variance_bipotential(k, y1), s.se_variance));
    }
    c.push_back(within_rel("k Var at k = 400 vs zeta(3)/(16 pi) |Laplacian Y1|^2 within 2%",
                           400.0 * variance_bipotential(400, y1), variance_leading_coeff(y1), 0.02));
    return c;
}

Checks criterion5(int workers) {
    Checks c;
    TestFunction y1 = TestFunction::harmonic(1, 0);
    std::vector<double> ks;
    std::uint64_t seed = 110;
    for (int k : {30, 100, 300}) {
        NormalityDiagnostics d = normality_diagnostics({1, k, EnsembleKind::gaussian}, y1, 5000, {seed++, workers});
        ks.push_back(d.ks);
        if (k == 300) {
            c.push_back({"|skew| <= 0.1 at k = 300, n = 5000", std::abs(d.skewness) <= 0.1, "skew " + fmt(d.skewness)});
            c.push_back({"|excess kurtosis| <= 0.25 at k = 300, n = 5000", std::abs(d.excess_kurtosis) <= 0.25,
                         "kurtosis " + fmt(d.excess_kurtosis)});
        }
    }
    c.push_back({"KS distance decreasing over k = 30, 100, 300", ks[0] > ks[1] && ks[1] > ks[2],
                 "KS " + fmt(ks[0]) + ", " + fmt(ks[1]) + ", " + fmt(ks[2])});
    return c;
}

Checks criterion6(int workers) {
    const int k = 500;
    FSPoint c0 = FSPoint::affine(0.0);
    Region small = Region::cap_with_boundary(c0, 0.5 * kPi);
    auto s = count_study({1, k, EnsembleKind::gaussian}, {small, kHalfSphere}, 100000, {120, workers});
    NumberVariance half = number_variance_from(s[1], k, kHalfSphere);
    double ratio = s[1].variance / s[0].variance;
    double rse = ratio * std::hypot(s[1].se_variance / s[1].variance, s[0].se_variance / s[0].variance);
    return {within_rel("Var / (sqrt(k) Len) at k = 500, half-sphere, vs nu1 within 10%", half.ratio, nu1(), 0.10),
            {"variance ratio for doubled boundary = 2 within 15%", std::abs(ratio / 2.0 - 1.0) <= 0.15,
             "ratio " + fmt(ratio) + " se " + fmt(rse)}};
}

Checks criterion7(bool full, int workers) {
    const Region cap = Region::cap_with_area(FSPoint::affine(0.0), 0.05 * kPi);
    const std::size_t n = full ? 10000000 : 100000;
    std::vector<double> x, y;
    std::vector<double> p;
    std::string trend;
    for (int k = 4; k <= 16; ++k) {
        HoleEstimate h = hole_probability({1, k, EnsembleKind::gaussian}, cap, n, {std::uint64_t(130 + k), workers});
        p.push_back(h.p);
        trend += fmt(h.p) + (k < 16 ? ", " : "");
        if (h.hits > 0) {
            x.push_back(double(k) * k);
            y.push_back(-h.log_p);
        }
    }
    Checks c;
    bool monotone = true;
    for (std::size_t i = 1; i < p.size(); ++i) monotone = monotone && p[i] < p[i - 1];
    c.push_back({"hole probability decreasing over k = 4..16, cap area 0.05 pi", monotone, "p " + trend});
    LinearFit fit = linear_fit(x, y);
    Check f{"-log p vs k^2: R^2 >= 0.9 and positive slope", fit.r2 >= 0.9 && fit.slope > 0.0,
            "slope " + fmt(fit.slope) + " R2 " + fmt(fit.r2)};
    if (full) {
        c.push_back(f);
    } else {
        c.push_back({"reported: " + f.name, true, f.detail});
    }
    return c;
}

Checks criterion8(int workers) {
    Checks c;
    std::uint64_t seed = 150;
    for (int k : {5, 10, 20}) {
        CritCountStudy s = crit_count_study({1, k, EnsembleKind::gaussian}, 2000, {seed++, workers});
        std::string ks = std::to_string(k);
        c.push_back(within_rel("mean #Crit within 2% of (5k^2-8k+4)/(3k-2) at k = " + ks, s.count.mean,
                               expected_crit_count(k), 0.02));
        double rate = double(s.euler_failures) / double(s.draws);
        c.push_back({"#max - #saddle = 2 - k per draw, degenerate rate < 0.1% at k = " + ks, rate < 1e-3,
                     "degenerate " + std::to_string(s.euler_failures) + " of " + std::to_string(s.draws)});
    }
    return c;
}

Checks criterion9(int workers) {
    Checks c;
    std::vector<double> edges;
    for (int i = 0; i <= 30; ++i) edges.push_back(0.1 * i);
    CritValueHistogram m = critical_value_histogram({1, 100, EnsembleKind::spherical}, 2000, edges, {160, workers}, 1.0);
    c.push_back(within_3se("total mass = N_crit / k at k = 100 (no calibration)", m.total_mass,
                           expected_crit_count(100) / 100.0, m.total_mass_se));
    CritValueHistogram h = critical_value_histogram({1, 200, EnsembleKind::spherical}, 10000, edges, {161, workers});
    double sup = histogram_sup_mismatch(h);
    c.push_back({"calibrated histogram sup mismatch <= 0.05 at k = 200, n = 1e4", sup <= 0.05,
                 "sup " + fmt(sup) + " alpha " + fmt(h.alpha)});
    double err = 0.0;
    double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double t) { return critical_value_density(t); }, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14,
        &err);
    c.push_back(within_abs("integral of the critical value density = 5/3", std::abs(integral - 5.0 / 3.0), 1e-6));
    return c;
}

Checks criterion10(bool full, int workers) {
    const int k = 10;
    const double u = full ? 0.85 : 0.80;
    const std::size_t n = full ? 10000000 : 1000000;
    ExcursionStudy s = excursion_study(k, {u}, n, {full ? 171u : 170u, workers});
    return {within_3se("mean chi vs exact polynomial at k = 10, u = " + fmt(u), s.chi[0].mean,
                       expected_euler_char(k, 1, 0, u), s.chi[0].se_mean),
            {"chi(0+) = 2 - k for every draw", s.low_level_failures == 0,
             std::to_string(s.low_level_failures) + " failures, " + std::to_string(s.skipped) + " skipped of " +
                 std::to_string(s.n)}};
}

Checks criterion11(int workers) {
    Checks c;
    const std::vector<FSPoint> grid{FSPoint::affine(0.0), FSPoint::affine(0.5), FSPoint::affine({0.3, 1.2}),
                                    FSPoint::affine(2.5), FSPoint::infinity()};
    std::uint64_t seed = 180;
    for (int k = 1; k <= 5; ++k) {
        for (double t : {0.1, 1.0, 10.0}) {
            FlowConfig f{k, t, Rescale::none, 0.0};
            MeanPotentialResult m = mean_potential_check(f, grid, 10000, {seed++, workers});
            double worst = 0.0;
            for (const auto& r : m.relative) worst = std::max(worst, std::abs(r.mean - m.drift) / r.se_mean);
            Check ch = within_3se("E(phi_P - phi_I) = t/2 at k = " + std::to_string(k) + ", t = " + fmt(t),
                                  m.pooled.mean, m.drift, m.pooled.se_mean);
            ch.detail += ", worst grid-point z " + fmt(worst) + ", raw " + fmt(m.raw[0].mean);
            c.push_back(ch);
        }
    }
    double i2err = 0.0;
    for (int i = 0; i <= 20; ++i) {
        double x = i / 20.0;
        i2err = std::max(i2err, std::abs(i2_kernel(50.0, x) - dilog(x)));
    }
    c.push_back(within_abs("|I2(50, x) - Li2(x)| on x = 0, 0.05, ..., 1", i2err, 1e-3));

    FlowConfig radial{1, 0.5, Rescale::none, 0.0};
    std::vector<double> d2 = path_distances(radial, 100000, {seed++, workers});
    for (double& v : d2) v = std::sqrt(v);
    double ks = ks_distance(d2, [](double d) { return h3_radial_cdf(0.5, d); });
    c.push_back({"d = 2 radial law vs hyperbolic 3-space heat kernel, KS <= 0.02", ks <= 0.02, "KS " + fmt(ks)});

    FSPoint z = FSPoint::affine(0.0);
    std::string trend;
    for (int k : {2, 4, 8}) {
        // |w| chosen so that beta_k = 1/2.
        double b1 = std::pow(0.5, 1.0 / k);
        FSPoint w = FSPoint::affine(std::sqrt(1.0 / b1 - 1.0));
        CovarianceCheck cv = covariance_check({k, 1.0, Rescale::none, 0.0}, z, w, 10000, {seed++, workers});
        trend += "k=" + std::to_string(k) + ": anchored " + fmt(cv.anchored_ratio) + " raw " + fmt(cv.ratio) + "; ";
        if (k == 8) {
            c.push_back(within_rel("anchored covariance ratio at k = 8, t = 1 within 15%", cv.anchored_ratio, 1.0, 0.15));
        }
    }
    c.push_back({"reported: covariance ratio trend over k = 2, 4, 8", true, trend});
    return c;
}

Checks criterion12(int workers) {
    (void)workers;
    std::vector<Json> configs;
    configs.push_back({{"experiment", "density"}, {"k", 50}, {"n", 2000}, {"seed", 7}, {"region", {{"kind", "half-sphere"}}}});
    configs.push_back({{"experiment", "crit"}, {"k", 10}, {"n", 200}, {"seed", 7}});
    configs.push_back({{"experiment", "excursion"}, {"k", 10}, {"u", {0.7, 0.8}}, {"n", 2000}, {"seed", 7}});
    configs.push_back({{"experiment", "metricflow"}, {"k", 2}, {"t", 1.0}, {"mode", "covariance"}, {"n", 200}, {"seed", 7}});
    configs.push_back({{"experiment", "hole"}, {"k", {4, 6}}, {"n", 20000}, {"seed", 7}});
    Checks c;
    for (const Json& j : configs) {
        ExperimentConfig cfg = parse_config(j);
        std::string ref;
        bool same = true;
        for (int w : {1, 4, 8, 1}) {
            cfg.workers = w;
            std::string csv = to_csv(run_experiment(cfg).rows);
            if (ref.empty()) {
                ref = csv;
            } else if (csv != ref) {
                same = false;
            }
        }
        c.push_back({std::string("byte-identical CSV across workers 1, 4, 8 and rerun: ") + j["experiment"].get<std::string>(),
                     same, std::to_string(ref.size()) + " bytes"});
    }
    return c;
}

struct Criterion {
    const char* id;
    const char* title;
    std::function<Checks(int)> run;
};

const std::vector<Criterion>& registry() {
    static const std::vector<Criterion> all{
        {"smoke.kernels", "kernel identities, k <= 10", [](int) { return kernel_exactness(10, 20, 1); }},
        {"smoke.dilog", "Li2 identities", [](int) { return dilog_identities(); }},
        {"smoke.roots", "root-count invariant at k = 20, n = 100", [](int w) { return root_count(20, 100, 2, w); }},
        {"1", "kernel exactness", [](int) { return kernel_exactness(10, 200, 100); }},
        {"2", "expected zeros", criterion2},
        {"3", "pair-correlation universality", criterion3},
        {"4", "variance bipotential", criterion4},
        {"5", "asymptotic normality", criterion5},
        {"6", "number variance", criterion6},
        {"7", "hole probability trend", [](int w) { return criterion7(false, w); }},
        {"8", "critical counts", criterion8},
        {"9", "critical values", criterion9},
        {"10", "excursion Euler characteristic", [](int w) { return criterion10(false, w); }},
        {"11", "heat-kernel metrics", criterion11},
        {"12", "determinism", criterion12},
        {"7.full", "hole probability fit, n = 1e7", [](int w) { return criterion7(true, w); }},
        {"10.full", "excursion at u = 0.85, n = 1e7", [](int w) { return criterion10(true, w); }},
    };
    return all;
}

}  // namespace

std::optional<Tier> parse_tier(std::string_view name) {
    if (name == "smoke") return Tier::smoke;
    if (name == "desk") return Tier::desk;
    if (name == "full") return Tier::full;
    return std::nullopt;
}

std::string_view tier_name(Tier t) {
    switch (t) {
        case Tier::smoke: return "smoke";
        case Tier::desk: return "desk";
        case Tier::full: return "full";
    }
    return "unknown";
}

std::vector<std::string> tier_criteria(Tier tier) {
    std::vector<std::string> ids;
    for (const auto& c : registry()) {
        std::string id = c.id;
        bool smoke = id.rfind("smoke.", 0) == 0;
        bool extra = id.find(".full") != std::string::npos;
        if ((tier == Tier::smoke && smoke) || (tier != Tier::smoke && !smoke && !extra) || (tier == Tier::full && extra))
            ids.push_back(id);
    }
    return ids;
}

CriterionReport run_criterion(const std::string& id, int workers) {
    for (const auto& c : registry()) {
        if (id != c.id) continue;
        CriterionReport r{c.id, c.title, false, {}, 0.0};
        auto t0 = std::chrono::steady_clock::now();
        try {
            r.checks = c.run(workers);
        } catch (const std::exception& e) {
            r.checks.push_back({"completed without error", false, e.what()});
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.passed = !r.checks.empty();
        for (const auto& ch : r.checks) r.passed = r.passed && ch.passed;
        return r;
    }
    throw LabError(ErrorKind::ConfigError, "unknown criterion '" + id + "'");
}

std::vector<CriterionReport> run_suite(Tier tier, int workers,
                                       const std::function<void(const CriterionReport&)>& on_done) {
    std::vector<CriterionReport> out;
    for (const auto& id : tier_criteria(tier)) {
        out.push_back(run_criterion(id, workers));
        if (on_done) on_done(out.back());
    }
    return out;
}

std::string format_report(const CriterionReport& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.title << " (" << fmt(r.seconds) << "s)\n";
    for (const auto& c : r.checks) {
        os << "    [" << (c.passed ? "ok" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    return os.str();
}

Json report_json(const std::vector<CriterionReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) {
        Json checks = Json::array();
        for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds}, {"checks", checks}});
    }
    return arr;
}

}  // namespace sklab::lab
