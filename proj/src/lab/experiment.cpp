#include "sklab/lab/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sklab/critical.hpp"
#include "sklab/excursion.hpp"
#include "sklab/kernel_oracle.hpp"
#include "sklab/metric_flow.hpp"
#include "sklab/special.hpp"
#include "sklab/zero_stats.hpp"

#ifndef SKLAB_BUILD_ID
#define SKLAB_BUILD_ID "unknown"
#endif

namespace sklab::lab {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 11> kNames{{
    {Experiment::density, "density"},
    {Experiment::paircorr, "paircorr"},
    {Experiment::linstat, "linstat"},
    {Experiment::normality, "normality"},
    {Experiment::numbervar, "numbervar"},
    {Experiment::hole, "hole"},
    {Experiment::crit, "crit"},
    {Experiment::critvals, "critvals"},
    {Experiment::excursion, "excursion"},
    {Experiment::metricflow, "metricflow"},
    {Experiment::kernels, "kernels"},
}};

[[noreturn]] void config_error(const std::string& msg) { throw LabError(ErrorKind::ConfigError, msg); }

// Keys that do not influence results.
bool is_runtime_key(const std::string& key) { return key == "workers" || key == "output" || key == "svg"; }

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        config_error(std::string("key '") + key + "': " + e.what());
    }
}

template <class T>
T get_required(const Json& j, const char* key) {
    if (!j.contains(key)) config_error(std::string("missing required key '") + key + "'");
    return get_or<T>(j, key, T{});
}

cdouble parse_complex(const Json& j, const char* key, cdouble fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    config_error(std::string("key '") + key + "' must be a number or [re, im]");
}

EnsembleSpec parse_ensemble(const Json& p) {
    EnsembleSpec spec;
    spec.k = get_required<int>(p, "k");
    if (spec.k < 1 || spec.k > Section::kMaxDegree) config_error("k must lie in [1, 1000]");
    std::string kind = get_or<std::string>(p, "ensemble", "gaussian");
    if (kind == "gaussian") {
        spec.kind = EnsembleKind::gaussian;
    } else if (kind == "spherical") {
        spec.kind = EnsembleKind::spherical;
    } else {
        config_error("ensemble must be 'gaussian' or 'spherical'");
    }
    return spec;
}

Region parse_region(const Json& p, const char* key, Region fallback) {
    if (!p.contains(key)) return fallback;
    const Json& r = p.at(key);
    if (!r.is_object()) config_error(std::string("'") + key + "' must be an object");
    std::string kind = get_required<std::string>(r, "kind");
    FSPoint center = FSPoint::affine(parse_complex(r, "center", 0.0));
    try {
        if (kind == "half-sphere") return Region::cap_with_area(center, 0.5 * kPi);
        if (kind == "whole") return Region::whole_space();
        if (kind == "cap") {
            if (r.contains("area")) return Region::cap_with_area(center, get_required<double>(r, "area"));
            if (r.contains("boundary")) return Region::cap_with_boundary(center, get_required<double>(r, "boundary"));
            double radius = get_required<double>(r, "radius");
            if (!(radius > 0.0 && radius < 0.5 * kPi)) config_error("cap radius must lie in (0, pi/2)");
            return Region::cap(center, radius);
        }
        if (kind == "disc" || kind == "polydisc") {
            double radius = get_required<double>(r, "radius");
            if (!(radius > 0.0)) config_error("disc radius must be positive");
            return kind == "disc" ? Region::disc(radius) : Region::polydisc(radius);
        }
    } catch (const LabError& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        config_error(e.what());
    }
    config_error("region kind must be one of half-sphere, cap, disc, polydisc, whole");
}

std::vector<double> parse_edges(const Json& p) {
    const Json b = p.value("bins", Json::object());
    double lo = get_or<double>(b, "lo", 0.0);
    double hi = get_or<double>(b, "hi", 3.0);
    double width = get_or<double>(b, "width", 0.1);
    if (!(width > 0.0) || !(hi > lo)) config_error("bins need hi > lo and width > 0");
    int count = int(std::llround((hi - lo) / width));
    if (count < 1 || std::abs(lo + count * width - hi) > 1e-9 * std::max(1.0, hi))
        config_error("bins: (hi - lo) must be a multiple of width");
    std::vector<double> e(count + 1);
    for (int i = 0; i <= count; ++i) e[i] = lo + width * i;
    return e;
}

TestFunction parse_harmonic(const Json& p) {
    const Json h = p.value("harmonic", Json::object());
    int l = get_or<int>(h, "l", 1);
    int m = get_or<int>(h, "m", 0);
    if (l < 1 || std::abs(m) > l) config_error("harmonic needs l >= 1 and |m| <= l");
    return TestFunction::harmonic(l, m);
}

FlowConfig parse_flow(const Json& p) {
    FlowConfig f;
    f.k = get_required<int>(p, "k");
    f.t = get_required<double>(p, "t");
    f.dt = get_or<double>(p, "dt", 0.0);
    std::string rs = get_or<std::string>(p, "rescale", "none");
    if (rs == "none") {
        f.rescale = Rescale::none;
    } else if (rs == "mabuchi") {
        f.rescale = Rescale::mabuchi;
    } else {
        config_error("rescale must be 'none' or 'mabuchi'");
    }
    if (f.k < 1 || f.k > 16) config_error("metricflow needs 1 <= k <= 16");
    if (!(f.t > 0.0)) config_error("metricflow needs t > 0");
    if (f.dt > 0.0 && f.dt > f.effective_time() / 50.0) config_error("dt must not exceed t/50");
    return f;
}

std::vector<int> parse_int_list(const Json& p, const char* key, std::vector<int> fallback) {
    if (!p.contains(key)) return fallback;
    const Json& v = p.at(key);
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array() || v.empty()) config_error(std::string("'") + key + "' must be an integer or a nonempty list");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) config_error(std::string("'") + key + "' entries must be integers");
        out.push_back(x.get<int>());
    }
    return out;
}

std::vector<double> parse_double_list(const Json& p, const char* key, std::vector<double> fallback) {
    if (!p.contains(key)) return fallback;
    const Json& v = p.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) config_error(std::string("'") + key + "' must be a number or a nonempty list");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_error(std::string("'") + key + "' entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Validates experiment-specific keys without running anything.
void validate_params(Experiment e, const Json& p, std::size_t n) {
    auto need_n = [&](std::size_t lo) {
        if (n < lo) config_error("n must be >= " + std::to_string(lo) + " for this experiment");
    };
    switch (e) {
        case Experiment::density:
            parse_ensemble(p);
            parse_region(p, "region", Region::whole_space());
            need_n(100);
            break;
        case Experiment::paircorr: {
            EnsembleSpec s = parse_ensemble(p);
            if (s.k < 100) config_error("paircorr needs k >= 100");
            std::vector<double> edges = parse_edges(p);
            validate_pair_bins(edges);  // BinTooWide / DomainError propagate
            need_n(1);
            break;
        }
        case Experiment::linstat:
        case Experiment::normality:
            parse_ensemble(p);
            parse_harmonic(p);
            need_n(e == Experiment::normality ? 2000 : 2);
            break;
        case Experiment::numbervar:
            parse_ensemble(p);
            parse_region(p, "region", Region::whole_space());
            need_n(2);
            break;
        case Experiment::hole: {
            for (int k : parse_int_list(p, "k", {})) {
                if (k < 1 || k > Section::kMaxDegree) config_error("k must lie in [1, 1000]");
            }
            if (!p.contains("k")) config_error("missing required key 'k'");
            double area = get_or<double>(p, "area", 0.05 * kPi);
            if (!(area > 0.0 && area < kPi)) config_error("area must lie in (0, pi)");
            need_n(1);
            break;
        }
        case Experiment::crit:
            parse_ensemble(p);
            need_n(1);
            break;
        case Experiment::critvals: {
            EnsembleSpec s = parse_ensemble(p);
            if (s.k < 50) config_error("critvals needs k >= 50");
            parse_edges(p);
            need_n(1);
            break;
        }
        case Experiment::excursion: {
            int k = get_required<int>(p, "k");
            if (k < 2 || k > 200) config_error("excursion needs 2 <= k <= 200");
            for (double u : parse_double_list(p, "u", {0.8})) {
                if (!(u > 0.0 && u <= 1.0)) config_error("thresholds u must lie in (0, 1]");
            }
            need_n(1);
            break;
        }
        case Experiment::metricflow: {
            parse_flow(p);
            std::string mode = get_or<std::string>(p, "mode", "mean");
            if (mode != "mean" && mode != "covariance" && mode != "radial")
                config_error("mode must be 'mean', 'covariance' or 'radial'");
            if (mode == "radial" && get_required<int>(p, "k") != 1) config_error("radial mode needs k = 1 (d = 2)");
            parse_complex(p, "z", 0.0);
            parse_complex(p, "w", 1.0);
            need_n(2);
            break;
        }
        case Experiment::kernels:
            for (int k : parse_int_list(p, "k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10})) {
                if (k < 1 || k > 40) config_error("kernels needs 1 <= k <= 40");
            }
            need_n(1);
            break;
    }
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Row builder shared by the experiments.
struct Rows {
    explicit Rows(const ExperimentConfig& c) : cfg(c), params(c.param_json()) {}
    const ExperimentConfig& cfg;
    std::string params;
    RunResult result;

    void add(const std::string& stat, double value, double se, std::size_t n) {
        result.rows.push_back(
            {std::string(experiment_name(cfg.experiment)), params, stat, value, se, n, cfg.seed, build_id()});
    }
    void check(const std::string& name, bool ok, const std::string& detail) {
        result.checks.push_back({name, ok, detail});
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string stat_label(const std::string& base, const std::string& key, double v) {
    return base + "[" + key + "=" + format_double(v) + "]";
}

void run_density(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    Region region = parse_region(p, "region", Region::whole_space());
    McOptions mc{r.cfg.seed, r.cfg.workers};
    StatSummary s = expected_density_check(spec, region, r.cfg.n, mc);
    double expected = spec.k * region_geometry(region).area / kPi;
    r.add("mean_count", s.mean, s.se_mean, s.n);
    r.add("expected_count", expected, 0.0, s.n);
    r.add("count_variance", s.variance, s.se_variance, s.n);
    double tol = std::max(3.0 * s.se_mean, 1e-9 * expected);
    r.check("mean count within 3 stderr of k Area / pi", std::abs(s.mean - expected) <= tol,
            "mean " + fmt(s.mean) + " expected " + fmt(expected) + " se " + fmt(s.se_mean));
}

void run_paircorr(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    std::vector<double> edges = parse_edges(p);
    PairCorrEstimate est = pair_correlation_estimate(spec, edges, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    Plot plot{"Zero pair correlation, k = " + std::to_string(spec.k), "r = sqrt(k) d", "kappa", {}, {}, {}, {}, {}};
    double worst = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < est.r.size(); ++i) {
        double ref = universal_pair_correlation(est.r[i]);
        r.add(stat_label("kappa", "r", est.r[i]), est.kappa[i], est.se[i], est.n);
        r.add(stat_label("kappa_ref", "r", est.r[i]), ref, 0.0, est.n);
        if (est.r[i] >= 0.5 && est.r[i] <= 3.0) {
            double dev = std::abs(est.kappa[i] - ref);
            worst = std::max(worst, dev);
            if (dev > std::max(0.03, 3.0 * est.se[i])) ok = false;
        }
        plot.point_x.push_back(est.r[i]);
        plot.point_y.push_back(est.kappa[i]);
        plot.point_err.push_back(est.se[i]);
    }
    for (int i = 1; i <= 300; ++i) {
        double x = edges.back() * i / 300.0;
        plot.curve_x.push_back(x);
        plot.curve_y.push_back(universal_pair_correlation(x));
    }
    r.add("sup_deviation_0.5_3", worst, 0.0, est.n);
    r.check("sup |kappa_hat - kappa| <= max(0.03, 3 se) on [0.5, 3]", ok, "sup deviation " + fmt(worst));
    r.result.plot = plot;
}

void run_linstat(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    TestFunction f = parse_harmonic(p);
    std::vector<double> x = linear_statistic_samples(spec, f, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    StatSummary s = summarize(x);
    double exact = variance_bipotential(spec.k, f);
    double lead = variance_leading_coeff(f);
    r.add("mean", s.mean, s.se_mean, s.n);
    r.add("variance", s.variance, s.se_variance, s.n);
    r.add("variance_bipotential", exact, 0.0, s.n);
    r.add("k_variance_bipotential", spec.k * exact, 0.0, s.n);
    r.add("leading_coefficient", lead, 0.0, s.n);
    r.check("MC variance within 3 stderr of the bipotential value", std::abs(s.variance - exact) <= 3.0 * s.se_variance,
            "variance " + fmt(s.variance) + " exact " + fmt(exact) + " se " + fmt(s.se_variance));
}

void run_normality(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    TestFunction f = parse_harmonic(p);
    NormalityDiagnostics d = normality_diagnostics(spec, f, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    std::size_t n = d.raw.n;
    r.add("skewness", d.skewness, std::sqrt(6.0 / double(n)), n);
    r.add("excess_kurtosis", d.excess_kurtosis, std::sqrt(24.0 / double(n)), n);
    r.add("ks_distance", d.ks, 0.0, n);
    r.check("|skew| <= 0.1 and |excess kurtosis| <= 0.25",
            std::abs(d.skewness) <= 0.1 && std::abs(d.excess_kurtosis) <= 0.25,
            "skew " + fmt(d.skewness) + " kurtosis " + fmt(d.excess_kurtosis));
}

void run_numbervar(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    Region region = parse_region(p, "region", Region::cap_with_area(FSPoint::affine(0.0), 0.5 * kPi));
    NumberVariance nv = number_variance(spec, region, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    r.add("count_variance", nv.counts.variance, nv.counts.se_variance, nv.counts.n);
    r.add("ratio", nv.ratio, nv.ratio_se, nv.counts.n);
    r.add("nu1", nu1(), 0.0, nv.counts.n);
    r.check("Var / (sqrt(k) Len) within 10% of nu1", std::abs(nv.ratio / nu1() - 1.0) <= 0.10,
            "ratio " + fmt(nv.ratio) + " nu1 " + fmt(nu1()));
}

void run_hole(Rows& r) {
    const Json& p = r.cfg.params;
    std::vector<int> ks = parse_int_list(p, "k", {});
    double area = get_or<double>(p, "area", 0.05 * kPi);
    Region cap = Region::cap_with_area(FSPoint::affine(0.0), area);
    std::vector<double> x, y;
    Plot plot{"Hole probability, cap area " + fmt(area), "k^2", "-log p", {}, {}, {}, {}, {}};
    bool monotone = true;
    double prev = -1.0;
    for (int k : ks) {
        HoleEstimate h = hole_probability({1, k, EnsembleKind::gaussian}, cap, r.cfg.n, {r.cfg.seed, r.cfg.workers});
        r.add(stat_label("p", "k", k), h.p, h.se, h.n);
        if (h.hits > 0) {
            double se_log = h.se / h.p;
            r.add(stat_label("neg_log_p", "k", k), -h.log_p, se_log, h.n);
            x.push_back(double(k) * k);
            y.push_back(-h.log_p);
            plot.point_x.push_back(double(k) * k);
            plot.point_y.push_back(-h.log_p);
            plot.point_err.push_back(se_log);
        }
        if (prev >= 0.0 && h.p > prev) monotone = false;
        prev = h.p;
    }
    if (x.size() >= 2) {
        LinearFit fit = linear_fit(x, y);
        r.add("fit_slope", fit.slope, 0.0, r.cfg.n);
        r.add("fit_intercept", fit.intercept, 0.0, r.cfg.n);
        r.add("fit_r2", fit.r2, 0.0, r.cfg.n);
        for (double k2 : {x.front(), x.back()}) {
            plot.curve_x.push_back(k2);
            plot.curve_y.push_back(fit.intercept + fit.slope * k2);
        }
        r.check("-log p linear in k^2 with positive slope", fit.r2 >= 0.9 && fit.slope > 0.0,
                "slope " + fmt(fit.slope) + " R2 " + fmt(fit.r2));
    }
    r.check("hole probability decreasing in k", monotone, "");
    r.result.plot = plot;
}

void run_crit(Rows& r) {
    EnsembleSpec spec = parse_ensemble(r.cfg.params);
    CritCountStudy s = crit_count_study(spec, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    double expected = expected_crit_count(spec.k);
    r.add("mean_count", s.count.mean, s.count.se_mean, s.count.n);
    r.add("expected_count", expected, 0.0, s.count.n);
    r.add("mean_max", s.n_max.mean, s.n_max.se_mean, s.count.n);
    r.add("mean_saddle", s.n_saddle.mean, s.n_saddle.se_mean, s.count.n);
    r.add("degenerate_draws", double(s.euler_failures), 0.0, s.draws);
    double rate = double(s.euler_failures) / double(std::max<std::size_t>(1, s.draws));
    r.check("mean count within 2% of (5k^2 - 8k + 4)/(3k - 2)", std::abs(s.count.mean / expected - 1.0) <= 0.02,
            "mean " + fmt(s.count.mean) + " expected " + fmt(expected));
    r.check("degenerate rate < 0.1%", rate < 1e-3, "rate " + fmt(rate));
}

void run_critvals(Rows& r) {
    const Json& p = r.cfg.params;
    EnsembleSpec spec = parse_ensemble(p);
    spec.kind = EnsembleKind::spherical;
    std::vector<double> edges = parse_edges(p);
    double alpha = get_or<double>(p, "alpha", critical_value_scale());
    CritValueHistogram h = critical_value_histogram(spec, r.cfg.n, edges, {r.cfg.seed, r.cfg.workers}, alpha);
    Plot plot{"Critical values, k = " + std::to_string(spec.k), "t", "density", {}, {}, {}, {}, {}};
    for (std::size_t i = 0; i < h.density.size(); ++i) {
        double c = 0.5 * (edges[i] + edges[i + 1]);
        r.add(stat_label("density", "t", c), h.density[i], h.se[i], h.n);
        r.add(stat_label("density_ref", "t", c), critical_value_bin_average(edges[i], edges[i + 1]), 0.0, h.n);
        plot.point_x.push_back(c);
        plot.point_y.push_back(h.density[i]);
        plot.point_err.push_back(h.se[i]);
    }
    for (int i = 0; i <= 300; ++i) {
        double t = edges.front() + (edges.back() - edges.front()) * i / 300.0;
        plot.curve_x.push_back(t);
        plot.curve_y.push_back(critical_value_density(t));
    }
    double sup = histogram_sup_mismatch(h);
    double mass_ref = expected_crit_count(spec.k) / spec.k;
    r.add("total_mass", h.total_mass, h.total_mass_se, h.n);
    r.add("total_mass_ref", mass_ref, 0.0, h.n);
    r.add("sup_mismatch", sup, 0.0, h.n);
    r.add("alpha", h.alpha, 0.0, h.n);
    r.add("skipped", double(h.skipped), 0.0, h.n);
    r.check("histogram sup mismatch <= 0.05", sup <= 0.05, "sup " + fmt(sup));
    r.check("total mass within 3 stderr of N_crit / k", std::abs(h.total_mass - mass_ref) <= 3.0 * h.total_mass_se,
            "mass " + fmt(h.total_mass) + " expected " + fmt(mass_ref));
    r.result.plot = plot;
}

void run_excursion(Rows& r) {
    const Json& p = r.cfg.params;
    int k = get_required<int>(p, "k");
    std::vector<double> us = parse_double_list(p, "u", {0.8});
    ExcursionStudy s = excursion_study(k, us, r.cfg.n, {r.cfg.seed, r.cfg.workers});
    Plot plot{"Excursion Euler characteristic, k = " + std::to_string(k), "u", "E chi", {}, {}, {}, {}, {}};
    for (std::size_t i = 0; i < us.size(); ++i) {
        double ref = expected_euler_char(k, 1, 0, us[i]);
        r.add(stat_label("chi", "u", us[i]), s.chi[i].mean, s.chi[i].se_mean, s.chi[i].n);
        r.add(stat_label("chi_ref", "u", us[i]), ref, 0.0, s.chi[i].n);
        r.add(stat_label("contractibility_violations", "u", us[i]), double(s.contractibility_violations[i]), 0.0,
              s.chi[i].n);
        r.check("chi within 3 stderr at u = " + format_double(us[i]),
                std::abs(s.chi[i].mean - ref) <= 3.0 * s.chi[i].se_mean + 1e-12,
                "chi " + fmt(s.chi[i].mean) + " expected " + fmt(ref) + " se " + fmt(s.chi[i].se_mean));
        plot.point_x.push_back(us[i]);
        plot.point_y.push_back(s.chi[i].mean);
        plot.point_err.push_back(s.chi[i].se_mean);
    }
    double lo = std::min(0.5, *std::min_element(us.begin(), us.end()));
    for (int i = 0; i <= 200; ++i) {
        double u = lo + (1.0 - lo) * i / 200.0;
        plot.curve_x.push_back(u);
        plot.curve_y.push_back(expected_euler_char(k, 1, 0, u));
    }
    r.add("low_level_failures", double(s.low_level_failures), 0.0, s.n);
    r.add("skipped", double(s.skipped), 0.0, s.n);
    r.check("chi(0+) = 2 - k for every draw", s.low_level_failures == 0,
            std::to_string(s.low_level_failures) + " failures");
    r.result.plot = plot;
}

void run_metricflow(Rows& r) {
    const Json& p = r.cfg.params;
    FlowConfig f = parse_flow(p);
    std::string mode = get_or<std::string>(p, "mode", "mean");
    McOptions mc{r.cfg.seed, r.cfg.workers};
    if (mode == "mean") {
        std::vector<FSPoint> grid{FSPoint::affine(0.0), FSPoint::affine(0.5), FSPoint::affine({0.3, 1.2}),
                                  FSPoint::affine(2.5), FSPoint::infinity()};
        MeanPotentialResult m = mean_potential_check(f, grid, r.cfg.n, mc);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            std::string z = std::to_string(j);
            r.add("relative_mean[z" + z + "]", m.relative[j].mean, m.relative[j].se_mean, m.relative[j].n);
            r.add("relative_mean_raw[z" + z + "]", m.raw[j].mean, m.raw[j].se_mean, m.raw[j].n);
            r.add("contrast_mean[z" + z + "]", m.contrast[j].mean, m.contrast[j].se_mean, m.contrast[j].n);
        }
        r.add("relative_mean_pooled", m.pooled.mean, m.pooled.se_mean, m.pooled.n);
        r.add("drift", m.drift, 0.0, r.cfg.n);
        r.check("grid-averaged E(phi_P - phi_I) = t/2 within 3 stderr",
                std::abs(m.pooled.mean - m.drift) <= 3.0 * m.pooled.se_mean,
                "mean " + fmt(m.pooled.mean) + " drift " + fmt(m.drift) + " se " + fmt(m.pooled.se_mean));
    } else if (mode == "covariance") {
        FSPoint z = FSPoint::affine(parse_complex(p, "z", 0.0));
        FSPoint w = FSPoint::affine(parse_complex(p, "w", 1.0));
        CovarianceCheck c = covariance_check(f, z, w, r.cfg.n, mc);
        r.add("beta_k", c.beta, 0.0, c.n);
        r.add("predicted", c.predicted, 0.0, c.n);
        r.add("covariance", c.empirical, c.empirical_se, c.n);
        r.add("ratio", c.ratio, c.empirical_se / c.predicted, c.n);
        r.add("anchored_covariance", c.anchored, c.anchored_se, c.n);
        r.add("anchored_ratio", c.anchored_ratio, c.anchored_se / c.predicted, c.n);
        r.check("anchored covariance ratio within 15%", std::abs(c.anchored_ratio - 1.0) <= 0.15,
                "ratio " + fmt(c.anchored_ratio));
    } else {
        std::vector<double> d2 = path_distances(f, r.cfg.n, mc);
        std::vector<double> d(d2.size());
        for (std::size_t i = 0; i < d2.size(); ++i) d[i] = std::sqrt(d2[i]);
        double t = f.effective_time();
        double ks = ks_distance(d, [t](double x) { return h3_radial_cdf(t, x); });
        StatSummary s = summarize(d2);
        r.add("mean_delta2", s.mean, s.se_mean, s.n);
        r.add("ks_h3", ks, 0.0, s.n);
        r.check("radial law KS <= 0.02", ks <= 0.02, "KS " + fmt(ks));
        Plot plot{"Radial law of delta(I, P_t), t = " + fmt(t), "delta", "density", {}, {}, {}, {}, {}};
        double hi = 0.0;
        for (double v : d) hi = std::max(hi, v);
        const int bins = 40;
        std::vector<double> counts(bins, 0.0);
        for (double v : d) counts[std::min(bins - 1, int(v / hi * bins))] += 1.0;
        double width = hi / bins, nn = double(d.size());
        for (int b = 0; b < bins; ++b) {
            double c = counts[b] / (nn * width);
            plot.point_x.push_back((b + 0.5) * width);
            plot.point_y.push_back(c);
            plot.point_err.push_back(std::sqrt(counts[b]) / (nn * width));
        }
        for (int i = 0; i <= 200; ++i) {
            double x = hi * i / 200.0;
            plot.curve_x.push_back(x);
            plot.curve_y.push_back(h3_radial_density(t, x));
        }
        r.result.plot = plot;
    }
}

void run_kernels(Rows& r) {
    std::vector<int> ks = parse_int_list(r.cfg.params, "k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    Rng rng = replicate_rng(r.cfg.seed, 0);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst_p = 0.0, worst_d = 0.0;
    for (int k : ks) {
        QuadratureKernel q(k);
        double dp = 0.0, dd = 0.0;
        for (std::size_t i = 0; i < r.cfg.n; ++i) {
            FSPoint z = FSPoint::from_unit_vector(normalized(Vec3{g(rng), g(rng), g(rng)}));
            FSPoint w = FSPoint::from_unit_vector(normalized(Vec3{g(rng), g(rng), g(rng)}));
            dp = std::max(dp, std::abs(q.normalized(z, w) - normalized_kernel({1, k}, z, w)));
            dd = std::max(dd, std::abs(q.diagonal(z) - bergman_diagonal({1, k})));
        }
        r.add(stat_label("max_kernel_error", "k", k), dp, 0.0, r.cfg.n);
        r.add(stat_label("max_diagonal_error", "k", k), dd, 0.0, r.cfg.n);
        worst_p = std::max(worst_p, dp);
        worst_d = std::max(worst_d, dd);
    }
    r.check("closed-form P_k equals the quadrature kernel to 1e-9", worst_p <= 1e-9, "max error " + fmt(worst_p));
    r.check("diagonal equals (k+1)/pi to 1e-10", worst_d <= 1e-10, "max error " + fmt(worst_d));
}

}  // namespace

std::string_view experiment_name(Experiment e) {
    for (const auto& [x, name] : kNames)
        if (x == e) return name;
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& [x, n] : kNames)
        if (n == name) return x;
    return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& [x, name] : kNames) v.push_back(x);
        return v;
    }();
    return all;
}

std::string ExperimentConfig::param_json() const {
    Json j = params;
    j["experiment"] = std::string(experiment_name(experiment));
    j["n"] = n;
    j["seed"] = seed;
    j["assert"] = assert_mode;
    return j.dump();
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(param_json())));
    return buf;
}

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) config_error("config must be a JSON object");
    ExperimentConfig c;
    std::string name = get_required<std::string>(j, "experiment");
    auto e = parse_experiment(name);
    if (!e) config_error("unknown experiment '" + name + "'");
    c.experiment = *e;
    if (!j.contains("seed")) config_error("missing required key 'seed'");
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
        config_error("seed must be a non-negative 64-bit integer");
    c.seed = j.at("seed").get<std::uint64_t>();
    long long n = get_required<long long>(j, "n");
    if (n < 1) config_error("n must be positive");
    c.n = std::size_t(n);
    c.workers = get_or<int>(j, "workers", 1);
    if (c.workers < 1) config_error("workers must be positive");
    c.output = get_or<std::string>(j, "output", ".");
    c.assert_mode = get_or<bool>(j, "assert", false);
    c.svg = get_or<bool>(j, "svg", true);
    c.params = Json::object();
    for (const auto& [key, value] : j.items()) {
        if (key == "experiment" || key == "seed" || key == "n" || key == "assert" || is_runtime_key(key)) continue;
        if (!key.empty() && key[0] == '_') continue;  // comments
        c.params[key] = value;
    }
    validate_params(c.experiment, c.params, c.n);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        config_error(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

Json config_template(Experiment e) {
    Json j;
    j["experiment"] = std::string(experiment_name(e));
    j["seed"] = 7;
    j["workers"] = 1;
    j["output"] = "results";
    j["assert"] = false;
    j["svg"] = true;
    Json doc{{"seed", "mandatory 64-bit seed; replicate i uses its own stream derived from (seed, i)"},
             {"n", "number of replicates"},
             {"workers", "threads; results do not depend on it; LAB_WORKERS overrides"},
             {"output", "directory for <experiment>-<hash>.csv and .svg"},
             {"assert", "exit 2 when a check fails"},
             {"svg", "write the plot"}};
    switch (e) {
        case Experiment::density:
            doc["k"] = "degree, 1..1000";
            doc["ensemble"] = "gaussian | spherical";
            doc["region"] = "{kind: half-sphere | whole | cap (area, boundary or radius; center [re, im]) | disc | polydisc (radius)}";
            j["k"] = 50;
            j["n"] = 10000;
            j["ensemble"] = "gaussian";
            j["region"] = {{"kind", "half-sphere"}};
            break;
        case Experiment::paircorr:
            doc["k"] = "degree >= 100";
            doc["bins"] = "r = sqrt(k) d bins {lo, hi, width}; width <= 0.25";
            j["k"] = 400;
            j["n"] = 10000;
            j["bins"] = {{"lo", 0.0}, {"hi", 3.0}, {"width", 0.1}};
            break;
        case Experiment::linstat:
            doc["harmonic"] = "test function Y_lm {l, m}";
            j["k"] = 50;
            j["n"] = 10000;
            j["harmonic"] = {{"l", 1}, {"m", 0}};
            break;
        case Experiment::normality:
            doc["harmonic"] = "test function Y_lm {l, m}; n >= 2000";
            j["k"] = 100;
            j["n"] = 5000;
            j["harmonic"] = {{"l", 1}, {"m", 0}};
            break;
        case Experiment::numbervar:
            doc["region"] = "as for density";
            j["k"] = 200;
            j["n"] = 10000;
            j["region"] = {{"kind", "half-sphere"}};
            break;
        case Experiment::hole:
            doc["k"] = "list of degrees";
            doc["area"] = "cap area in (0, pi)";
            j["k"] = {4, 6, 8, 10};
            j["n"] = 100000;
            j["area"] = 0.05 * kPi;
            break;
        case Experiment::crit:
            doc["k"] = "degree";
            j["k"] = 10;
            j["n"] = 2000;
            break;
        case Experiment::critvals:
            doc["k"] = "degree >= 50 (spherical ensemble)";
            doc["bins"] = "bins {lo, hi, width} of the normalized critical value t";
            doc["alpha"] = "optional calibration scale";
            j["k"] = 100;
            j["n"] = 1000;
            j["bins"] = {{"lo", 0.0}, {"hi", 3.0}, {"width", 0.1}};
            break;
        case Experiment::excursion:
            doc["u"] = "threshold list in (0, 1]";
            j["k"] = 10;
            j["n"] = 10000;
            j["u"] = {0.5, 0.7, 0.8, 0.85};
            break;
        case Experiment::metricflow:
            doc["t"] = "heat-kernel time";
            doc["rescale"] = "none | mabuchi";
            doc["mode"] = "mean | covariance | radial (k = 1)";
            doc["z"] = "first point [re, im] (covariance)";
            doc["w"] = "second point [re, im] (covariance)";
            doc["dt"] = "optional step; default from a step-size budget";
            j["k"] = 4;
            j["t"] = 1.0;
            j["n"] = 10000;
            j["rescale"] = "none";
            j["mode"] = "covariance";
            j["z"] = {0.0, 0.0};
            j["w"] = {0.5, 0.0};
            break;
        case Experiment::kernels:
            doc["k"] = "list of degrees, <= 40";
            doc["n"] = "random point pairs per degree";
            j["k"] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            j["n"] = 200;
            break;
    }
    j["_doc"] = doc;
    return j;
}

int effective_workers(int configured) {
    if (const char* env = std::getenv("LAB_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return configured;
}

RunResult run_experiment(const ExperimentConfig& config) {
    Rows r(config);
    switch (config.experiment) {
        case Experiment::density: run_density(r); break;
        case Experiment::paircorr: run_paircorr(r); break;
        case Experiment::linstat: run_linstat(r); break;
        case Experiment::normality: run_normality(r); break;
        case Experiment::numbervar: run_numbervar(r); break;
        case Experiment::hole: run_hole(r); break;
        case Experiment::crit: run_crit(r); break;
        case Experiment::critvals: run_critvals(r); break;
        case Experiment::excursion: run_excursion(r); break;
        case Experiment::metricflow: run_metricflow(r); break;
        case Experiment::kernels: run_kernels(r); break;
    }
    return std::move(r.result);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_header() { return "experiment,param_json,stat,value,stderr,n,seed,build\n"; }

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = csv_header();
    for (const auto& r : rows) {
        out += csv_field(r.experiment) + ',' + csv_field(r.param_json) + ',' + csv_field(r.stat) + ',' +
               format_double(r.value) + ',' + format_double(r.stderr_value) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.seed) + ',' + csv_field(r.build) + '\n';
    }
    return out;
}

const char* build_id() { return SKLAB_BUILD_ID; }

int run_and_write(const ExperimentConfig& config, std::string* summary) {
    RunResult res = run_experiment(config);
    std::filesystem::create_directories(config.output);
    std::string stem = std::string(experiment_name(config.experiment)) + "-" + config.hash();
    std::filesystem::path csv = std::filesystem::path(config.output) / (stem + ".csv");
    {
        std::ofstream out(csv, std::ios::binary);
        out << to_csv(res.rows);
        if (!out) throw LabError(ErrorKind::ConfigError, "cannot write " + csv.string());
    }
    if (config.svg && res.plot) {
        std::ofstream out(std::filesystem::path(config.output) / (stem + ".svg"), std::ios::binary);
        out << render_svg(*res.plot);
    }
    int code = 0;
    std::ostringstream msg;
    msg << "wrote " << csv.string() << " (" << res.rows.size() << " rows)\n";
    for (const auto& r : res.rows) {
        if (!std::isfinite(r.value) || !std::isfinite(r.stderr_value)) {
            msg << "non-finite value in stat " << r.stat << "\n";
            code = 2;
        }
    }
    for (const auto& c : res.checks) {
        msg << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) msg << " (" << c.detail << ")";
        msg << "\n";
        if (!c.passed && config.assert_mode) code = 2;
    }
    if (summary) *summary = msg.str();
    return code;
}

}  // namespace sklab::lab
