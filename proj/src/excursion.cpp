#include "sklab/excursion.hpp"

#include <algorithm>
#include <cmath>

namespace sklab {

void ExcursionSpec::validate() const {
    if (k < 1) throw LabError(ErrorKind::DomainError, "excursion needs k >= 1");
    if (!(u > 0.0 && u <= 1.0)) throw LabError(ErrorKind::DomainError, "threshold u must lie in (0, 1]");
}

double coherent_amplitude(int k) { return std::sqrt((k + 1.0) / kPi); }

double sup_hnorm(const Section& section) {
    if (section.coeff_norm() == 0.0) return 0.0;
    const int k = section.degree();
    const int count = std::max(256, 24 * k);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<std::pair<double, FSPoint>> grid;
    grid.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        FSPoint p = FSPoint::from_unit_vector(Vec3{r * std::cos(golden * i), r * std::sin(golden * i), z}).canonical();
        grid.push_back({section.hnorm(p), p});
    }
    const std::size_t top = std::min<std::size_t>(8, grid.size());
    std::partial_sort(grid.begin(), grid.begin() + long(top), grid.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = grid.front().first;
    std::vector<FSPoint> seeds;
    for (std::size_t i = 0; i < top; ++i) seeds.push_back(grid[i].second);
    for (const auto& c : polish_critical_points(section, seeds))
        if (c.index == CriticalIndex::max) best = std::max(best, c.value);
    return best;
}

int euler_characteristic(const CriticalSet& cs, double coeff_norm, double u) {
    if (!(u > 0.0 && u <= 1.0)) throw LabError(ErrorKind::DomainError, "threshold u must lie in (0, 1]");
    double level = u * coeff_norm * coherent_amplitude(cs.k);
    int chi = 0;
    for (const auto& p : cs.points)
        if (p.value > level) chi += p.index == CriticalIndex::max ? 1 : -1;
    return chi;
}

int euler_characteristic(const Section& section, double u) {
    return euler_characteristic(find_critical_points(section), section.coeff_norm(), u);
}

double expected_euler_char(int k, int delta, int genus, double u) {
    if (long(k) * delta <= 2L * genus - 2) throw LabError(ErrorKind::DomainError, "needs k delta > 2g - 2");
    if (!(u > 0.0 && u <= 1.0)) throw LabError(ErrorKind::DomainError, "threshold u must lie in (0, 1]");
    double kd = double(k) * delta, g = genus, u2 = u * u, v = 1.0 - u2;
    double poly = kd * kd * u2 - kd * (g * u2 + v) + (2.0 - 2.0 * g) * v;
    return std::pow(v, kd - g - 1.0) * poly;
}

double euler_char_estimate(int k, double u) {
    double d = k + 1.0, u2 = u * u;
    return d * d * std::pow(1.0 - u2, d - 2.0) * u2;
}

ExcursionStudy excursion_study(int k, const std::vector<double>& u, std::size_t n, const McOptions& mc) {
    for (double v : u) ExcursionSpec{k, v}.validate();
    EnsembleSpec spec{1, k, EnsembleKind::spherical};
    struct Row {
        bool ok = false;
        bool low_ok = false;
        std::vector<int> chi;
        std::vector<char> nonempty;
    };
    ExcursionStudy st;
    st.u = u;
    std::vector<std::vector<double>> chis(u.size());
    st.contractibility_violations.assign(u.size(), 0);
    st.nonempty.assign(u.size(), 0);
    ordered_map<Row>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            Section s = sample(spec, rng);
            Row r;
            CriticalSet cs;
            try {
                cs = find_critical_points(s);
            } catch (const LabError& e) {
                if (e.kind() != ErrorKind::Degenerate) throw;
                return r;
            }
            r.ok = true;
            double top = 0.0;
            for (const auto& p : cs.points) top = std::max(top, p.value);
            double norm = s.coeff_norm();
            r.low_ok = euler_characteristic(cs, norm, 1e-12) == 2 - k;
            for (double v : u) {
                r.chi.push_back(euler_characteristic(cs, norm, v));
                r.nonempty.push_back(top > v * norm * coherent_amplitude(k));
            }
            return r;
        },
        [&](std::size_t, Row r) {
            ++st.n;
            if (!r.ok) {
                ++st.skipped;
                return;
            }
            if (!r.low_ok) ++st.low_level_failures;
            for (std::size_t j = 0; j < u.size(); ++j) {
                chis[j].push_back(r.chi[j]);
                if (r.nonempty[j]) {
                    ++st.nonempty[j];
                    if (r.chi[j] != 1) ++st.contractibility_violations[j];
                }
            }
        });
    for (auto& c : chis) st.chi.push_back(summarize(c));
    return st;
}

SupStudy sup_study(const EnsembleSpec& spec, std::size_t n, const McOptions& mc) {
    if (spec.m != 1) throw LabError(ErrorKind::DomainError, "sup statistics are implemented on CP^1 only");
    std::vector<double> sup(n), sup2(n);
    SupStudy st;
    double bound = coherent_amplitude(spec.k);
    ordered_map<std::pair<double, double>>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            Section s = sample(spec, rng);
            return std::make_pair(sup_hnorm(s), s.coeff_norm());
        },
        [&](std::size_t i, std::pair<double, double> r) {
            sup[i] = r.first;
            sup2[i] = r.first * r.first;
            st.max_ratio = std::max(st.max_ratio, r.first / (bound * r.second));
        });
    st.sup = summarize(sup);
    st.sup2 = summarize(sup2);
    return st;
}

}  // namespace sklab
