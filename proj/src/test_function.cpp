#include "sklab/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sklab {

double real_spherical_harmonic(int l, int m, const Vec3& n) {
    double ct = std::clamp(n[2], -1.0, 1.0);
    double theta = std::acos(ct);
    if (m == 0) return std::sph_legendre(unsigned(l), 0u, theta);
    double phi = std::atan2(n[1], n[0]);
    double base = std::sqrt(2.0) * std::sph_legendre(unsigned(l), unsigned(std::abs(m)), theta);
    return m > 0 ? base * std::cos(m * phi) : base * std::sin(-m * phi);
}

TestFunction TestFunction::harmonic(int l, int m, double scale) {
    if (l < 0 || std::abs(m) > l) throw LabError(ErrorKind::DomainError, "invalid spherical harmonic index");
    TestFunction f;
    f.terms_.push_back({l, m, scale});
    return f;
}

TestFunction TestFunction::constant(double value) {
    TestFunction f;
    f.terms_.push_back({0, 0, value * std::sqrt(4.0 * kPi)});
    return f;
}

TestFunction TestFunction::from_samples(int max_degree, const std::function<double(const Vec3&)>& g) {
    if (max_degree < 0) throw LabError(ErrorKind::DomainError, "max_degree must be >= 0");
    int nt = max_degree + 8;
    int np = 2 * nt;
    QuadratureRule rule = gauss_legendre(nt);
    std::vector<Vec3> nodes;
    std::vector<double> weights, values;
    for (int i = 0; i < nt; ++i) {
        double ct = rule.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < np; ++j) {
            double phi = 2.0 * kPi * (j + 0.5) / np;
            Vec3 n{st * std::cos(phi), st * std::sin(phi), ct};
            nodes.push_back(n);
            weights.push_back(rule.w[i] * 2.0 * kPi / np);
            values.push_back(g(n));
        }
    }
    TestFunction f;
    f.kind_ = TestFunctionKind::grid_sampled;
    for (int l = 0; l <= max_degree; ++l) {
        for (int m = -l; m <= l; ++m) {
            double c = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q)
                c += weights[q] * values[q] * real_spherical_harmonic(l, m, nodes[q]);
            if (std::abs(c) > 1e-14) f.terms_.push_back({l, m, c});
        }
    }
    return f;
}

int TestFunction::max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.l);
    return d;
}

std::string TestFunction::describe() const {
    if (kind_ == TestFunctionKind::spherical_harmonic && terms_.size() == 1) {
        std::ostringstream os;
        os << "Y" << terms_[0].l << "_" << terms_[0].m;
        if (terms_[0].coeff != 1.0) os << "*" << terms_[0].coeff;
        return os.str();
    }
    std::ostringstream os;
    os << "grid(L=" << max_degree() << ")";
    return os.str();
}

TestFunction TestFunction::scaled(double s) const {
    TestFunction f = *this;
    for (auto& t : f.terms_) t.coeff *= s;
    return f;
}

double TestFunction::operator()(const Vec3& n) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * real_spherical_harmonic(t.l, t.m, n);
    return v;
}

std::array<Vec3, 2> tangent_frame(const Vec3& n) {
    Vec3 a = std::abs(n[2]) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    Vec3 e1 = normalized(cross(a, n));
    Vec3 e2 = cross(n, e1);
    return {e1, e2};
}

Vec3 sphere_exp(const Vec3& n, const std::array<Vec3, 2>& frame, double r, double psi) {
    double c = std::cos(r), s = std::sin(r);
    double cp = std::cos(psi), sp = std::sin(psi);
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = c * n[i] + s * (cp * frame[0][i] + sp * frame[1][i]);
    return out;
}

double TestFunction::laplacian(const Vec3& n) const {
    // Normal coordinates kill the first-order terms, so the flat stencil gives the round Laplacian.
    constexpr double h = 2e-3;
    auto frame = tangent_frame(n);
    double f0 = (*this)(n);
    double total = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
        double psi = dir * 0.5 * kPi;
        double fp1 = (*this)(sphere_exp(n, frame, h, psi));
        double fm1 = (*this)(sphere_exp(n, frame, h, psi + kPi));
        double fp2 = (*this)(sphere_exp(n, frame, 2 * h, psi));
        double fm2 = (*this)(sphere_exp(n, frame, 2 * h, psi + kPi));
        total += (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    // omega_h is the round sphere of radius 1/2.
    return 4.0 * total;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    static thread_local std::map<int, QuadratureRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        QuadratureRule r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 1.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
            }
            r.x[i] = -x;
            r.x[n - 1 - i] = x;
            r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        it = cache.emplace(n, std::move(r)).first;
    }
    QuadratureRule out = it->second;
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        out.x[i] = mid + half * out.x[i];
        out.w[i] *= half;
    }
    return out;
}

double integrate_fs(const std::function<double(const Vec3&)>& g, int n) {
    QuadratureRule rule = gauss_legendre(n);
    int np = 2 * n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double ct = rule.x[i], st = std::sqrt(1.0 - ct * ct);
        double ring = 0.0;
        for (int j = 0; j < np; ++j) {
            double phi = 2.0 * kPi * (j + 0.5) / np;
            ring += g({st * std::cos(phi), st * std::sin(phi), ct});
        }
        total += rule.w[i] * ring * (2.0 * kPi / np);
    }
    return 0.25 * total;
}

}  // namespace sklab
