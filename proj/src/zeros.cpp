#include "sklab/zeros.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sklab/log.hpp"
#include "sklab/simd.hpp"

namespace sklab {

int ZeroSet::total_multiplicity() const {
    int t = 0;
    for (const auto& p : points) t += p.multiplicity;
    return t;
}

std::vector<Vec3> ZeroSet::unit_vectors() const {
    std::vector<Vec3> out;
    out.reserve(k);
    for (const auto& p : points) {
        Vec3 n = p.point.unit_vector();
        for (int i = 0; i < p.multiplicity; ++i) out.push_back(n);
    }
    return out;
}

namespace {

// Polynomial with unit max coefficient, evaluated in whichever chart keeps |.| <= 1.
class ChartedPoly {
public:
    explicit ChartedPoly(const std::vector<cdouble>& b) : n_(b.size() - 1), K_(simd::active_kernels()) {
        fr_.resize(n_ + 1);
        fi_.resize(n_ + 1);
        rr_.resize(n_ + 1);
        ri_.resize(n_ + 1);
        for (std::size_t j = 0; j <= n_; ++j) {
            fr_[j] = rr_[n_ - j] = b[j].real();
            fi_[j] = ri_[n_ - j] = b[j].imag();
        }
    }

    std::size_t degree() const { return n_; }

    // Newton ratio p/p' in z, and |p| scaled by (1 + |.|)^-n in the stable chart, for roots[idx].
    void evaluate(const std::vector<cdouble>& roots, const std::vector<std::size_t>& idx, std::vector<cdouble>& ratio,
                  std::vector<double>* residual) {
        inner_.clear();
        outer_.clear();
        for (std::size_t i : idx) (std::norm(roots[i]) <= 1.0 ? inner_ : outer_).push_back(i);
        run(roots, inner_, false, ratio, residual);
        run(roots, outer_, true, ratio, residual);
    }

private:
    void run(const std::vector<cdouble>& roots, const std::vector<std::size_t>& idx, bool reversed,
             std::vector<cdouble>& ratio, std::vector<double>* residual) {
        std::size_t m = idx.size();
        if (m == 0) return;
        for (auto* v : {&gr_, &gi_, &pr_, &pi_, &dr_, &di_})
            if (v->size() < m) v->resize(m);
        for (std::size_t t = 0; t < m; ++t) {
            cdouble z = roots[idx[t]];
            if (reversed) z = 1.0 / z;
            gr_[t] = z.real();
            gi_[t] = z.imag();
        }
        simd::PolyView poly = reversed ? simd::PolyView{rr_.data(), ri_.data(), int(n_)}
                                       : simd::PolyView{fr_.data(), fi_.data(), int(n_)};
        K_.horner(poly, gr_.data(), gi_.data(), m, pr_.data(), pi_.data(), dr_.data(), di_.data());
        for (std::size_t t = 0; t < m; ++t) {
            cdouble p(pr_[t], pi_[t]), d(dr_[t], di_[t]), w(gr_[t], gi_[t]);
            cdouble r;
            if (p == 0.0) {
                r = 0.0;
            } else if (!reversed) {
                r = p / d;
            } else {
                // p'/p in z equals w (n - w q'/q) with w = 1/z.
                r = 1.0 / (w * (double(n_) - w * d / p));
            }
            ratio[idx[t]] = r;
            if (residual) (*residual)[idx[t]] = std::abs(p) * std::exp(-double(n_) * std::log1p(std::abs(w)));
        }
    }

    std::size_t n_;
    const simd::KernelTable& K_;
    std::vector<double> fr_, fi_, rr_, ri_;
    std::vector<double> gr_, gi_, pr_, pi_, dr_, di_;
    std::vector<std::size_t> inner_, outer_;
};

std::vector<cdouble> fibonacci_start(std::size_t n) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<cdouble> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double h = 1.0 - (2.0 * i + 1.0) / double(n);
        double s = std::sqrt(std::max(0.0, 1.0 - h * h));
        double phi = golden * double(i) + 0.3;
        // Inverse stereographic projection from the south pole.
        z[i] = std::polar(s / (1.0 + h), phi);
    }
    return z;
}

// Aberth-Ehrlich iteration, Gauss-Seidel in the pair sums; roots freeze individually.
bool aberth(ChartedPoly& poly, int max_sweeps, std::vector<cdouble>& roots) {
    const auto& K = simd::active_kernels();
    std::size_t n = poly.degree();
    roots = fibonacci_start(n);
    std::vector<double> zr(n), zi(n);
    for (std::size_t i = 0; i < n; ++i) {
        zr[i] = roots[i].real();
        zi[i] = roots[i].imag();
    }
    std::vector<std::size_t> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = i;
    std::vector<cdouble> ratio(n);
    std::vector<std::size_t> still;
    for (int sweep = 0; sweep < max_sweeps && !active.empty(); ++sweep) {
        poly.evaluate(roots, active, ratio, nullptr);
        still.clear();
        for (std::size_t i : active) {
            cdouble N = ratio[i];
            if (N == 0.0) continue;
            double sr, si;
            K.pair_sum(zr.data(), zi.data(), n, i, &sr, &si);
            cdouble step = N / (1.0 - N * cdouble(sr, si));
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
            cdouble z = roots[i] - step;
            roots[i] = z;
            zr[i] = z.real();
            zi[i] = z.imag();
            if (std::norm(step) >= 1e-24 * (1.0 + std::norm(z)) * (1.0 + std::norm(z))) still.push_back(i);
        }
        active.swap(still);
    }
    return active.empty();
}

// One guarded Newton step per root; returns the worst scaled residual.
double polish(ChartedPoly& poly, std::vector<cdouble>& roots) {
    std::size_t n = roots.size();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::vector<cdouble> ratio(n), ratio2(n);
    std::vector<double> res(n), res2(n);
    poly.evaluate(roots, all, ratio, &res);
    std::vector<cdouble> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = roots[i] - ratio[i];
    poly.evaluate(cand, all, ratio2, &res2);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        bool finite = std::isfinite(cand[i].real()) && std::isfinite(cand[i].imag());
        if (finite && res2[i] < res[i]) {
            roots[i] = cand[i];
            res[i] = res2[i];
        }
        worst = std::max(worst, std::isfinite(res[i]) ? res[i] : HUGE_VAL);
    }
    return worst;
}

void balance(Eigen::MatrixXcd& A) {
    const double radix = 2.0;
    Eigen::Index n = A.rows();
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(A(j, i).real()) + std::abs(A(j, i).imag());
                r += std::abs(A(i, j).real()) + std::abs(A(i, j).imag());
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0, s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                A.row(i) /= f;
                A.col(i) *= f;
            }
        }
    }
}

std::vector<cdouble> companion_roots(const std::vector<cdouble>& b) {
    int n = int(b.size()) - 1;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -b[i] / b[n];
    balance(C);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cdouble> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

FSPoint to_point(cdouble z) {
    if (std::abs(z) <= 1.0) return FSPoint::affine(z);
    return FSPoint::at_infinity_chart(1.0 / z);
}

int count_clusters(const std::vector<ZeroPoint>& pts) {
    std::vector<Vec3> v;
    for (const auto& p : pts)
        if (p.multiplicity == 1) v.push_back(p.point.unit_vector());
    std::sort(v.begin(), v.end(), [](const Vec3& a, const Vec3& b) { return a[2] < b[2]; });
    // FS distance 1e-7 is a round angle of 2e-7.
    const double angle = 2e-7;
    int clusters = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size() && v[j][2] - v[i][2] <= angle; ++j)
            if (round_angle(v[i], v[j]) < angle) ++clusters;
    }
    return clusters;
}

}  // namespace

ZeroSet polynomial_zeros(std::span<const cdouble> a, double drop_tol, const RootOptions& opt) {
    int k = int(a.size()) - 1;
    if (k < 0) throw LabError(ErrorKind::DomainError, "empty coefficient vector");
    double norm2 = 0.0;
    for (auto c : a) norm2 += std::norm(c);
    if (norm2 == 0.0) throw LabError(ErrorKind::ZeroSection, "all coefficients vanish");
    double tol = drop_tol >= 0.0 ? drop_tol : 1e-13 * std::sqrt(norm2);

    int hi = k;
    while (hi > 0 && std::abs(a[hi]) <= tol) --hi;
    int lo = 0;
    while (lo < hi && std::abs(a[lo]) <= tol) ++lo;

    ZeroSet zs;
    zs.k = k;
    if (lo > 0) zs.points.push_back({FSPoint::affine(0.0), lo});
    if (k - hi > 0) zs.points.push_back({FSPoint::infinity(), k - hi});

    std::vector<cdouble> b(a.begin() + lo, a.begin() + hi + 1);
    int n = hi - lo;
    // Unit max coefficient keeps p and p' far from overflow on |z| <= 1.
    double bmax = 0.0;
    for (auto c : b) bmax = std::max(bmax, std::abs(c));
    for (auto& c : b) c /= bmax;
    std::vector<cdouble> roots;
    if (n == 1) {
        roots.push_back(-b[0] / b[1]);
    } else if (n >= 2) {
        ChartedPoly poly(b);
        bool ok = false;
        if (opt.method == RootMethod::aberth) {
            ok = aberth(poly, opt.max_sweeps, roots) && polish(poly, roots) <= 1e-8;
            if (!ok) log_message(LogLevel::debug, "aberth did not converge; using companion eigenvalues");
        }
        if (!ok) {
            roots = companion_roots(b);
            for (int pass = 0; pass < 3; ++pass) polish(poly, roots);
        }
    }
    for (auto z : roots) zs.points.push_back({to_point(z), 1});

    zs.suspected_clusters = count_clusters(zs.points);
    if (zs.suspected_clusters > 0)
        log_message(LogLevel::warn, "roots closer than 1e-7 in FS distance: " + std::to_string(zs.suspected_clusters));
    return zs;
}

ZeroSet find_zeros(const Section& section, const RootOptions& opt) {
    double cn = section.coeff_norm();
    if (cn == 0.0) throw LabError(ErrorKind::ZeroSection, "all coefficients vanish");
    return polynomial_zeros(section.monomial(), 1e-13 * cn, opt);
}

int count_in_region(const ZeroSet& zs, const Region& region) {
    int c = 0;
    for (const auto& p : zs.points)
        if (region.contains(p.point.unit_vector())) c += p.multiplicity;
    return c;
}

double linear_statistic(const ZeroSet& zs, const TestFunction& f) {
    double s = 0.0;
    for (const auto& p : zs.points) s += p.multiplicity * f(p.point.unit_vector());
    return s;
}

}  // namespace sklab
