#include "sklab/metric_flow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "sklab/special.hpp"

namespace sklab {

namespace {

constexpr double kMaxStepNorm = 1.0;
// Default cap on E |sigma sqrt(dt) H|_F^2 per step.
constexpr double kStepBudget = 0.25;

// Largest budget b with P(|step|_F > 1) <= 1e-15, where |step|_F^2 ~ (b / n) chi^2_n.
double step_budget(int n) {
    boost::math::chi_squared chi(n);
    double q = boost::math::quantile(boost::math::complement(chi, 1e-15));
    return std::min(kStepBudget, double(n) / q);
}

// exp(X) A for traceless Hermitian X.
CMatrix hermitian_exp_apply(const CMatrix& x, const CMatrix& a) {
    if (x.rows() == 2) {
        double d = x(0, 0).real();
        double mu = std::sqrt(d * d + std::norm(x(0, 1)));
        double c = std::cosh(mu);
        double s = mu > 1e-300 ? std::sinh(mu) / mu : 1.0;
        CMatrix e = s * x;
        e(0, 0) += c;
        e(1, 1) += c;
        return e * a;
    }
    // Degree-15 Taylor polynomial in Paterson-Stockmeyer form; exact to rounding for |X|_F <= 1/2.
    int squarings = 0;
    for (double r = x.norm(); r > 0.5; r *= 0.5) ++squarings;
    if (squarings > 0) {
        CMatrix e = hermitian_exp_apply(x / std::ldexp(1.0, squarings), CMatrix::Identity(x.rows(), x.rows()));
        for (int i = 0; i < squarings; ++i) e = (e * e).eval();
        return e * a;
    }
    const int d = int(x.rows());
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix x2 = x * x;
    CMatrix x3 = x2 * x;
    CMatrix x4 = x2 * x2;
    double c[16];
    c[0] = 1.0;
    for (int j = 1; j < 16; ++j) c[j] = c[j - 1] / double(j);
    auto block = [&](int m) { return (c[4 * m] * id + c[4 * m + 1] * x + c[4 * m + 2] * x2 + c[4 * m + 3] * x3).eval(); };
    CMatrix e = block(3);
    for (int m = 2; m >= 0; --m) e = block(m) + x4 * e;
    return e * a;
}


// Unit vector e with e_j proportional to sqrt(C(k, j)) Z0^{k-j} Z1^j.
Eigen::VectorXcd kernel_vector(const FSPoint& z, int k) {
    auto h = z.homogeneous();
    double n = std::sqrt(std::norm(h[0]) + std::norm(h[1]));
    cdouble z0 = h[0] / n, z1 = h[1] / n;
    Eigen::VectorXcd e(k + 1);
    for (int j = 0; j <= k; ++j) {
        double c = std::exp(0.5 * log_binomial(k, j));
        e(j) = c * std::pow(z0, k - j) * std::pow(z1, j);
    }
    return e / e.norm();
}

double quad_form(const CMatrix& p, const Eigen::VectorXcd& e) { return std::real(e.dot(p * e)); }

// e^* A^* A e without forming P, whose condition number outgrows double precision at large t.
double factor_quad_form(const CMatrix& a, const Eigen::VectorXcd& e) { return (a * e).squaredNorm(); }

Eigen::VectorXd log_singular_values(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues().array().log();
}

FSPoint antipode(const FSPoint& z) {
    Vec3 n = z.unit_vector();
    return FSPoint::from_unit_vector({-n[0], -n[1], -n[2]});
}

}  // namespace

PositiveHermitian PositiveHermitian::identity(int d) {
    return {CMatrix::Identity(d, d), CMatrix::Identity(d, d)};
}

double PositiveHermitian::hermitian_error() const { return (p - p.adjoint()).norm(); }

// Spectral quantities come from the singular values of the factor A.
double PositiveHermitian::min_eigenvalue() const { return std::exp(2.0 * log_singular_values(a).minCoeff()); }

double PositiveHermitian::det_error() const { return std::abs(std::expm1(2.0 * log_singular_values(a).sum())); }

double PositiveHermitian::distance2_from_identity() const { return 4.0 * log_singular_values(a).squaredNorm(); }

double FlowConfig::effective_time() const {
    if (rescale == Rescale::mabuchi) return t * double(k) * double(k) * double(dim());
    return t;
}

double FlowConfig::step() const {
    if (dt > 0.0) return dt;
    double te = effective_time();
    double d = dim();
    const int n = int(d * d - 1.0);
    return std::min({te / 200.0, 0.01, step_budget(n) / (kFlowSigma * kFlowSigma * n)});
}

int FlowConfig::steps() const {
    if (effective_time() == 0.0) return 0;
    // Even, so that the coarse extrapolation walk pairs consecutive steps.
    int n = std::max(1, int(std::ceil(effective_time() / step() - 1e-9)));
    return n + (n & 1);
}

void FlowConfig::validate() const {
    if (k < 1) throw LabError(ErrorKind::DomainError, "k must be >= 1");
    if (!(t >= 0.0) || !std::isfinite(t)) throw LabError(ErrorKind::DomainError, "t must be finite and >= 0");
    if (dt < 0.0 || !std::isfinite(dt)) throw LabError(ErrorKind::DomainError, "dt must be finite and >= 0");
}

CMatrix traceless_hermitian_gaussian(int d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix h(d, d);
    double tr = 0.0;
    for (int i = 0; i < d; ++i) {
        double v = g(rng);
        h(i, i) = v;
        tr += v;
    }
    for (int i = 0; i < d; ++i) h(i, i) -= tr / d;
    const double s = std::sqrt(0.5);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            double re = g(rng), im = g(rng);
            h(i, j) = cdouble(re, im) * s;
            h(j, i) = std::conj(h(i, j));
        }
    return h;
}

namespace {

PositiveHermitian finish(CMatrix a) {
    PositiveHermitian out;
    out.p = a.adjoint() * a;
    out.p = 0.5 * (out.p + out.p.adjoint()).eval();
    out.a = std::move(a);
    return out;
}

// Fine walk, and optionally the coarse walk whose steps are sums of consecutive fine steps.
std::pair<PositiveHermitian, PositiveHermitian> walk(const FlowConfig& config, Rng& rng, bool coarse) {
    config.validate();
    const int d = config.dim();
    const int n = config.steps();
    CMatrix a = CMatrix::Identity(d, d), b = a;
    if (n == 0) return {finish(a), finish(b)};
    const double scale = kFlowSigma * std::sqrt(config.effective_time() / n);
    CMatrix pending;
    for (int s = 0; s < n; ++s) {
        CMatrix x = scale * traceless_hermitian_gaussian(d, rng);
        if (x.norm() > kMaxStepNorm) throw LabError(ErrorKind::StepTooLarge, "walk increment exceeds unit Frobenius norm");
        a = hermitian_exp_apply(0.5 * x, a);
        if (coarse) {
            if (s & 1) {
                b = hermitian_exp_apply(0.5 * (pending + x), b);
            } else {
                pending = x;
            }
        }
    }
    return {finish(a), finish(b)};
}

}  // namespace

PositiveHermitian brownian_path(const FlowConfig& config, Rng& rng) { return walk(config, rng, false).first; }

std::pair<PositiveHermitian, PositiveHermitian> brownian_path_pair(const FlowConfig& config, Rng& rng) {
    return walk(config, rng, true);
}

double identity_potential(cdouble z, int k) { return phi_h(z) + std::log((k + 1) / kPi) / (2.0 * k); }

double relative_potential(const CMatrix& p, const FSPoint& z, int k) {
    if (p.rows() != k + 1) throw LabError(ErrorKind::DomainError, "matrix dimension must be k + 1");
    return std::log(quad_form(p, kernel_vector(z, k))) / (2.0 * k);
}

double bergman_potential(const CMatrix& p, cdouble z, int k) {
    return identity_potential(z, k) + relative_potential(p, FSPoint::affine(z), k);
}

double potential_drift(const FlowConfig& config) { return 0.5 * config.effective_time(); }

MeanPotentialResult mean_potential_check(const FlowConfig& config, const std::vector<FSPoint>& grid, std::size_t n,
                                         const McOptions& mc) {
    config.validate();
    if (grid.empty()) throw LabError(ErrorKind::DomainError, "grid must be nonempty");
    if (n < 2) throw LabError(ErrorKind::DomainError, "n must be >= 2");
    std::vector<Eigen::VectorXcd> ev;
    for (const auto& z : grid) ev.push_back(kernel_vector(z, config.k));
    const std::size_t m = grid.size();
    std::vector<std::vector<double>> raw(m, std::vector<double>(n)), rel(m, std::vector<double>(n)),
        con(m, std::vector<double>(n));
    std::vector<double> pooled(n, 0.0);
    const double inv = 1.0 / (2.0 * config.k);
    ordered_map<std::vector<double>>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            auto [fine, coarse] = brownian_path_pair(config, rng);
            std::vector<double> r(2 * m);
            for (std::size_t j = 0; j < m; ++j) {
                r[j] = std::log(factor_quad_form(fine.a, ev[j])) * inv;
                r[m + j] = std::log(factor_quad_form(coarse.a, ev[j])) * inv;
            }
            return r;
        },
        [&](std::size_t i, std::vector<double> r) {
            for (std::size_t j = 0; j < m; ++j) {
                raw[j][i] = r[j];
                rel[j][i] = 2.0 * r[j] - r[m + j];
                con[j][i] = r[j] - r[0];
                pooled[i] += rel[j][i] / double(m);
            }
        });
    MeanPotentialResult out;
    out.drift = potential_drift(config);
    for (std::size_t j = 0; j < m; ++j) {
        out.raw.push_back(summarize(raw[j]));
        out.relative.push_back(summarize(rel[j]));
        out.contrast.push_back(summarize(con[j]));
    }
    out.pooled = summarize(pooled);
    return out;
}

namespace {

// dI_2/dx with 1 - x passed separately so that x near 1 keeps full precision.
double i2_derivative_impl(double t, double x, double omx) {
    const double s1 = std::sqrt(omx);
    const double rt = std::sqrt(t);
    // log cosh(l) + log(c + s1 tanh l) with c = sqrt(1 - x tanh^2 l), weighted by the heat factor.
    auto f = [&](double l) {
        double th = std::tanh(l);
        double q = std::exp(-2.0 * l);
        double sech2 = 4.0 * q / ((1.0 + q) * (1.0 + q));
        double c = std::sqrt(omx + x * sech2);
        double lc = l + std::log1p(q) - std::log(2.0);
        double w = 0.5 * (std::exp(-(l - t) * (l - t) / (2.0 * t)) + std::exp(-(l + t) * (l + t) / (2.0 * t)));
        return w * th / c * 2.0 * (lc + std::log(c + s1 * th));
    };
    const double hi = t + 14.0 * rt + 14.0;
    std::vector<double> cuts{0.0, hi};
    if (t - 6.0 * rt > 0.0) cuts.push_back(t - 6.0 * rt);
    if (t < hi) cuts.push_back(t);
    // Layer near l = log(2 / s1) where c reaches s1.
    double lb = std::log(2.0 / s1);
    if (lb > 0.0 && lb < hi) cuts.push_back(lb);
    std::sort(cuts.begin(), cuts.end());
    double integral = 0.0, err_sum = 0.0, l1_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        double err = 0.0, l1 = 0.0;
        double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-13,
                                                                                &err, &l1);
        integral += v;
        err_sum += err;
        l1_sum += l1;
    }
    // Judge the error by its effect on the derivative, which scales it by s1.
    const double scale = 2.0 * s1 / (x * std::sqrt(2.0 * kPi * t));
    if (!std::isfinite(integral) || scale * err_sum > 1e-10 * std::max(1.0, scale * l1_sum))
        throw LabError(ErrorKind::NotConverged, "heat-kernel quadrature did not converge");
    return 2.0 * t / x - scale * integral;
}

void check_i2_args(double t, double x) {
    if (!(t > 0.0) || !std::isfinite(t)) throw LabError(ErrorKind::DomainError, "t must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw LabError(ErrorKind::DomainError, "x must lie in [0, 1]");
}

constexpr double kI2Split = 0.9;

}  // namespace

double i2_derivative(double t, double x) {
    check_i2_args(t, x);
    if (x == 0.0) x = 1e-9;  // bounded at 0; value there agrees to O(x)
    double omx = std::max(1.0 - x, 1e-300);  // one-sided limit at 1
    return i2_derivative_impl(t, x, omx);
}

double i2_kernel(double t, double x) {
    check_i2_args(t, x);
    if (x == 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, l1 = 0.0, total = 0.0;
    auto fail = [] { throw LabError(ErrorKind::NotConverged, "I_2 quadrature did not converge"); };
    double a = std::min(x, kI2Split);
    total = gauss_kronrod<double, 15>::integrate([&](double y) { return i2_derivative_impl(t, y, 1.0 - y); }, 0.0, a,
                                                 15, 1e-10, &err, &l1);
    if (!std::isfinite(total) || err > 1e-8 * std::max(1.0, l1)) fail();
    if (x > kI2Split) {
        // y = 1 - e^{-u} resolves the layer at y -> 1.
        double u0 = -std::log(1.0 - kI2Split);
        // Beyond u_max the integrand is below 2t e^{-u}, under 1e-14 in total.
        double u_max = std::log(2.0 * t) + 35.0;
        double u1 = x < 1.0 ? std::min(-std::log1p(-x), u_max) : u_max;
        auto g = [&](double u) {
            double omx = std::exp(-u);
            return i2_derivative_impl(t, 1.0 - omx, omx) * omx;
        };
        double v = gauss_kronrod<double, 15>::integrate(g, u0, u1, 15, 1e-10, &err, &l1);
        if (!std::isfinite(v) || err > 1e-8 * std::max(1.0, l1)) fail();
        total += v;
    }
    return total;
}

CovarianceCheck covariance_check(const FlowConfig& config, const FSPoint& z, const FSPoint& w, std::size_t n,
                                 const McOptions& mc) {
    config.validate();
    if (n < 2) throw LabError(ErrorKind::DomainError, "n must be >= 2");
    const int k = config.k;
    Eigen::VectorXcd ez = kernel_vector(z, k), ew = kernel_vector(w, k), ea = kernel_vector(antipode(z), k);
    std::vector<double> a(n), b(n), c(n);
    ordered_map<std::array<double, 3>>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            PositiveHermitian p = brownian_path(config, rng);
            return std::array<double, 3>{std::log(factor_quad_form(p.a, ez)) / (2.0 * k),
                                         std::log(factor_quad_form(p.a, ew)) / (2.0 * k),
                                         std::log(factor_quad_form(p.a, ea)) / (2.0 * k)};
        },
        [&](std::size_t i, std::array<double, 3> r) {
            a[i] = r[0];
            b[i] = r[1];
            c[i] = r[2];
        });
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / double(v.size());
    };
    double ma = mean(a), mb = mean(b), mc_ = mean(c);
    std::vector<double> pab(n), pad(n);
    for (std::size_t i = 0; i < n; ++i) {
        pab[i] = (a[i] - ma) * (b[i] - mb);
        pad[i] = (a[i] - ma) * ((b[i] - mb) - (c[i] - mc_));
    }
    StatSummary sab = summarize(pab), sad = summarize(pad);
    double corr = double(n) / double(n - 1);
    CovarianceCheck out;
    out.n = n;
    out.beta = std::pow(berezin_base(z, w), k);
    out.predicted = i2_kernel(config.effective_time(), out.beta) / (4.0 * double(k) * double(k));
    out.empirical = sab.mean * corr;
    out.empirical_se = sab.se_mean;
    out.anchored = sad.mean * corr;
    out.anchored_se = sad.se_mean;
    out.ratio = out.empirical / out.predicted;
    out.anchored_ratio = out.anchored / out.predicted;
    return out;
}

double h3_radial_density(double t, double delta) {
    if (!(t > 0.0)) throw LabError(ErrorKind::DomainError, "t must be positive");
    if (delta <= 0.0) return 0.0;
    const double s = 0.5 * t;
    const double rho = delta / std::sqrt(2.0);
    // log of 4 pi rho sinh(rho) (4 pi s)^{-3/2} e^{-s - rho^2 / 4s}
    double ls = rho + std::log1p(-std::exp(-2.0 * rho)) - std::log(2.0);
    double lf = std::log(4.0 * kPi * rho) + ls - 1.5 * std::log(4.0 * kPi * s) - s - rho * rho / (4.0 * s);
    return std::exp(lf) / std::sqrt(2.0);
}

double h3_radial_cdf(double t, double delta) {
    if (delta <= 0.0) return 0.0;
    auto f = [&](double x) { return h3_radial_density(t, x); };
    // Mass beyond the mode plus 20 sd is negligible.
    const double mode = std::sqrt(2.0) * (t + 20.0 * std::sqrt(t) + 20.0);
    double b = std::min(delta, mode);
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, b, 20, 1e-12, &err);
    return std::clamp(v, 0.0, 1.0);
}

std::vector<double> path_distances(const FlowConfig& config, std::size_t n, const McOptions& mc) {
    config.validate();
    std::vector<double> out(n);
    ordered_map<double>(
        n, mc.workers,
        [&](std::size_t i) {
            Rng rng = replicate_rng(mc.seed, i);
            return brownian_path(config, rng).distance2_from_identity();
        },
        [&](std::size_t i, double v) { out[i] = v; });
    return out;
}

}  // namespace sklab
