#include "sklab/ensembles.hpp"

#include <cmath>
#include <string>

#include "sklab/special.hpp"

namespace sklab {

long long EnsembleSpec::dimension() const { return std::llround(std::exp(log_binomial(k + m, m))); }

namespace {

void enumerate(int m, int budget, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (int(current.size()) == m) {
        out.push_back(current);
        return;
    }
    for (int a = 0; a <= budget; ++a) {
        current.push_back(a);
        enumerate(m, budget - a, current, out);
        current.pop_back();
    }
}

}  // namespace

BasisWeights orthonormal_weights(int m, int k) {
    if (m < 1 || k < 0) throw LabError(ErrorKind::DomainError, "orthonormal_weights needs m >= 1, k >= 0");
    BasisWeights b{m, k, {}, {}};
    std::vector<int> cur;
    enumerate(m, k, cur, b.exponents);
    double head = log_factorial(k + m) - m * std::log(kPi);
    for (const auto& alpha : b.exponents) {
        int total = 0;
        double lg = head;
        for (int a : alpha) {
            lg -= log_factorial(a);
            total += a;
        }
        lg -= log_factorial(k - total);
        b.w.push_back(std::exp(0.5 * lg));
    }
    return b;
}

const std::vector<double>& weights_cp1(int k) {
    thread_local std::vector<std::vector<double>> cache;
    if (k < 0 || k > Section::kMaxDegree) throw LabError(ErrorKind::DomainError, "degree out of range");
    if (int(cache.size()) <= k) cache.resize(k + 1);
    auto& w = cache[k];
    if (w.empty()) {
        w.resize(k + 1);
        double head = std::log(k + 1.0) - std::log(kPi);
        for (int j = 0; j <= k; ++j) w[j] = std::exp(0.5 * (head + log_binomial(k, j)));
    }
    return w;
}

Section::Section(int k, std::vector<cdouble> coeffs) : k_(k), c_(std::move(coeffs)) {
    if (k < 1 || k > kMaxDegree) throw LabError(ErrorKind::DomainError, "section degree must lie in [1, 1000]");
    if (int(c_.size()) != k + 1) throw LabError(ErrorKind::DomainError, "coefficient vector must have length k+1");
    const auto& w = weights_cp1(k);
    a_.resize(k + 1);
    for (int j = 0; j <= k; ++j) a_[j] = c_[j] * w[j];
}

double Section::coeff_norm() const {
    double s = 0.0;
    for (auto c : c_) s += std::norm(c);
    return std::sqrt(s);
}

SectionValue Section::eval(const FSPoint& z) const {
    cdouble x = z.coord;
    cdouble p = 0.0, d = 0.0;
    if (z.chart == Chart::affine) {
        for (int j = k_; j >= 0; --j) {
            d = d * x + p;
            p = p * x + a_[j];
        }
    } else {
        for (int j = 0; j <= k_; ++j) {
            d = d * x + p;
            p = p * x + a_[j];
        }
    }
    double h = 0.0;
    if (p != 0.0) h = std::exp(std::log(std::abs(p)) - 0.5 * k_ * std::log1p(std::norm(x)));
    return {p, d, h};
}

Section Section::chart_swapped() const { return Section(k_, std::vector<cdouble>(c_.rbegin(), c_.rend())); }

Section sample(const EnsembleSpec& spec, Rng& rng) {
    if (spec.m != 1) throw LabError(ErrorKind::DomainError, "sections are sampled on CP^1 only");
    ComplexGaussian gauss;
    std::vector<cdouble> c(spec.k + 1);
    for (auto& x : c) x = gauss(rng);
    if (spec.kind == EnsembleKind::spherical) {
        double s = 0.0;
        for (auto x : c) s += std::norm(x);
        double inv = 1.0 / std::sqrt(s);
        for (auto& x : c) x *= inv;
    }
    return Section(spec.k, std::move(c));
}

Section coherent_state(int k, const FSPoint& z0) {
    const auto& w = weights_cp1(k);
    std::vector<cdouble> c(k + 1);
    cdouble x = z0.coord;
    double s = 0.0;
    std::vector<cdouble> pw(k + 1, 1.0);
    for (int j = 1; j <= k; ++j) pw[j] = pw[j - 1] * x;
    for (int j = 0; j <= k; ++j) {
        int e = (z0.chart == Chart::affine) ? j : k - j;
        c[j] = std::conj(w[j] * pw[e]);
        s += std::norm(c[j]);
    }
    double inv = 1.0 / std::sqrt(s);
    for (auto& v : c) v *= inv;
    return Section(k, std::move(c));
}

}  // namespace sklab
