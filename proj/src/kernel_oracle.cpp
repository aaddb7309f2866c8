#include "sklab/kernel_oracle.hpp"

#include <cmath>

#include "sklab/test_function.hpp"

namespace sklab {

QuadratureKernel::QuadratureKernel(int k) : k_(k) {
    if (k < 0) throw LabError(ErrorKind::DomainError, "k must be >= 0");
    // Integrands are polynomials of degree 2k on the sphere; n nodes are exact below degree 2n.
    const int n = k + 2;
    QuadratureRule rule = gauss_legendre(n);
    const int np = 2 * n + 2;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(k + 1, k + 1);
    for (int i = 0; i < n; ++i) {
        double ct = rule.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < np; ++j) {
            double phi = 2.0 * kPi * (j + 0.5) / np;
            Eigen::VectorXcd v = frame(FSPoint::from_unit_vector({st * std::cos(phi), st * std::sin(phi), ct}));
            gram += (rule.w[i] * (2.0 * kPi / np) * 0.25) * (v * v.adjoint());
        }
    }
    gram_inv_ = gram.inverse();
}

Eigen::VectorXcd QuadratureKernel::frame(const FSPoint& z) const {
    auto h = z.homogeneous();
    double nrm = std::sqrt(std::norm(h[0]) + std::norm(h[1]));
    cdouble z0 = h[0] / nrm, z1 = h[1] / nrm;
    Eigen::VectorXcd v(k_ + 1);
    for (int j = 0; j <= k_; ++j) v(j) = std::pow(z0, k_ - j) * std::pow(z1, j);
    return v;
}

cdouble QuadratureKernel::kernel(const FSPoint& z, const FSPoint& w) const {
    Eigen::VectorXcd a = frame(z), b = frame(w);
    return (a.transpose() * gram_inv_.transpose() * b.conjugate())(0, 0);
}

double QuadratureKernel::diagonal(const FSPoint& z) const { return std::abs(kernel(z, z)); }

double QuadratureKernel::normalized(const FSPoint& z, const FSPoint& w) const {
    return std::abs(kernel(z, w)) / std::sqrt(diagonal(z) * diagonal(w));
}

}  // namespace sklab
