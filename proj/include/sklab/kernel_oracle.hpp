#pragma once

#include <Eigen/Dense>

#include "sklab/fs_geometry.hpp"

namespace sklab {

// Bergman kernel of O(k) on CP^1 built from the monomial Gram matrix, computed by quadrature over CP^1.
class QuadratureKernel {
public:
    explicit QuadratureKernel(int k);
    int degree() const { return k_; }
    // B_k(z, w) in the unit-normalized homogeneous frame.
    cdouble kernel(const FSPoint& z, const FSPoint& w) const;
    // |B_k(z, z)|_h, constant (k+1)/pi.
    double diagonal(const FSPoint& z) const;
    double normalized(const FSPoint& z, const FSPoint& w) const;

private:
    Eigen::VectorXcd frame(const FSPoint& z) const;
    int k_;
    Eigen::MatrixXcd gram_inv_;
};

}  // namespace sklab
