#pragma once

#include <span>
#include <vector>

#include "sklab/fs_geometry.hpp"
#include "sklab/rng.hpp"

namespace sklab {

enum class EnsembleKind { gaussian, spherical };

struct EnsembleSpec {
    int m = 1;
    int k = 1;
    EnsembleKind kind = EnsembleKind::gaussian;

    long long dimension() const;  // d_k = C(k+m, m)
};

// Monomial weights: S_alpha = w_alpha z^alpha is orthonormal.
struct BasisWeights {
    int m = 1;
    int k = 1;
    std::vector<std::vector<int>> exponents;  // multi-index per basis element (m = 1: {j})
    std::vector<double> w;
};

BasisWeights orthonormal_weights(int m, int k);
// m = 1 shortcut, w_j for j = 0..k.
const std::vector<double>& weights_cp1(int k);

struct SectionValue {
    cdouble f;
    cdouble f_prime;
    double hnorm;
};

// Holomorphic section of O(k) on CP^1, stored by its orthonormal coordinates.
class Section {
public:
    static constexpr int kMaxDegree = 1000;

    Section(int k, std::vector<cdouble> coeffs);

    int degree() const { return k_; }
    std::span<const cdouble> coeffs() const { return c_; }
    // a_j = c_j w_j: monomial coefficients in the affine chart.
    std::span<const cdouble> monomial() const { return a_; }
    double coeff_norm() const;

    SectionValue eval(const FSPoint& z) const;
    double hnorm(const FSPoint& z) const { return eval(z).hnorm; }
    // Same section written in the other chart (coefficient reversal).
    Section chart_swapped() const;

private:
    int k_;
    std::vector<cdouble> c_;
    std::vector<cdouble> a_;
};

Section sample(const EnsembleSpec& spec, Rng& rng);
// Section with c aligned to the kernel vector at z0, unit norm.
Section coherent_state(int k, const FSPoint& z0);

}  // namespace sklab
