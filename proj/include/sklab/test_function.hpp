#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sklab/fs_geometry.hpp"

namespace sklab {

// Orthonormal real spherical harmonic on the unit sphere (integral of Y^2 dS = 1).
double real_spherical_harmonic(int l, int m, const Vec3& n);

struct HarmonicTerm {
    int l;
    int m;
    double coeff;
};

enum class TestFunctionKind { spherical_harmonic, grid_sampled };

// Smooth function on CP^1, held as a finite real spherical-harmonic expansion.
class TestFunction {
public:
    static TestFunction harmonic(int l, int m, double scale = 1.0);
    static TestFunction constant(double value);
    // Samples f on a product grid and keeps its projection onto degrees <= max_degree.
    static TestFunction from_samples(int max_degree, const std::function<double(const Vec3&)>& f);

    TestFunctionKind kind() const { return kind_; }
    const std::vector<HarmonicTerm>& terms() const { return terms_; }
    int max_degree() const;
    std::string describe() const;
    TestFunction scaled(double s) const;

    double operator()(const Vec3& n) const;
    double operator()(const FSPoint& p) const { return (*this)(p.unit_vector()); }
    // FS Laplacian (1+|z|^2)^2 (d_x^2 + d_y^2), by a fourth-order stencil in normal coordinates.
    double laplacian(const Vec3& n) const;
    double laplacian(const FSPoint& p) const { return laplacian(p.unit_vector()); }

private:
    TestFunctionKind kind_ = TestFunctionKind::spherical_harmonic;
    std::vector<HarmonicTerm> terms_;
};

// Orthonormal tangent frame at a unit vector.
std::array<Vec3, 2> tangent_frame(const Vec3& n);
// Point at round angle r from n in tangent direction cos(psi) e1 + sin(psi) e2.
Vec3 sphere_exp(const Vec3& n, const std::array<Vec3, 2>& frame, double r, double psi);

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule with n nodes on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Integral of g over CP^1 against omega_h (total mass pi), exact for band-limited g of degree < 2n.
double integrate_fs(const std::function<double(const Vec3&)>& g, int n);

}  // namespace sklab
