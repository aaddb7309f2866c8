#include "sklab/fs_geometry.hpp"

#include <cmath>
#include <string>

#include "sklab/special.hpp"

namespace sklab {

FSPoint FSPoint::from_unit_vector(const Vec3& n) {
    if (n[2] >= 0.0) return affine(cdouble(n[0], n[1]) / (1.0 + n[2]));
    return at_infinity_chart(cdouble(n[0], -n[1]) / (1.0 - n[2]));
}

FSPoint FSPoint::in_chart(Chart c) const {
    if (c == chart) return *this;
    if (coord == 0.0) throw LabError(ErrorKind::DomainError, "point is the origin of the other chart");
    return {c, 1.0 / coord};
}

FSPoint FSPoint::canonical() const {
    if (std::abs(coord) <= 1.0) return *this;
    return {chart == Chart::affine ? Chart::infinity : Chart::affine, 1.0 / coord};
}

std::array<cdouble, 2> FSPoint::homogeneous() const {
    if (chart == Chart::affine) return {1.0, coord};
    return {coord, 1.0};
}

Vec3 FSPoint::unit_vector() const {
    double r2 = std::norm(coord);
    double s = 1.0 / (1.0 + r2);
    if (chart == Chart::affine) return {2.0 * coord.real() * s, 2.0 * coord.imag() * s, (1.0 - r2) * s};
    return {2.0 * coord.real() * s, -2.0 * coord.imag() * s, (r2 - 1.0) * s};
}

namespace {

struct Overlap {
    double inner2;  // |<Z,W>|^2
    double wedge2;  // |Z ^ W|^2
    double scale;   // |Z|^2 |W|^2
};

Overlap overlap(const FSPoint& a, const FSPoint& b) {
    auto z = a.homogeneous();
    auto w = b.homogeneous();
    cdouble inner = z[0] * std::conj(w[0]) + z[1] * std::conj(w[1]);
    cdouble wedge = z[0] * w[1] - z[1] * w[0];
    double scale = (std::norm(z[0]) + std::norm(z[1])) * (std::norm(w[0]) + std::norm(w[1]));
    return {std::norm(inner), std::norm(wedge), scale};
}

double power_of_base(double base, double gap, double exponent) {
    if (gap == 0.0) return 1.0;
    if (base == 0.0) return 0.0;
    if (gap < 0.5) return std::exp(exponent * std::log1p(-gap));
    return std::exp(exponent * std::log(base));
}

}  // namespace

double fs_distance(const FSPoint& a, const FSPoint& b) {
    Overlap o = overlap(a, b);
    return std::atan2(std::sqrt(o.wedge2), std::sqrt(o.inner2));
}

double berezin_base(const FSPoint& a, const FSPoint& b) {
    Overlap o = overlap(a, b);
    return o.inner2 / o.scale;
}

double berezin_gap(const FSPoint& a, const FSPoint& b) {
    Overlap o = overlap(a, b);
    return o.wedge2 / o.scale;
}

double phi_h(cdouble z) { return 0.5 * std::log1p(std::norm(z)); }

double bergman_diagonal(const KernelModel& model) {
    if (model.m < 1 || model.k < 0)
        throw LabError(ErrorKind::DomainError, "bergman_diagonal needs m >= 1 and k >= 0");
    double lg = log_factorial(model.k + model.m) - log_factorial(model.k) - model.m * std::log(kPi);
    return std::exp(lg);
}

double normalized_kernel(const KernelModel& model, const FSPoint& z, const FSPoint& w) {
    Overlap o = overlap(z, w);
    return power_of_base(o.inner2 / o.scale, o.wedge2 / o.scale, 0.5 * model.k);
}

double normalized_kernel(const KernelModel& model, std::span<const cdouble> z, std::span<const cdouble> w) {
    if (z.size() != std::size_t(model.m) || w.size() != std::size_t(model.m))
        throw LabError(ErrorKind::DomainError, "point dimension does not match m");
    // Homogeneous lifts (1, z) and (1, w).
    std::size_t n = z.size() + 1;
    auto Z = [&](std::size_t i) { return i == 0 ? cdouble(1.0) : z[i - 1]; };
    auto W = [&](std::size_t i) { return i == 0 ? cdouble(1.0) : w[i - 1]; };
    cdouble inner = 0.0;
    double nz = 0.0, nw = 0.0, wedge2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inner += Z(i) * std::conj(W(i));
        nz += std::norm(Z(i));
        nw += std::norm(W(i));
        for (std::size_t j = i + 1; j < n; ++j) wedge2 += std::norm(Z(i) * W(j) - Z(j) * W(i));
    }
    double scale = nz * nw;
    return power_of_base(std::norm(inner) / scale, wedge2 / scale, 0.5 * model.k);
}

double kernel_scaling_residual(const KernelModel& model, cdouble u, cdouble v) {
    double s = 1.0 / std::sqrt(double(model.k));
    double pk = normalized_kernel(model, FSPoint::affine(u * s), FSPoint::affine(v * s));
    return std::abs(pk - std::exp(-0.5 * std::norm(u - v)));
}

double far_decay_check(const KernelModel& model, const FSPoint& z, const FSPoint& w) {
    return normalized_kernel(model, z, w);
}

Region Region::cap_with_area(FSPoint center, double area) {
    if (!(area > 0.0 && area < kPi)) throw LabError(ErrorKind::DomainError, "cap area must lie in (0, pi)");
    return cap(center, std::asin(std::sqrt(area / kPi)));
}

Region Region::cap_with_boundary(FSPoint center, double length) {
    if (!(length > 0.0 && length <= kPi)) throw LabError(ErrorKind::DomainError, "cap boundary must lie in (0, pi]");
    return cap(center, 0.5 * std::asin(length / kPi));
}

bool Region::contains(const Vec3& n) const {
    switch (kind) {
        case RegionKind::whole: return true;
        case RegionKind::empty: return false;
        case RegionKind::spherical_cap: return dot(n, center.unit_vector()) > std::cos(2.0 * radius);
        case RegionKind::affine_disc:
        case RegionKind::polydisc_chart: return n[2] > (1.0 - radius * radius) / (1.0 + radius * radius);
    }
    return false;
}

bool Region::contains(const FSPoint& p) const {
    switch (kind) {
        case RegionKind::whole: return true;
        case RegionKind::empty: return false;
        case RegionKind::spherical_cap: return fs_distance(center, p) < radius;
        case RegionKind::affine_disc:
        case RegionKind::polydisc_chart:
            if (p.chart == Chart::affine) return std::abs(p.coord) < radius;
            return std::abs(p.coord) * radius > 1.0;
    }
    return false;
}

double fs_volume(int m) { return std::exp(m * std::log(kPi) - log_factorial(m)); }

RegionGeometry region_geometry(const Region& region, int m) {
    if (m < 1) throw LabError(ErrorKind::DomainError, "m must be >= 1");
    switch (region.kind) {
        case RegionKind::whole: return {fs_volume(m), m == 1 ? std::optional<double>(0.0) : std::nullopt};
        case RegionKind::empty: return {0.0, m == 1 ? std::optional<double>(0.0) : std::nullopt};
        case RegionKind::spherical_cap: {
            if (m != 1) throw LabError(ErrorKind::DomainError, "spherical caps are supported on CP^1 only");
            double s = std::sin(region.radius);
            return {kPi * s * s, kPi * std::sin(2.0 * region.radius)};
        }
        case RegionKind::affine_disc: {
            double r2 = region.radius * region.radius;
            double frac = r2 / (1.0 + r2);
            double area = fs_volume(m) * std::pow(frac, m);
            if (m != 1) return {area, std::nullopt};
            return {area, 2.0 * kPi * region.radius / (1.0 + r2)};
        }
        case RegionKind::polydisc_chart: {
            // pi^m / m! * sum_j (-1)^j C(m,j) / (1 + j r^2)
            double a = region.radius * region.radius;
            double sum = 0.0;
            for (int j = 0; j <= m; ++j) {
                double sign = (j % 2 == 0) ? 1.0 : -1.0;
                sum += sign * std::exp(log_binomial(m, j)) / (1.0 + j * a);
            }
            double area = fs_volume(m) * sum;
            if (m != 1) return {area, std::nullopt};
            return {area, 2.0 * kPi * region.radius / (1.0 + a)};
        }
    }
    throw LabError(ErrorKind::DomainError, "unsupported region kind");
}

}  // namespace sklab
