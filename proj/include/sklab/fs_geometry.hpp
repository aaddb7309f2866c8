#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sklab/core.hpp"

namespace sklab {

enum class Chart { affine, infinity };

// A point of CP^1 in one of the two standard charts: z = coord (affine) or z = 1/coord (infinity).
struct FSPoint {
    Chart chart = Chart::affine;
    cdouble coord{};

    static FSPoint affine(cdouble z) { return {Chart::affine, z}; }
    static FSPoint at_infinity_chart(cdouble zeta) { return {Chart::infinity, zeta}; }
    static FSPoint infinity() { return {Chart::infinity, 0.0}; }
    static FSPoint from_unit_vector(const Vec3& n);

    bool is_infinity() const { return chart == Chart::infinity && coord == 0.0; }
    // Same point expressed in chart c; throws DomainError if it is that chart's missing point.
    FSPoint in_chart(Chart c) const;
    // Chart in which |coord| <= 1.
    FSPoint canonical() const;
    // Homogeneous coordinates [Z0 : Z1] with z = Z1 / Z0.
    std::array<cdouble, 2> homogeneous() const;
    // Stereographic image on the unit sphere, z = 0 at the north pole.
    Vec3 unit_vector() const;
};

double fs_distance(const FSPoint& a, const FSPoint& b);
// cos^2 of the FS distance, i.e. the Berezin kernel at k = 1.
double berezin_base(const FSPoint& a, const FSPoint& b);
// 1 - berezin_base, computed without cancellation.
double berezin_gap(const FSPoint& a, const FSPoint& b);
double phi_h(cdouble z);

struct KernelModel {
    int m = 1;
    int k = 1;
};

double bergman_diagonal(const KernelModel& model);
double normalized_kernel(const KernelModel& model, const FSPoint& z, const FSPoint& w);
// General m, affine coordinates in C^m.
double normalized_kernel(const KernelModel& model, std::span<const cdouble> z, std::span<const cdouble> w);
double kernel_scaling_residual(const KernelModel& model, cdouble u, cdouble v);
double far_decay_check(const KernelModel& model, const FSPoint& z, const FSPoint& w);

enum class RegionKind { spherical_cap, affine_disc, polydisc_chart, whole, empty };

struct Region {
    RegionKind kind = RegionKind::whole;
    FSPoint center = FSPoint::affine(0.0);
    double radius = 0.0;  // FS radius for caps, affine radius otherwise

    static Region cap(FSPoint center, double fs_radius) { return {RegionKind::spherical_cap, center, fs_radius}; }
    static Region cap_with_area(FSPoint center, double area);
    static Region cap_with_boundary(FSPoint center, double length);
    static Region disc(double r) { return {RegionKind::affine_disc, FSPoint::affine(0.0), r}; }
    static Region polydisc(double r) { return {RegionKind::polydisc_chart, FSPoint::affine(0.0), r}; }
    static Region whole_space() { return {RegionKind::whole, FSPoint::affine(0.0), 0.0}; }
    static Region nothing() { return {RegionKind::empty, FSPoint::affine(0.0), 0.0}; }

    // Open-region membership (m = 1).
    bool contains(const FSPoint& p) const;
    bool contains(const Vec3& n) const;
};

struct RegionGeometry {
    double area = 0.0;
    std::optional<double> boundary_length;  // m = 1 only
};

RegionGeometry region_geometry(const Region& region, int m = 1);

// Volume of CP^m for omega_h.
double fs_volume(int m);

}  // namespace sklab
