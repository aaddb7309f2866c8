#pragma once

#include <span>
#include <vector>

#include "sklab/ensembles.hpp"
#include "sklab/test_function.hpp"

namespace sklab {

struct ZeroPoint {
    FSPoint point;  // canonical chart, |coord| <= 1
    int multiplicity = 1;
};

struct ZeroSet {
    int k = 0;
    std::vector<ZeroPoint> points;
    int suspected_clusters = 0;  // pairs of computed roots closer than 1e-7; kept separate

    int total_multiplicity() const;
    std::vector<Vec3> unit_vectors() const;  // one entry per multiplicity
};

enum class RootMethod { aberth, companion };

struct RootOptions {
    RootMethod method = RootMethod::aberth;
    int max_sweeps = 200;
};

// Roots of sum a_j z^j as points of CP^1, with a drop in degree sent to infinity.
// Coefficients below drop_tol count as zero (default 1e-13 * |a|).
ZeroSet polynomial_zeros(std::span<const cdouble> a, double drop_tol = -1.0, const RootOptions& opt = {});
ZeroSet find_zeros(const Section& section, const RootOptions& opt = {});

int count_in_region(const ZeroSet& zs, const Region& region);
double linear_statistic(const ZeroSet& zs, const TestFunction& f);

}  // namespace sklab
