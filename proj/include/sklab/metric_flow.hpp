#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sklab/fs_geometry.hpp"
#include "sklab/parallel.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"

namespace sklab {

using CMatrix = Eigen::MatrixXcd;

// P = A^* A, Hermitian positive definite with det P = 1.
// Spectral diagnostics use the singular values of A; they lose meaning once cond(P) exceeds 1/eps.
struct PositiveHermitian {
    CMatrix a;
    CMatrix p;

    static PositiveHermitian identity(int d);
    int dim() const { return int(p.rows()); }
    double hermitian_error() const;
    double min_eigenvalue() const;
    double det_error() const;  // |det P - 1|
    // delta(I, P)^2 = sum (log lambda_i)^2.
    double distance2_from_identity() const;
};

enum class Rescale { none, mabuchi };

struct FlowConfig {
    int k = 1;  // d = k + 1 on CP^1
    double t = 1.0;
    Rescale rescale = Rescale::none;
    double dt = 0.0;  // 0 picks the default

    int dim() const { return k + 1; }
    // t, multiplied by eps_k^{-2} = k^2 d under the Mabuchi rescaling.
    double effective_time() const;
    double step() const;
    int steps() const;
    void validate() const;
};

// Walk scale: E delta^2 = 2 (d^2 - 1) t for small t.
inline constexpr double kFlowSigma = 1.4142135623730951;

// Traceless Hermitian Gaussian with <H, H'> = tr(H H').
CMatrix traceless_hermitian_gaussian(int d, Rng& rng);
PositiveHermitian brownian_path(const FlowConfig& config, Rng& rng);
// The same fine path together with the coarse walk at step 2 dt driven by sums of consecutive increments.
std::pair<PositiveHermitian, PositiveHermitian> brownian_path_pair(const FlowConfig& config, Rng& rng);

// (1/2k) log sum conj(F_j) P_jl F_l in the affine chart.
double bergman_potential(const CMatrix& p, cdouble z, int k);
// phi_P - phi_I = (1/2k) log(e^* P e) for the unit kernel vector e at z; chart free.
double relative_potential(const CMatrix& p, const FSPoint& z, int k);
// phi_I = phi_h + (1/2k) log((k+1)/pi).
double identity_potential(cdouble z, int k);

// E(phi_P - phi_I) = t / 2 at every z: the Ito drift of log(e^* P e) is k per unit time.
double potential_drift(const FlowConfig& config);

struct MeanPotentialResult {
    std::vector<StatSummary> raw;       // phi_P - phi_I at each grid point
    std::vector<StatSummary> relative;  // same, extrapolated to dt -> 0 (2 fine - coarse)
    std::vector<StatSummary> contrast;  // relative(z) - relative(z_0), per path
    StatSummary pooled;                 // per-path grid average of relative
    double drift = 0.0;                 // potential_drift(config)
};

MeanPotentialResult mean_potential_check(const FlowConfig& config, const std::vector<FSPoint>& grid, std::size_t n,
                                         const McOptions& mc);

// dI_2/dx at (t, x); bounded as x -> 0.
double i2_derivative(double t, double x);
// I_2(t, x) = int_0^x dI_2/dy dy, with I_2(t, 0) = 0.
double i2_kernel(double t, double x);

struct CovarianceCheck {
    double beta = 0.0;
    double predicted = 0.0;  // I_2(t, beta) / (4 k^2)
    double empirical = 0.0;  // Cov(phi(z), phi(w))
    double empirical_se = 0.0;
    double ratio = 0.0;
    double anchored = 0.0;  // Cov(phi(z), phi(w)) - Cov(phi(z), phi(antipode z))
    double anchored_se = 0.0;
    double anchored_ratio = 0.0;
    std::size_t n = 0;
};

CovarianceCheck covariance_check(const FlowConfig& config, const FSPoint& z, const FSPoint& w, std::size_t n,
                                 const McOptions& mc);

// Radial law of delta(I, P_t) on P_2 (det 1), the hyperbolic 3-space heat kernel in delta units.
double h3_radial_density(double t, double delta);
double h3_radial_cdf(double t, double delta);

// delta(I, P_t)^2 over n paths.
std::vector<double> path_distances(const FlowConfig& config, std::size_t n, const McOptions& mc);

}  // namespace sklab
