#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gf/asymptotics.hpp"
#include "gf/chart.hpp"
#include "gf/grid.hpp"
#include "gf/mollifier.hpp"
#include "gf/ode.hpp"
#include "gf/representative.hpp"

namespace gf {

/// A validated generalized pseudo-Riemannian metric: symmetric matrix net
/// with an invertibility certificate for its (symbolic cofactor) determinant
/// and a constant eigenvalue signature on the sample set. Immutable after
/// checkMetric.
class GeneralizedMetric {
  public:
    int dim() const { return g_.rows(); }
    int index() const { return index_; }
    const Representative& components() const { return g_; }
    const Expr& det() const { return det_; }
    const OrderEstimate& detInvertibility() const { return detCert_; }
    double smallestEpsChecked() const { return smallestEps_; }

    /// Metric and inverse-metric values at a point, row major.
    std::vector<double> value(double eps, std::span<const double> x) const;
    std::vector<double> inverse(double eps, std::span<const double> x) const;

    /// Cached symbolic first/second coordinate derivatives of g_ij.
    const Expr& dg(int a, int i, int j) const;
    const Expr& ddg(int a, int b, int i, int j) const;

  private:
    friend GeneralizedMetric checkMetric(const Representative&, const EpsilonGrid&,
                                         const Box&, int);
    Representative g_ = Representative::scalar(constant(0), ChartDomain::interval(-1, 1));
    Expr det_;
    OrderEstimate detCert_;
    int index_ = 0;
    double smallestEps_ = 0;
    std::vector<Expr> dg_, ddg_;  // [a][i][j] and [a][b][i][j], flattened
};

/// Validates a symmetric matrix net as a generalized metric: structural
/// symmetry, determinant invertibility over >= samplePoints lattice points
/// (odd per-axis counts so lattice midpoints are hit exactly; a min-over-box
/// refinement guards against degeneracies between lattice points), and a
/// constant eigenvalue signature. Throws MetricError with diagnostics on
/// rejection.
GeneralizedMetric checkMetric(const Representative& g, const EpsilonGrid& grid,
                              const Box& sampleBox, int samplePoints = 33);

/// Christoffel symbols of the per-eps Levi-Civita connection,
/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij),
/// flattened as [(k*n + i)*n + j]; symmetric in (i, j).
std::vector<double> christoffel(const GeneralizedMetric& G, double eps,
                                std::span<const double> x);

/// Riemann tensor R^l_{kij} = d_i Gamma^l_jk - d_j Gamma^l_ik
/// + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik,
/// flattened as [((l*n + k)*n + i)*n + j].
std::vector<double> riemann(const GeneralizedMetric& G, double eps,
                            std::span<const double> x);

/// Ricci tensor R_kj = R^l_{klj}, row major.
std::vector<double> ricci(const GeneralizedMetric& G, double eps,
                          std::span<const double> x);

/// Geodesic of the eps-representative: state (x, xdot) of dimension 2n,
/// integrated adaptively (relative tolerance 1e-10) with the step capped at
/// eps/10 inside kernel pulse windows and bounded by the remaining distance
/// to a window so shrinking pulses are never stepped over. Leaving the chart
/// truncates the solution (flagged).
ode::DenseSolution geodesic(const GeneralizedMetric& G, std::span<const double> p0,
                            std::span<const double> v0, double eps, double t0, double t1);

/// Per-eps geodesics over the grid plus limit extraction on a fixed time
/// sampling.
struct GeodesicNet {
    std::vector<double> epsValues;
    std::vector<ode::DenseSolution> curves;  // state (x, xdot)
    bool cBounded = false;
    Box hull = Box::interval(0, 1);  // bounding box of all positions (+10%)
    std::vector<double> sampleTimes;
    std::vector<std::vector<double>> limitPositions;  // per sample time
    bool limitCauchy = false;      // successive-eps sup distance Cauchy <= tol
    double lastCauchyDistance = 0;
};

GeodesicNet geodesicNet(const GeneralizedMetric& G, std::span<const double> p0,
                        std::span<const double> v0, const EpsilonGrid& grid, double t0,
                        double t1, int timeSamples = 201, double cauchyTol = 1e-4);

/// A curve with velocity, as callables of t (typically wrapping a dense ODE
/// solution).
struct Curve {
    std::function<std::vector<double>(double)> pos;
    std::function<std::vector<double>(double)> vel;
};

/// A vector field along a curve; timeDerivative may be empty, in which case
/// a central finite difference of value is used.
struct CurveVectorField {
    std::function<std::vector<double>(double)> value;
    std::function<std::vector<double>(double)> timeDerivative;
};

/// Induced covariant derivative along gamma at fixed eps:
/// (xi')^k = dxi^k/dt + Gamma^k_ij gammadot^i xi^j.
CurveVectorField inducedCovariantDerivative(const GeneralizedMetric& G, double eps,
                                            const Curve& gamma, const CurveVectorField& xi);

/// Impulsive pp-wave metric in light-cone coordinates (u, v, x, y):
/// g_uu = f(x,y) * rho_eps(u), g_uv = g_vu = -1/2, g_xx = g_yy = 1.
/// f is an expression in x0, x1 which are rebound to the x, y coordinates.
Representative ppWaveMetric(const Expr& f, const Mollifier& rho,
                            double chartHalfWidth = 40.0);

}  // namespace gf
