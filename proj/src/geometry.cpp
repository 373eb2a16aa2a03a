#include "gf/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gf/errors.hpp"

namespace gf {

namespace {

/// Symbolic determinant by cofactor expansion; the constructors' constant
/// folding collapses structured metrics (e.g. light-cone blocks) to exact
/// constants.
Expr detExpr(const std::vector<Expr>& m, int n) {
    if (n == 1) return m[0];
    Expr out = constant(0.0);
    for (int j = 0; j < n; ++j) {
        std::vector<Expr> minor;
        for (int r = 1; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (c != j) minor.push_back(m[static_cast<size_t>(r * n + c)]);
        Expr term = mul(m[static_cast<size_t>(j)], detExpr(minor, n - 1));
        out = j % 2 == 0 ? add(out, term) : sub(out, term);
    }
    return out;
}

int oddPerAxis(int samplePoints, int dim) {
    int k = 3;
    while (std::pow(k, dim) < samplePoints) k += 2;
    if (dim == 1) k = std::max(k, 33);
    return k;
}

std::vector<std::vector<double>> latticePoints(const Box& K, int perAxis) {
    const int dim = K.dim();
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(static_cast<size_t>(dim), 0);
    while (true) {
        std::vector<double> x(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            x[static_cast<size_t>(i)] =
                K.lo[static_cast<size_t>(i)] +
                (K.hi[static_cast<size_t>(i)] - K.lo[static_cast<size_t>(i)]) *
                    idx[static_cast<size_t>(i)] / (perAxis - 1.0);
        pts.push_back(std::move(x));
        int k = dim - 1;
        while (k >= 0 && ++idx[static_cast<size_t>(k)] == perAxis) {
            idx[static_cast<size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return pts;
}

}  // namespace

std::vector<double> GeneralizedMetric::value(double eps, std::span<const double> x) const {
    return g_.eval(eps, x);
}

std::vector<double> GeneralizedMetric::inverse(double eps, std::span<const double> x) const {
    const int n = dim();
    std::vector<double> v = g_.eval(eps, x);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = v[static_cast<size_t>(i * n + j)];
    Eigen::MatrixXd inv = M.inverse();
    if (!inv.allFinite()) throw MetricError("metric inverse is singular at a point");
    std::vector<double> out(static_cast<size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(i * n + j)] = inv(i, j);
    return out;
}

const Expr& GeneralizedMetric::dg(int a, int i, int j) const {
    const int n = dim();
    return dg_[static_cast<size_t>((a * n + i) * n + j)];
}

const Expr& GeneralizedMetric::ddg(int a, int b, int i, int j) const {
    const int n = dim();
    return ddg_[static_cast<size_t>(((a * n + b) * n + i) * n + j)];
}

GeneralizedMetric checkMetric(const Representative& g, const EpsilonGrid& grid,
                              const Box& sampleBox, int samplePoints) {
    if (g.shape() != Shape::Matrix) throw MetricError("metric: matrix net required");
    const int n = g.rows();
    if (sampleBox.dim() != g.domain().dim())
        throw MetricError("metric: sample box dimension mismatch");
    if (!sampleBox.strictlyInside(g.domain()))
        throw MetricError("metric: sample box not inside the chart domain");

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!structurallyEqual(g.at(i, j), g.at(j, i)))
                throw MetricError("metric: g_" + std::to_string(i) + std::to_string(j) +
                                  " != g_" + std::to_string(j) + std::to_string(i) +
                                  " structurally");

    GeneralizedMetric G;
    G.g_ = g;
    G.det_ = detExpr(g.components(), n);
    G.smallestEps_ = grid.values().back();

    const int perAxis = oddPerAxis(samplePoints, sampleBox.dim());
    auto pts = latticePoints(sampleBox, perAxis);

    // determinant invertibility: min |det| over the sample set per eps,
    // with a local minimizer refinement so degeneracies between lattice
    // points are still seen
    std::vector<double> minDet;
    double maxDet = 0.0;
    for (double eps : grid.values()) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> argmin;
        for (const auto& p : pts) {
            const double v = std::abs(evalExpr(G.det_, p, eps));
            maxDet = std::max(maxDet, v);
            if (v < best) {
                best = v;
                argmin = p;
            }
        }
        std::vector<double> spacing(static_cast<size_t>(sampleBox.dim()));
        for (int i = 0; i < sampleBox.dim(); ++i)
            spacing[static_cast<size_t>(i)] =
                (sampleBox.hi[static_cast<size_t>(i)] - sampleBox.lo[static_cast<size_t>(i)]) /
                (perAxis - 1.0);
        for (int round = 0; round < 2; ++round) {
            auto refined = argmin;
            std::vector<int> idx(static_cast<size_t>(sampleBox.dim()), -4);
            std::vector<double> x(static_cast<size_t>(sampleBox.dim()));
            while (true) {
                bool inside = true;
                for (int i = 0; i < sampleBox.dim(); ++i) {
                    x[static_cast<size_t>(i)] = argmin[static_cast<size_t>(i)] +
                                                spacing[static_cast<size_t>(i)] *
                                                    idx[static_cast<size_t>(i)] / 4.0;
                    if (x[static_cast<size_t>(i)] < sampleBox.lo[static_cast<size_t>(i)] ||
                        x[static_cast<size_t>(i)] > sampleBox.hi[static_cast<size_t>(i)])
                        inside = false;
                }
                if (inside) {
                    const double v = std::abs(evalExpr(G.det_, x, eps));
                    if (v < best) {
                        best = v;
                        refined = x;
                    }
                }
                int k = sampleBox.dim() - 1;
                while (k >= 0 && ++idx[static_cast<size_t>(k)] == 5) {
                    idx[static_cast<size_t>(k)] = -4;
                    --k;
                }
                if (k < 0) break;
            }
            argmin = refined;
            for (double& s : spacing) s /= 4.0;
        }
        if (!(best > 0.0))
            throw MetricError("metric rejected: det vanishes at a sample point");
        minDet.push_back(best);
    }
    if (*std::min_element(minDet.begin(), minDet.end()) < 1e-8 * maxDet)
        throw MetricError("metric rejected: det degenerate (below the relative floor) "
                          "on the sample set");
    G.detCert_ = fitOrder(minDet, grid);
    if (!G.detCert_.usable || G.detCert_.residual > 0.15)
        throw MetricError("metric rejected: det has no stable eps^-N floor (fit residual " +
                          std::to_string(G.detCert_.residual) + ")");

    // eigenvalue signature at the smallest and a mid-grid eps
    const double epsMid = grid.values()[grid.values().size() / 2];
    int index = -1;
    for (double eps : {G.smallestEps_, epsMid}) {
        for (const auto& p : pts) {
            std::vector<double> v = g.eval(eps, p);
            Eigen::MatrixXd M(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) M(i, j) = v[static_cast<size_t>(i * n + j)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
            int neg = 0;
            for (int i = 0; i < n; ++i)
                if (es.eigenvalues()(i) < 0) ++neg;
            if (index < 0) index = neg;
            if (neg != index)
                throw MetricError("metric rejected: eigenvalue signature varies over "
                                  "the sample set");
        }
    }
    G.index_ = index;

    // cache symbolic first and second derivatives of the components
    G.dg_.resize(static_cast<size_t>(n * n * n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                G.dg_[static_cast<size_t>((a * n + i) * n + j)] = diff(g.at(i, j), a);
    G.ddg_.resize(static_cast<size_t>(n * n * n * n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    G.ddg_[static_cast<size_t>(((a * n + b) * n + i) * n + j)] =
                        diff(G.dg_[static_cast<size_t>((a * n + i) * n + j)], b);
    return G;
}

std::vector<double> christoffel(const GeneralizedMetric& G, double eps,
                                std::span<const double> x) {
    const int n = G.dim();
    std::vector<double> ginv = G.inverse(eps, x);
    std::vector<double> dg(static_cast<size_t>(n * n * n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dg[static_cast<size_t>((a * n + i) * n + j)] =
                    evalExpr(G.dg(a, i, j), x, eps);

    std::vector<double> gamma(static_cast<size_t>(n * n * n), 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l)
                    s += ginv[static_cast<size_t>(k * n + l)] *
                         (dg[static_cast<size_t>((i * n + j) * n + l)] +
                          dg[static_cast<size_t>((j * n + i) * n + l)] -
                          dg[static_cast<size_t>((l * n + i) * n + j)]);
                gamma[static_cast<size_t>((k * n + i) * n + j)] = 0.5 * s;
            }
    return gamma;
}

std::vector<double> riemann(const GeneralizedMetric& G, double eps,
                            std::span<const double> x) {
    const int n = G.dim();
    std::vector<double> ginv = G.inverse(eps, x);
    std::vector<double> dg(static_cast<size_t>(n * n * n));
    std::vector<double> ddg(static_cast<size_t>(n * n * n * n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                dg[static_cast<size_t>((a * n + i) * n + j)] =
                    evalExpr(G.dg(a, i, j), x, eps);
                for (int b = 0; b < n; ++b)
                    ddg[static_cast<size_t>(((a * n + b) * n + i) * n + j)] =
                        evalExpr(G.ddg(a, b, i, j), x, eps);
            }
    // d_a g^{kl} = -g^{km} (d_a g_mn) g^{nl}
    std::vector<double> dginv(static_cast<size_t>(n * n * n), 0.0);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0;
                for (int m = 0; m < n; ++m)
                    for (int p = 0; p < n; ++p)
                        s += ginv[static_cast<size_t>(k * n + m)] *
                             dg[static_cast<size_t>((a * n + m) * n + p)] *
                             ginv[static_cast<size_t>(p * n + l)];
                dginv[static_cast<size_t>((a * n + k) * n + l)] = -s;
            }

    auto gammaOf = [&](int k, int i, int j) {
        double s = 0;
        for (int l = 0; l < n; ++l)
            s += ginv[static_cast<size_t>(k * n + l)] *
                 (dg[static_cast<size_t>((i * n + j) * n + l)] +
                  dg[static_cast<size_t>((j * n + i) * n + l)] -
                  dg[static_cast<size_t>((l * n + i) * n + j)]);
        return 0.5 * s;
    };
    auto dGammaOf = [&](int a, int k, int i, int j) {
        double s = 0;
        for (int l = 0; l < n; ++l) {
            s += dginv[static_cast<size_t>((a * n + k) * n + l)] *
                 (dg[static_cast<size_t>((i * n + j) * n + l)] +
                  dg[static_cast<size_t>((j * n + i) * n + l)] -
                  dg[static_cast<size_t>((l * n + i) * n + j)]);
            s += ginv[static_cast<size_t>(k * n + l)] *
                 (ddg[static_cast<size_t>(((i * n + a) * n + j) * n + l)] +
                  ddg[static_cast<size_t>(((j * n + a) * n + i) * n + l)] -
                  ddg[static_cast<size_t>(((l * n + a) * n + i) * n + j)]);
        }
        return 0.5 * s;
    };

    std::vector<double> gamma(static_cast<size_t>(n * n * n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gamma[static_cast<size_t>((k * n + i) * n + j)] = gammaOf(k, i, j);

    std::vector<double> R(static_cast<size_t>(n * n * n * n));
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = dGammaOf(i, l, j, k) - dGammaOf(j, l, i, k);
                    for (int m = 0; m < n; ++m)
                        s += gamma[static_cast<size_t>((l * n + i) * n + m)] *
                                 gamma[static_cast<size_t>((m * n + j) * n + k)] -
                             gamma[static_cast<size_t>((l * n + j) * n + m)] *
                                 gamma[static_cast<size_t>((m * n + i) * n + k)];
                    R[static_cast<size_t>(((l * n + k) * n + i) * n + j)] = s;
                }
    return R;
}

std::vector<double> ricci(const GeneralizedMetric& G, double eps,
                          std::span<const double> x) {
    const int n = G.dim();
    std::vector<double> R = riemann(G, eps, x);
    std::vector<double> out(static_cast<size_t>(n * n), 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int l = 0; l < n; ++l)
                s += R[static_cast<size_t>(((l * n + k) * n + l) * n + j)];
            out[static_cast<size_t>(k * n + j)] = s;
        }
    return out;
}

namespace {

/// Pulse-aware step cap built from the kernel features of the metric: at
/// most eps/10 inside a pulse window, and never more than half the distance
/// to an approaching window (so an adaptive integrator cannot step over a
/// shrinking pulse whose local error estimate is identically zero outside).
std::function<double(double, std::span<const double>)> pulseCap(
    const std::vector<KernelFeature>& feats, double eps, int n) {
    return [feats, eps, n](double, std::span<const double> y) {
        double cap = 0.0;  // 0: no cap
        for (const KernelFeature& f : feats) {
            const double c = f.center(eps), hw = f.halfWidth(eps);
            const double d = std::abs(y[static_cast<size_t>(f.coord)] - c);
            double thisCap;
            if (d <= 2 * hw) {
                thisCap = eps / 10.0;
            } else {
                const double speed =
                    std::max(std::abs(y[static_cast<size_t>(n + f.coord)]), 0.1);
                thisCap = std::max((d - hw) / (2 * speed), eps / 10.0);
            }
            if (cap == 0.0 || thisCap < cap) cap = thisCap;
        }
        return cap;
    };
}

}  // namespace

ode::DenseSolution geodesic(const GeneralizedMetric& G, std::span<const double> p0,
                            std::span<const double> v0, double eps, double t0, double t1) {
    const int n = G.dim();
    if (static_cast<int>(p0.size()) != n || static_cast<int>(v0.size()) != n)
        throw ParameterError("geodesic: state dimension mismatch");
    std::vector<double> y0(p0.begin(), p0.end());
    y0.insert(y0.end(), v0.begin(), v0.end());

    std::vector<KernelFeature> feats;
    for (const Expr& e : G.components().components())
        for (KernelFeature& f : kernelFeatures(e)) feats.push_back(std::move(f));

    ode::IntegrateOptions opt;
    if (!feats.empty()) opt.maxStep = pulseCap(feats, eps, n);
    const ChartDomain dom = G.components().domain();
    opt.inDomain = [dom, n](std::span<const double> y) {
        return dom.contains(y.subspan(0, static_cast<size_t>(n)));
    };
    auto rhs = [&G, eps, n](double, std::span<const double> y, std::span<double> dy) {
        std::vector<double> gamma =
            christoffel(G, eps, y.subspan(0, static_cast<size_t>(n)));
        for (int k = 0; k < n; ++k) {
            dy[static_cast<size_t>(k)] = y[static_cast<size_t>(n + k)];
            double a = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a += gamma[static_cast<size_t>((k * n + i) * n + j)] *
                         y[static_cast<size_t>(n + i)] * y[static_cast<size_t>(n + j)];
            dy[static_cast<size_t>(n + k)] = -a;
        }
    };
    return ode::integrate(rhs, t0, t1, y0, opt);
}

GeodesicNet geodesicNet(const GeneralizedMetric& G, std::span<const double> p0,
                        std::span<const double> v0, const EpsilonGrid& grid, double t0,
                        double t1, int timeSamples, double cauchyTol) {
    const int n = G.dim();
    GeodesicNet net;
    net.epsValues = grid.values();
    for (double eps : net.epsValues) net.curves.push_back(geodesic(G, p0, v0, eps, t0, t1));

    for (int s = 0; s < timeSamples; ++s)
        net.sampleTimes.push_back(t0 + (t1 - t0) * s / (timeSamples - 1.0));

    // bounding hull of all sampled positions; c-bounded iff no curve was
    // truncated (every representative stays in the chart, hence in the hull)
    std::vector<double> lo(static_cast<size_t>(n),
                           std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<size_t>(n),
                           -std::numeric_limits<double>::infinity());
    net.cBounded = true;
    for (const auto& sol : net.curves) {
        if (sol.truncated()) net.cBounded = false;
        for (double t : net.sampleTimes) {
            if (t < std::min(sol.t0(), sol.t1()) || t > std::max(sol.t0(), sol.t1()))
                continue;
            std::vector<double> y = sol.at(t);
            for (int i = 0; i < n; ++i) {
                lo[static_cast<size_t>(i)] =
                    std::min(lo[static_cast<size_t>(i)], y[static_cast<size_t>(i)]);
                hi[static_cast<size_t>(i)] =
                    std::max(hi[static_cast<size_t>(i)], y[static_cast<size_t>(i)]);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const double m = 0.05 * (hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)]);
        lo[static_cast<size_t>(i)] -= m;
        hi[static_cast<size_t>(i)] += m;
    }
    net.hull = Box::of(lo, hi);

    // limit extraction: sup distance between successive-eps curves on the
    // time sampling must be Cauchy
    std::vector<double> dists;
    for (size_t k = 0; k + 1 < net.curves.size(); ++k) {
        double d = 0;
        for (double t : net.sampleTimes) {
            std::vector<double> a = net.curves[k].at(t);
            std::vector<double> b = net.curves[k + 1].at(t);
            double dd = 0;
            for (int i = 0; i < n; ++i) {
                const double diff = a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
                dd += diff * diff;
            }
            d = std::max(d, std::sqrt(dd));
        }
        dists.push_back(d);
    }
    net.lastCauchyDistance = dists.empty() ? 0.0 : dists.back();
    net.limitCauchy = !dists.empty() && dists.back() <= cauchyTol;
    for (double t : net.sampleTimes) {
        std::vector<double> y = net.curves.back().at(t);
        y.resize(static_cast<size_t>(n));
        net.limitPositions.push_back(std::move(y));
    }
    return net;
}

CurveVectorField inducedCovariantDerivative(const GeneralizedMetric& G, double eps,
                                            const Curve& gamma,
                                            const CurveVectorField& xi) {
    const int n = G.dim();
    auto dXi = xi.timeDerivative;
    if (!dXi) {
        auto value = xi.value;
        dXi = [value, n](double t) {
            const double h = 1e-6 * std::max(1.0, std::abs(t));
            std::vector<double> p = value(t + h), m = value(t - h);
            std::vector<double> out(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                out[static_cast<size_t>(i)] =
                    (p[static_cast<size_t>(i)] - m[static_cast<size_t>(i)]) / (2 * h);
            return out;
        };
    }
    CurveVectorField out;
    out.value = [&G, eps, n, gamma, xi, dXi](double t) {
        std::vector<double> x = gamma.pos(t);
        std::vector<double> v = gamma.vel(t);
        std::vector<double> s = xi.value(t);
        std::vector<double> ds = dXi(t);
        std::vector<double> g = christoffel(G, eps, x);
        std::vector<double> r(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            double acc = ds[static_cast<size_t>(k)];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    acc += g[static_cast<size_t>((k * n + i) * n + j)] *
                           v[static_cast<size_t>(i)] * s[static_cast<size_t>(j)];
            r[static_cast<size_t>(k)] = acc;
        }
        return r;
    };
    return out;
}

Representative ppWaveMetric(const Expr& f, const Mollifier& rho, double chartHalfWidth) {
    if (maxVarIndex(f) > 1)
        throw ParameterError("ppWaveMetric: profile must use x0, x1 only");
    const double W = chartHalfWidth;
    ChartDomain dom = ChartDomain::box({-W, -W, -W, -W}, {W, W, W, W},
                                       {"u", "v", "x", "y"});
    // rebind the profile from (x0, x1) to the transverse coordinates (x, y)
    Expr fxy = substitute(f, {var(2), var(3)});
    Expr pulse = conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, var(0), epsilon());
    Expr zero = constant(0.0), one = constant(1.0), mhalf = constant(-0.5);
    std::vector<Expr> comps = {
        mul(fxy, pulse), mhalf, zero, zero,  //
        mhalf,           zero,  zero, zero,  //
        zero,            zero,  one,  zero,  //
        zero,            zero,  zero, one,
    };
    return Representative::matrixValued(std::move(comps), 4, dom);
}

}  // namespace gf
