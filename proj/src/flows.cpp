#include "gf/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gf/errors.hpp"

namespace gf {

namespace {

std::vector<std::vector<double>> sampleLattice(const Box& K, int perAxis) {
    const int dim = K.dim();
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(static_cast<size_t>(dim), 0);
    while (true) {
        std::vector<double> x(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            x[static_cast<size_t>(i)] =
                K.lo[static_cast<size_t>(i)] +
                (K.hi[static_cast<size_t>(i)] - K.lo[static_cast<size_t>(i)]) *
                    (idx[static_cast<size_t>(i)] + 0.5) / perAxis;
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

double periodicGap(double a, double c, double period) {
    if (period <= 0) return std::abs(a - c);
    double d = std::fmod(a - c, period);
    if (d > period / 2) d -= period;
    if (d < -period / 2) d += period;
    return std::abs(d);
}

}  // namespace

CBoundedReport cBounded(const Representative& map, const Box& K, const EpsilonGrid& grid) {
    CBoundedReport rep;
    if (map.domain().periodic()) {
        // compact chart: every image lies in the fundamental domain
        rep.verdict = Verdict::Yes;
        rep.hull = Box::of({0.0, 0.0}, {kTwoPi, kTwoPi});
        return rep;
    }
    if (!K.strictlyInside(map.domain()))
        throw DomainError("cBounded: compact not inside the chart domain");

    auto pts = sampleLattice(K, K.dim() == 1 ? 65 : 17);
    const int outDim = map.shape() == Shape::Scalar ? 1 : map.rows();
    std::vector<double> lo(static_cast<size_t>(outDim),
                           std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<size_t>(outDim),
                           -std::numeric_limits<double>::infinity());
    std::vector<double> supNorm;
    for (double eps : grid.values()) {
        double worst = 0;
        for (const auto& x : pts) {
            std::vector<double> y = map.eval(eps, x);
            double norm = 0;
            for (int i = 0; i < outDim; ++i) {
                lo[static_cast<size_t>(i)] =
                    std::min(lo[static_cast<size_t>(i)], y[static_cast<size_t>(i)]);
                hi[static_cast<size_t>(i)] =
                    std::max(hi[static_cast<size_t>(i)], y[static_cast<size_t>(i)]);
                norm = std::max(norm, std::abs(y[static_cast<size_t>(i)]));
            }
            if (norm > worst) {
                worst = norm;
                if (eps == grid.values().back()) rep.witness = x;
            }
        }
        supNorm.push_back(worst);
    }
    OrderEstimate est = fitOrder(supNorm, grid);
    if (est.usable && !est.zeroNet && est.residual <= 0.15 && est.slope <= -0.25) {
        rep.verdict = Verdict::No;  // image norm blows up like a negative power
        return rep;
    }
    for (int i = 0; i < outDim; ++i) {
        const double m =
            0.10 * std::max(1e-12, hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)]);
        lo[static_cast<size_t>(i)] -= m;
        hi[static_cast<size_t>(i)] += m;
    }
    rep.hull = Box::of(lo, hi);
    rep.verdict = Verdict::Yes;
    return rep;
}

namespace {

/// Linear least squares y ~ a + c * x, returning (c, rms residual).
std::pair<double, double> linearFit(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    const double c = (n * sxy - sx * sy) / det;
    const double a = (sy * sxx - sx * sxy) / det;
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (a + c * x[i]);
        rss += r * r;
    }
    return {c, std::sqrt(rss / n)};
}

}  // namespace

FlowConditionsReport checkFlowConditions(const GeneralizedVectorField& xi,
                                         const EpsilonGrid& grid) {
    const ChartDomain& dom = xi.chart;
    std::vector<double> lo, hi;
    for (int i = 0; i < dom.dim(); ++i) {
        // torus: full fundamental domain; box: 2% inset so samples stay interior
        const double m = dom.periodic() ? 0.0 : 0.02 * (dom.hi(i) - dom.lo(i));
        lo.push_back(dom.lo(i) + m);
        hi.push_back(dom.hi(i) - m);
    }
    const Box K = Box::of(lo, hi);

    FlowConditionsReport rep;
    std::vector<int> zero(static_cast<size_t>(dom.dim()), 0);
    rep.supField = supOnCompact(xi.components, K, zero, grid);
    for (int a = 0; a < dom.dim(); ++a) {
        std::vector<int> alpha = zero;
        alpha[static_cast<size_t>(a)] = 1;
        std::vector<double> s = supOnCompact(xi.components, K, alpha, grid);
        if (rep.supDeriv.empty())
            rep.supDeriv = s;
        else
            for (size_t j = 0; j < s.size(); ++j)
                rep.supDeriv[j] = std::max(rep.supDeriv[j], s[j]);
    }

    std::vector<double> L, L2;
    for (double eps : grid.values()) {
        L.push_back(std::abs(std::log(eps)));
        L2.push_back(L.back() * L.back());
    }
    std::tie(rep.fieldLogCoeff, rep.fieldLogResidual) = linearFit(L, rep.supField);
    std::tie(rep.derivLog2Coeff, rep.derivLog2Residual) = linearFit(L2, rep.supDeriv);
    return rep;
}

ode::DenseSolution flowCurve(const GeneralizedVectorField& xi, double eps, double t0,
                             double t1, std::span<const double> x0) {
    const ChartDomain& dom = xi.chart;
    const int n = dom.dim();
    if (static_cast<int>(x0.size()) != n)
        throw ParameterError("flow: initial point dimension mismatch");

    std::vector<KernelFeature> feats;
    for (const Expr& e : xi.components.components())
        for (KernelFeature& f : kernelFeatures(e)) feats.push_back(std::move(f));

    const Representative comps = xi.components;
    ode::IntegrateOptions opt;
    if (!feats.empty()) {
        opt.maxStep = [feats, eps, comps](double, std::span<const double> y) {
            double cap = 0.0;
            for (const KernelFeature& f : feats) {
                const double hw = f.halfWidth(eps);
                const double d =
                    periodicGap(y[static_cast<size_t>(f.coord)], f.center(eps), f.period);
                double thisCap;
                if (d <= 2 * hw) {
                    thisCap = std::max(hw / 8.0, 1e-8);
                } else {
                    const double speed = std::max(
                        std::abs(evalExpr(comps.comp(f.coord), y, eps)), 0.1);
                    thisCap = std::max((d - hw) / (2 * speed), hw / 8.0);
                }
                if (cap == 0.0 || thisCap < cap) cap = thisCap;
            }
            return cap;
        };
    }
    if (!dom.periodic())
        opt.inDomain = [dom](std::span<const double> y) { return dom.contains(y); };

    auto rhs = [&comps, eps](double, std::span<const double> y, std::span<double> dy) {
        for (int i = 0; i < static_cast<int>(dy.size()); ++i)
            dy[static_cast<size_t>(i)] = evalExpr(comps.comp(i), y, eps);
    };
    return ode::integrate(rhs, t0, t1, x0, opt);
}

std::vector<double> flow(const GeneralizedVectorField& xi, double eps, double t,
                         std::span<const double> x0) {
    if (t == 0) return std::vector<double>(x0.begin(), x0.end());
    return flowCurve(xi, eps, 0.0, t, x0).at(t);
}

GeneralizedFlow flowNet(const GeneralizedVectorField& xi, const EpsilonGrid& grid,
                        double t0, double t1,
                        const std::vector<std::vector<double>>& lattice) {
    GeneralizedFlow phi;
    phi.epsValues = grid.values();
    phi.lattice = lattice;
    phi.t0 = t0;
    phi.t1 = t1;
    for (double eps : phi.epsValues) {
        std::vector<ode::DenseSolution> row;
        for (const auto& x : lattice) {
            row.push_back(flowCurve(xi, eps, t0, t1, x));
            if (row.back().truncated()) phi.anyTruncated = true;
        }
        phi.curves.push_back(std::move(row));
    }
    return phi;
}

FlowIdentityReport flowIdentities(const GeneralizedVectorField& xi,
                                  const GeneralizedFlow& phi) {
    FlowIdentityReport rep;
    const double span = phi.t1 - phi.t0;
    const std::vector<std::pair<double, double>> fracs = {
        {0.3, 0.45}, {0.5, 0.25}, {0.15, 0.8}};
    for (size_t e = 0; e < phi.epsValues.size(); ++e) {
        const double eps = phi.epsValues[e];
        for (size_t p = 0; p < phi.lattice.size(); ++p) {
            const auto& sol = phi.curves[e][p];
            const auto& x = phi.lattice[p];
            std::vector<double> atStart = sol.at(phi.t0);
            double idRes = 0;
            for (size_t i = 0; i < x.size(); ++i)
                idRes = std::max(idRes, std::abs(atStart[i] - x[i]));
            rep.maxIdentityResidual = std::max(rep.maxIdentityResidual, idRes);

            for (auto [fs, ft] : fracs) {
                const double s = phi.t0 + fs * span, t = ft * span;
                if (sol.truncated()) continue;
                std::vector<double> mid = sol.at(s);
                std::vector<double> direct = sol.at(s + t);
                std::vector<double> relay = flow(xi, eps, t, mid);
                double res = 0;
                for (size_t i = 0; i < x.size(); ++i)
                    res = std::max(res, std::abs(direct[i] - relay[i]));
                rep.maxGroupResidual = std::max(rep.maxGroupResidual, res);
            }
        }
    }
    return rep;
}

TorusExampleReport torusExample(const Mollifier& rho, const EpsilonGrid& grid) {
    TorusExampleReport rep;
    const ChartDomain torus = ChartDomain::torus2();

    // sigma(eps) = 1 / |log eps| as a certified quotient: for eps <= 1/2 the
    // denominator -log(eps) exceeds log 2, so floor 1/2 is safe
    Expr sigma = certifiedDiv(constant(1.0),
                              sub(neg(logE(epsilon())), constant(0.5)),
                              DivCertificate{0, 0.5});
    Expr pulse = conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, var(0), sigma,
                      kTwoPi);
    Representative comps = Representative::vectorValued(
        {constant(1.0), sub(constant(1.0), pulse)}, torus);
    rep.field = GeneralizedVectorField{torus, comps};

    // exact integral closed form: Phi(t; a, b) =
    // (a + t, b + t - (A(a + t) - A(a))) with A the periodized antiderivative
    Expr A = conv(ConvTag::Antideriv, rho.kernel(), rho.radius(), 0, var(0), sigma,
                  kTwoPi);
    auto closedBeta = [&A](double eps, double a, double b, double t) {
        return b + t - (evalExpr1(A, a + t, eps) - evalExpr1(A, a, eps));
    };
    // pointwise limit: H counts pulse crossings (centers at 2*pi*n)
    auto stepCount = [](double a) {
        const double n = std::floor((a + std::numbers::pi) / kTwoPi);
        const double w = a - n * kTwoPi;
        return n + (w > 0 ? 1.0 : 0.0);
    };

    const std::vector<double> alphas = {0.5, 1.3, 2.2, 3.1, 4.3, 5.6};
    const std::vector<double> betas = {0.3, 2.1, 4.8};
    const std::vector<double> times = {0.4, 1.1, 2.7};
    const double windowAtSmallest =
        2.0 * rho.radius() / std::abs(std::log(grid.values().back()));

    for (double eps : grid.values()) {
        double worstCf = 0, worstLim = 0;
        for (double a : alphas)
            for (double b : betas)
                for (double t : times) {
                    std::vector<double> x0 = {a, b};
                    std::vector<double> y = flow(rep.field, eps, t, x0);
                    const double cfA = a + t, cfB = closedBeta(eps, a, b, t);
                    worstCf = std::max(worstCf, std::max(std::abs(y[0] - cfA),
                                                         std::abs(y[1] - cfB)));
                    // limit comparison excluded on the discontinuity windows
                    if (periodicGap(a, 0.0, kTwoPi) <= windowAtSmallest ||
                        periodicGap(a + t, 0.0, kTwoPi) <= windowAtSmallest)
                        continue;
                    const double psiB = b + t - stepCount(a + t) + stepCount(a);
                    worstLim = std::max(
                        worstLim, std::max(std::abs(y[0] - cfA), std::abs(y[1] - psiB)));
                }
        rep.supVsClosedForm.push_back(worstCf);
        rep.limitDistances.push_back(worstLim);
    }
    rep.worstClosedForm =
        *std::max_element(rep.supVsClosedForm.begin(), rep.supVsClosedForm.end());
    rep.limitDistanceAtSmallestEps = rep.limitDistances.back();
    return rep;
}

Verdict mapEquivalent(const Representative& u, const Representative& v, const Box& K,
                      int mMax, const EpsilonGrid& grid) {
    if (!(u.domain() == v.domain()))
        throw ParameterError("mapEquivalent: domain mismatch");
    auto pts = sampleLattice(K, K.dim() == 1 ? 65 : 17);
    const ChartDomain& target = u.domain();
    std::vector<double> sup;
    for (double eps : grid.values()) {
        double worst = 0;
        for (const auto& x : pts) {
            std::vector<double> a = u.eval(eps, x);
            std::vector<double> b = v.eval(eps, x);
            worst = std::max(worst, target.distance(a, b));
        }
        sup.push_back(worst);
    }
    OrderEstimate est = fitOrder(sup, grid);
    if (est.zeroNet) return Verdict::Yes;
    if (!est.usable) return Verdict::Inconclusive;
    if (est.residual <= 0.15 && est.slope >= mMax - 0.25) return Verdict::Yes;
    if (est.slope < mMax - 0.25) return Verdict::No;
    return Verdict::Inconclusive;
}

}  // namespace gf
