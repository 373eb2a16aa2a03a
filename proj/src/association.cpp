#include "gf/association.hpp"

#include <algorithm>
#include <cmath>

#include "gf/errors.hpp"
#include "gf/quadrature.hpp"

namespace gf {

TestFunction TestFunction::bumpAt(double center, double halfWidth, double amplitude) {
    if (!(halfWidth > 0)) throw ParameterError("test function: halfWidth must be positive");
    TestFunction t;
    Expr arg = mul(constant(1.0 / halfWidth), sub(var(0), constant(center)));
    t.expr_ = mul(constant(amplitude), bump(0, arg));
    t.support_ = Box::interval(center - halfWidth, center + halfWidth);
    return t;
}

double TestFunction::operator()(double x) const { return evalExpr1(expr_, x, 1.0); }

std::vector<TestFunction> defaultBattery(const Box& K) {
    if (K.dim() != 1) throw ParameterError("battery: 1-D compact only");
    const double lo = K.lo[0], hi = K.hi[0], w = hi - lo;
    std::vector<TestFunction> battery;
    for (int i = 0; i < 12; ++i) {
        const double center = lo + w * (2 * i + 1) / 24.0;
        // width pattern cycles; clipped so every support stays inside K
        const double halfWidth = std::min(w * (0.15 + 0.10 * (i % 3)),
                                          0.95 * std::min(center - lo, hi - center));
        battery.push_back(TestFunction::bumpAt(center, halfWidth));
    }
    return battery;
}

double pair(const Representative& rep, const TestFunction& phi, double eps) {
    if (rep.shape() != Shape::Scalar || rep.domain().dim() != 1)
        throw ParameterError("pair: scalar 1-D representative required");
    double a = phi.support().lo[0], b = phi.support().hi[0];
    if (!rep.domain().periodic()) {
        if (!(a > rep.domain().lo(0) && b < rep.domain().hi(0)))
            throw DomainError("pair: test function support not inside the chart domain");
    }
    // seed breakpoints at pulse edges so adaptive bisection finds eps-width
    // features immediately instead of through deep uniform refinement
    std::vector<double> breaks;
    for (const KernelFeature& f : kernelFeatures(rep.comp())) {
        const double c = f.center(eps), hw = f.halfWidth(eps);
        for (double p : {c - hw, c, c + hw})
            if (p > a && p < b) breaks.push_back(p);
    }
    const Expr integrand = mul(rep.comp(), phi.expr());
    return quad::adaptive([&](double x) { return evalExpr1(integrand, x, eps); }, a, b,
                          1e-10, breaks);
}

namespace {

bool cauchyTail(const std::vector<double>& v, size_t count, double tol) {
    if (v.size() < count) return false;
    for (size_t j = v.size() - count; j + 1 < v.size(); ++j)
        if (std::abs(v[j + 1] - v[j]) > tol) return false;
    return true;
}

}  // namespace

AssociatedLimit associatedLimit(const Representative& rep, const TestFunction& phi,
                                const EpsilonGrid& grid, double tolAssoc) {
    AssociatedLimit out;
    for (double eps : grid.values()) out.values.push_back(pair(rep, phi, eps));

    if (cauchyTail(out.values, 5, tolAssoc)) {
        out.converged = true;
        out.limit = out.values.back();
        return out;
    }
    // O(eps^s) tails give geometric differences along a geometric grid;
    // one Aitken pass removes the leading term
    std::vector<double> acc = aitkenAccelerate(out.values);
    if (cauchyTail(acc, 5, tolAssoc)) {
        out.converged = true;
        out.accelerated = true;
        out.limit = acc.back();
        return out;
    }
    out.limit = out.values.back();
    return out;
}

Verdict isAssociated(const Representative& u, const Representative& v,
                     const std::vector<TestFunction>& battery, const EpsilonGrid& grid,
                     double tolAssoc) {
    const Representative d = sub(u, v);
    bool anyInconclusive = false;
    for (const TestFunction& phi : battery) {
        AssociatedLimit lim = associatedLimit(d, phi, grid, tolAssoc);
        if (!lim.converged) {
            anyInconclusive = true;
            continue;
        }
        if (std::abs(lim.limit) > tolAssoc) return Verdict::No;
    }
    return anyInconclusive ? Verdict::Inconclusive : Verdict::Yes;
}

Verdict ckAssociated(const Representative& u, const Representative& v, int k,
                     const Box& K, const EpsilonGrid& grid) {
    const Representative d = sub(u, v);
    std::vector<std::vector<int>> alphas;
    const int dim = d.domain().dim();
    {
        // all |alpha| <= k
        std::vector<int> cur(static_cast<size_t>(dim), 0);
        while (true) {
            int total = 0;
            for (int c : cur) total += c;
            if (total <= k) alphas.push_back(cur);
            int i = dim - 1;
            while (i >= 0 && cur[static_cast<size_t>(i)] == k) {
                cur[static_cast<size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
            ++cur[static_cast<size_t>(i)];
        }
    }

    bool anyInconclusive = false;
    for (const auto& a : alphas) {
        std::vector<double> sup = supOnCompact(d, K, a, grid);
        const size_t n = sup.size();
        const double last = sup.back();
        bool monotoneTail = true;
        for (size_t j = n - 5; j + 1 < n; ++j)
            if (sup[j + 1] > sup[j] * (1 + 1e-9) + 1e-12) monotoneTail = false;
        if (last <= 1e-4 && monotoneTail) continue;  // this order converges
        // bounded away from zero with no downward trend: refuted
        if (last > 1e-2 && sup[n - 5] <= last * (1 + 1e-6) + 1e-12)
            return Verdict::No;
        anyInconclusive = true;
    }
    return anyInconclusive ? Verdict::Inconclusive : Verdict::Yes;
}

}  // namespace gf
