#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gf/asymptotics.hpp"
#include "gf/mollifier.hpp"

using namespace gf;

namespace {

const EpsilonGrid grid = EpsilonGrid::standard();

Representative scalarRep(const Expr& e, double lo = -3, double hi = 3) {
    return Representative::scalar(e, ChartDomain::interval(lo, hi));
}

}  // namespace

TEST_CASE("fitOrder recovers exact power laws") {
    std::vector<double> v;
    for (double eps : grid.values()) v.push_back(3.0 * std::pow(eps, 2.5));
    const OrderEstimate est = fitOrder(v, grid);
    CHECK(est.usable);
    CHECK(est.slope == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(est.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-8));
    CHECK(est.residual <= 1e-10);
}

TEST_CASE("fitOrder flags the identically-zero net") {
    const std::vector<double> v(static_cast<size_t>(grid.size()), 0.0);
    const OrderEstimate est = fitOrder(v, grid);
    CHECK(est.zeroNet);
}

TEST_CASE("supOnCompact: closed-form scaling oracle") {
    // u_eps(x) = x^2 / eps^2 on [-1, 1]: sup = eps^-2 exactly
    const Expr u = certifiedDiv(powi(var(0), 2), constant(0.0), DivCertificate{2, 1.0});
    const auto sup = supOnCompact(scalarRep(u), Box::interval(-1, 1), {0}, grid);
    for (int j = 0; j < grid.size(); ++j)
        CHECK(sup[static_cast<size_t>(j)] ==
              doctest::Approx(1.0 / (grid[j] * grid[j])).epsilon(1e-10));
}

TEST_CASE("supOnCompact finds moving shrinking pulses (feature seeding)") {
    // phi_eps(x - eps): a spike of height phi(0)/eps at x = eps. A fixed
    // lattice misses it at small eps; the kernel-feature seeding must not.
    const Mollifier rho = Mollifier::make(4, 0.8);
    const Expr pulse = conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1,
                            sub(var(0), epsilon()), epsilon());
    const double peak = evalExpr1(rho.kernel(), 0.0, 1.0);
    const auto sup = supOnCompact(scalarRep(pulse, -2, 2), Box::interval(-1, 1), {0}, grid);
    for (int j = 0; j < grid.size(); ++j)
        CHECK(sup[static_cast<size_t>(j)] ==
              doctest::Approx(peak / grid[j]).epsilon(1e-6));
}

TEST_CASE("iota(delta) derivative sup-norms scale like eps^-(k+1)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Representative d = embedDistribution(parseDistribution("delta"), rho, dom);
    for (int k = 0; k <= 2; ++k) {
        const auto sup = supOnCompact(d, Box::interval(-1, 1), {k}, grid);
        const OrderEstimate est = fitOrder(sup, grid);
        CHECK(est.usable);
        CHECK(std::abs(est.slope + (k + 1)) <= 0.1);
        // closed form: sup = max|rho^(k)| / eps^(k+1)
        double peak = 0;
        for (int i = 0; i <= 2000; ++i) {
            const double y = -0.8 + 1.6 * i / 2000.0;
            peak = std::max(peak, std::abs(evalExpr1(rho.kernelDeriv(k), y, 1.0)));
        }
        CHECK(sup[0] ==
              doctest::Approx(peak / std::pow(grid[0], k + 1)).epsilon(1e-3));
    }
}

TEST_CASE("classification of the standard examples") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Representative d = embedDistribution(parseDistribution("delta"), rho, dom);

    const Classification cm = classifyModerate(d, Box::interval(-1, 1), 2, grid);
    CHECK(cm.verdict == Verdict::Yes);
    CHECK(cm.order == 3);  // worst slope -(2+1) over |alpha| <= 2

    const Representative h = embedDistribution(parseDistribution("heaviside"), rho, dom);
    const Representative hh = sub(mul(h, h), h);
    const Classification cn = classifyNegligible(hh, Box::interval(-2, 2), 1, grid, true);
    CHECK(cn.verdict == Verdict::No);
    CHECK(std::abs(cn.worstSlope) <= 0.05);  // constant-size sup, slope ~0

    const Representative smoothDiff =
        sub(embedDistribution(parseDistribution("smooth((sin x0))"), rho, dom),
            embedSmooth(parseExpr("(sin x0)"), dom));
    const Classification cg =
        classifyNegligible(smoothDiff, Box::interval(-2, 2), 4, grid, true);
    CHECK(cg.verdict == Verdict::Yes);
    CHECK(cg.worstSlope >= 4.5);
    CHECK(cg.worstResidual <= 0.15);
}

TEST_CASE("super-polynomial growth and decay are classified, not fitted blindly") {
    // exp(1/eps) is not moderate
    const Expr growth = expE(certifiedDiv(constant(1.0), constant(0.0), DivCertificate{1, 1.0}));
    const Classification cm = classifyModerate(scalarRep(growth), Box::interval(-1, 1), 0, grid);
    CHECK(cm.verdict == Verdict::No);
    // exp(-1/eps) is negligible at every order
    const Expr decay = expE(neg(certifiedDiv(constant(1.0), constant(0.0), DivCertificate{1, 1.0})));
    const Classification cn =
        classifyNegligible(scalarRep(decay), Box::interval(-1, 1), 6, grid, true);
    CHECK(cn.verdict == Verdict::Yes);
}

TEST_CASE("Aitken acceleration collapses geometric error terms") {
    std::vector<double> v;
    for (int j = 0; j < 20; ++j) v.push_back(4.0 + 2.0 * std::pow(0.7, j));
    const auto acc = aitkenAccelerate(v);
    CHECK(acc.back() == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("generalized numbers: point evaluation and invertibility") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative u = Representative::scalar(
        conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, sub(var(0), epsilon()),
             epsilon()),
        dom);

    // classical points: the pulse has moved past them, values vanish exactly
    for (double p : {0.0, 0.3, -0.3}) {
        const GeneralizedNumber gn = pointEval(u, GeneralizedPoint::classical({p}));
        CHECK(gn.at(grid.smallest()) == 0.0);
        CHECK(gn.at(grid[grid.size() / 2]) == 0.0);
    }

    // the moving point p = [(eps)] rides the pulse: values grow like 1/eps
    const GeneralizedPoint moving({epsilon()}, Box::interval(0, 0.5), grid);
    const GeneralizedNumber gn = pointEval(u, moving);
    std::vector<double> vals;
    for (double eps : grid.values()) vals.push_back(std::abs(gn.at(eps)));
    const OrderEstimate est = fitOrder(vals, grid);
    CHECK(est.usable);
    CHECK(std::abs(est.slope + 1.0) <= 0.1);

    CHECK(isInvertibleNumber(GeneralizedNumber(powi(epsilon(), 2)), grid) == Verdict::Yes);
    CHECK(isInvertibleNumber(GeneralizedNumber(constant(-0.25)), grid) == Verdict::Yes);
    const Expr flat =
        expE(neg(certifiedDiv(constant(1.0), constant(0.0), DivCertificate{1, 1.0})));
    CHECK(isInvertibleNumber(GeneralizedNumber(flat), grid) != Verdict::Yes);
}

TEST_CASE("generalized points must stay in their support box") {
    CHECK_THROWS_AS(GeneralizedPoint({constant(7.0)}, Box::interval(-1, 1), grid),
                    DomainError);
    CHECK_THROWS_AS(GeneralizedPoint({var(0)}, Box::interval(-1, 1), grid),
                    ParameterError);
}
