#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gf/flows.hpp"

using namespace gf;

namespace {

const EpsilonGrid grid = EpsilonGrid::standard();

GeneralizedVectorField slowScaleField(const Mollifier& rho) {
    const TorusExampleReport rep = torusExample(rho, grid);
    return rep.field;
}

}  // namespace

TEST_CASE("c-boundedness: identity yes, eps-shift yes, 1/eps blowup refuted") {
    const ChartDomain dom = ChartDomain::interval(-10, 10);
    const Box K = Box::interval(-1, 1);
    CHECK(cBounded(Representative::scalar(var(0), dom), K, grid).verdict == Verdict::Yes);
    CHECK(cBounded(Representative::scalar(add(var(0), epsilon()), dom), K, grid).verdict ==
          Verdict::Yes);
    const Representative blow = Representative::scalar(
        certifiedDiv(var(0), constant(0.0), DivCertificate{1, 1.0}), dom);
    const CBoundedReport r = cBounded(blow, Box::interval(0.5, 1), grid);
    CHECK(r.verdict == Verdict::No);
    REQUIRE_FALSE(r.witness.empty());
    CHECK(r.witness[0] >= 0.5);
}

TEST_CASE("slow-scale torus flow matches its closed form on every grid eps") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const TorusExampleReport rep = torusExample(rho, grid);
    CHECK(rep.worstClosedForm <= 1e-6);
    REQUIRE(rep.supVsClosedForm.size() == static_cast<size_t>(grid.size()));
}

TEST_CASE("the flow converges pointwise to the discontinuous limit off the pulse") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const TorusExampleReport rep = torusExample(rho, grid);
    CHECK(rep.limitDistanceAtSmallestEps <= 1e-6);
    CHECK(rep.limitDistances.front() > rep.limitDistanceAtSmallestEps);
}

TEST_CASE("field growth matches the slow scale: |log eps| and |log eps|^2") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const FlowConditionsReport fc = checkFlowConditions(slowScaleField(rho), grid);
    CHECK(fc.supField.back() > fc.supField.front());
    CHECK(fc.fieldLogCoeff > 0.5);
    CHECK(fc.derivLog2Coeff > 0.5);
}

TEST_CASE("flow identities: Phi(0, .) = id and the group property") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const GeneralizedVectorField xi = slowScaleField(rho);
    const EpsilonGrid small(0.5, 0.7, 8);
    const std::vector<std::vector<double>> lattice = {{0.7, 0.3}, {2.5, 4.0}, {5.0, 1.0}};
    const GeneralizedFlow phi = flowNet(xi, small, 0.0, 2.0, lattice);
    const FlowIdentityReport ids = flowIdentities(xi, phi);
    CHECK(ids.maxIdentityResidual <= 1e-6);
    CHECK(ids.maxGroupResidual <= 1e-6);
}

TEST_CASE("flow reversal returns to the start") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const GeneralizedVectorField xi = slowScaleField(rho);
    const std::vector<double> x0{1.3, 0.4};
    for (double eps : {0.3, 0.05}) {
        const std::vector<double> fwd = flow(xi, eps, 1.7, x0);
        const std::vector<double> back = flow(xi, eps, -1.7, fwd);
        CHECK(xi.chart.distance(back, x0) <= 1e-7);
    }
}

TEST_CASE("composition consistency at a single point") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const GeneralizedVectorField xi = slowScaleField(rho);
    const std::vector<double> x0{0.9, 2.1};
    for (double eps : {0.2, 0.04}) {
        const std::vector<double> oneShot = flow(xi, eps, 1.5, x0);
        const std::vector<double> twoStep = flow(xi, eps, 0.9, flow(xi, eps, 0.6, x0));
        CHECK(xi.chart.distance(oneShot, twoStep) <= 1e-7);
    }
}

TEST_CASE("equivalence of map-valued nets") {
    const ChartDomain dom = ChartDomain::interval(-5, 5);
    const Box K = Box::interval(-1, 1);
    const Representative u = Representative::scalar(var(0), dom);
    const Representative v = Representative::scalar(add(var(0), powi(epsilon(), 3)), dom);
    CHECK(mapEquivalent(u, v, K, 3, grid) == Verdict::Yes);
    CHECK(mapEquivalent(u, u, K, 8, grid) == Verdict::Yes);
    // a 1/|log eps| perturbation is slower than any eps power
    const Expr sig = certifiedDiv(constant(1.0), sub(neg(logE(epsilon())), constant(0.5)),
                                  DivCertificate{0, 0.5});
    const Representative w = Representative::scalar(add(var(0), sig), dom);
    CHECK(mapEquivalent(u, w, K, 1, grid) == Verdict::No);
}
