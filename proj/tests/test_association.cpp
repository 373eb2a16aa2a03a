#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "gf/association.hpp"
#include "gf/mollifier.hpp"

using namespace gf;

namespace {

const EpsilonGrid grid = EpsilonGrid::standard();

// Test-local composite Simpson oracle, independent of the library quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("the default battery covers K with admissible bumps") {
    const Box K = Box::interval(-2, 2);
    const auto battery = defaultBattery(K);
    CHECK(battery.size() == 12);
    for (const auto& phi : battery) {
        CHECK(phi.support().lo[0] >= K.lo[0] - 1e-12);
        CHECK(phi.support().hi[0] <= K.hi[0] + 1e-12);
        const double c = 0.5 * (phi.support().lo[0] + phi.support().hi[0]);
        CHECK(phi(c) > 0.0);
        CHECK(phi(phi.support().lo[0] - 0.01) == 0.0);
    }
}

TEST_CASE("pairing equals the Simpson oracle") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const TestFunction phi = TestFunction::bumpAt(0.0, 1.0);

    const Representative sig = embedSmooth(parseExpr("(sin x0)"), dom);
    const Representative del = embedDistribution(parseDistribution("delta"), rho, dom);
    for (double eps : {0.5, 0.1}) {
        const double oSig = simpson(
            [&](double x) {
                return sig.evalScalar(eps, std::span<const double>(&x, 1)) * phi(x);
            },
            -1.0, 1.0, 20000);
        CHECK(pair(sig, phi, eps) == doctest::Approx(oSig).epsilon(1e-9));
        const double oDel = simpson(
            [&](double x) {
                return del.evalScalar(eps, std::span<const double>(&x, 1)) * phi(x);
            },
            -0.81 * eps, 0.81 * eps, 40000);
        CHECK(pair(del, phi, eps) == doctest::Approx(oDel).epsilon(1e-9));
    }
}

TEST_CASE("pairing resolves eps-width spikes at every grid eps") {
    // int delta_eps phi must stay ~phi(0), not collapse to 0 once the spike
    // falls between naive quadrature nodes
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Representative del = embedDistribution(parseDistribution("delta"), rho, dom);
    const TestFunction phi = TestFunction::bumpAt(0.0, 1.0);
    CHECK(pair(del, phi, grid.smallest()) == doctest::Approx(phi(0.0)).epsilon(1e-6));
}

TEST_CASE("association identities from the worked examples") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Box K = Box::interval(-2, 2);
    const auto battery = defaultBattery(K);

    const Representative zero = Representative::scalar(constant(0.0), dom);
    const Representative del = embedDistribution(parseDistribution("delta"), rho, dom);
    const Representative H = embedDistribution(parseDistribution("heaviside"), rho, dom);
    const Representative x = Representative::scalar(var(0), dom);

    CHECK(isAssociated(mul(x, del), zero, battery, grid) == Verdict::Yes);
    CHECK(isAssociated(mul(H, H), H, battery, grid) == Verdict::Yes);
    CHECK(isAssociated(mul(mul(H, H), H), H, battery, grid) == Verdict::Yes);
    CHECK(isAssociated(del, zero, battery, grid) == Verdict::No);
}

TEST_CASE("associated limits: delta -> phi(0), x*delta -> 0") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Representative del = embedDistribution(parseDistribution("delta"), rho, dom);
    const Representative x = Representative::scalar(var(0), dom);
    const TestFunction phi = TestFunction::bumpAt(0.0, 1.0);

    const AssociatedLimit l1 = associatedLimit(del, phi, grid);
    CHECK(l1.converged);
    CHECK(l1.limit == doctest::Approx(phi(0.0)).epsilon(1e-6));

    const AssociatedLimit l2 = associatedLimit(mul(x, del), phi, grid);
    CHECK(l2.converged);
    CHECK(std::abs(l2.limit) <= 1e-6);

    // off-center bump: delta pairs to phi(0) = 0 when 0 is outside the support
    const TestFunction away = TestFunction::bumpAt(1.5, 0.3);
    const AssociatedLimit l3 = associatedLimit(del, away, grid);
    CHECK(l3.converged);
    CHECK(std::abs(l3.limit) <= 1e-12);
}

TEST_CASE("C^k association separates uniform orders") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const Box K = Box::interval(-2, 2);

    const Representative ios =
        embedDistribution(parseDistribution("smooth((sin x0))"), rho, dom);
    const Representative sig = embedSmooth(parseExpr("(sin x0)"), dom);
    CHECK(ckAssociated(ios, sig, 2, K, grid) == Verdict::Yes);

    // H is associated to 1/2 nowhere uniformly: C^0 association must refute
    const Representative H = embedDistribution(parseDistribution("heaviside"), rho, dom);
    const Representative half = Representative::scalar(constant(0.5), dom);
    CHECK(ckAssociated(H, half, 0, K, grid) == Verdict::No);
}
