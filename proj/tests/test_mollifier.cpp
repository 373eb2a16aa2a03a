#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "gf/errors.hpp"
#include "gf/mollifier.hpp"

using namespace gf;

namespace {

// Test-local composite Simpson rule in long double: an oracle independent of
// the library's Gauss-Kronrod quadrature.
long double simpson(const std::function<long double(long double)>& f, long double a,
                    long double b, int n) {
    if (n % 2) ++n;
    const long double h = (b - a) / n;
    long double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0L : 2.0L);
    return s * h / 3.0L;
}

double kernelAt(const Mollifier& rho, double y) { return evalExpr1(rho.kernel(), y, 1.0); }

double evalRep(const Representative& r, double eps, double x) {
    return r.evalScalar(eps, std::span<const double>(&x, 1));
}

}  // namespace

TEST_CASE("kernel moments: unit mass and q vanishing moments (Simpson oracle)") {
    for (int q : {2, 4, 6}) {
        const Mollifier rho = Mollifier::make(q, 0.8);
        const double R = rho.radius();
        for (int k = 0; k <= q; ++k) {
            const long double mk = simpson(
                [&](long double y) {
                    return std::pow(y, (long double)k) *
                           (long double)kernelAt(rho, (double)y);
                },
                -R, R, 4000);
            if (k == 0)
                CHECK(std::abs((double)mk - 1.0) <= 1e-9);
            else
                CHECK(std::abs((double)mk) <= 1e-9);
            CHECK(rho.moment(k) == doctest::Approx((double)mk).epsilon(1e-8));
        }
    }
}

TEST_CASE("mollifier parameter validation") {
    CHECK_THROWS_AS(Mollifier::make(9, 0.8), ParameterError);
    CHECK_THROWS_AS(Mollifier::make(2, -1.0), ParameterError);
}

TEST_CASE("delta embedding is the scaled kernel exactly") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative d = embedDistribution(parseDistribution("delta"), rho, dom);
    for (double eps : {0.5, 0.1, 0.01})
        for (double x : {0.0, 0.3 * eps, -0.7 * eps, 1.0}) {
            const double expected = kernelAt(rho, x / eps) / eps;
            CHECK(evalRep(d, eps, x) == doctest::Approx(expected).epsilon(1e-13));
        }
}

TEST_CASE("heaviside embedding equals the direct convolution (oracle)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative h = embedDistribution(parseDistribution("heaviside"), rho, dom);
    const double R = rho.radius();
    for (double eps : {0.3, 0.05})
        for (double x : {-1.0, -0.1, 0.0, 0.02, 0.4, 1.0}) {
            // (H * rho_eps)(x) = int_{-R}^{x/eps} rho
            const long double lo = -R, hi = std::min((long double)(x / eps), (long double)R);
            long double expected = 0.0L;
            if (hi > lo)
                expected = simpson([&](long double y) { return (long double)kernelAt(rho, (double)y); },
                                   lo, hi, 4000);
            if (x / eps >= R) expected = 1.0L;
            CHECK(evalRep(h, eps, x) == doctest::Approx((double)expected).epsilon(1e-9));
        }
}

TEST_CASE("abs and sign embeddings match direct convolution (oracle)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative a = embedDistribution(parseDistribution("abs"), rho, dom);
    const Representative s = embedDistribution(parseDistribution("sign"), rho, dom);
    const double R = rho.radius();
    for (double eps : {0.3, 0.05})
        for (double x : {-0.9, -0.03, 0.0, 0.05, 0.6}) {
            const long double absOracle = simpson(
                [&](long double y) {
                    return std::abs((long double)x - eps * y) *
                           (long double)kernelAt(rho, (double)y);
                },
                -R, R, 8000);
            const long double signOracle = simpson(
                [&](long double y) {
                    const long double t = (long double)x - eps * y;
                    return (t > 0 ? 1.0L : t < 0 ? -1.0L : 0.0L) *
                           (long double)kernelAt(rho, (double)y);
                },
                -R, R, 20000);
            CHECK(evalRep(a, eps, x) == doctest::Approx((double)absOracle).epsilon(1e-7));
            CHECK(evalRep(s, eps, x) ==
                  doctest::Approx((double)signOracle).epsilon(5e-4).scale(1.0));
        }
}

TEST_CASE("piecewise polynomial embedding matches direct convolution (oracle)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative pp =
        embedDistribution(parseDistribution("pp[(-1,0):0; (0,1):x^2]"), rho, dom);
    const double R = rho.radius();
    auto w = [](long double t) { return (t > 0 && t < 1) ? t * t : 0.0L; };
    for (double eps : {0.2, 0.04})
        for (double x : {-0.5, -0.01, 0.0, 0.03, 0.5, 0.95}) {
            const long double oracle = simpson(
                [&](long double y) {
                    return w((long double)x - eps * y) * (long double)kernelAt(rho, (double)y);
                },
                -R, R, 20000);
            // the jump of w at 1 limits the Simpson oracle to ~1e-4 here
            CHECK(evalRep(pp, eps, x) ==
                  doctest::Approx((double)oracle).epsilon(2e-4).scale(1.0));
        }
}

TEST_CASE("smooth embedding equals the direct convolution (oracle)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative io =
        embedDistribution(parseDistribution("smooth((sin x0))"), rho, dom);
    const double R = rho.radius();
    for (double eps : {0.4, 0.1, 0.02})
        for (double x : {-0.8, 0.0, 0.7}) {
            const long double oracle = simpson(
                [&](long double y) {
                    return std::sin((long double)x - eps * y) *
                           (long double)kernelAt(rho, (double)y);
                },
                -R, R, 4000);
            CHECK(evalRep(io, eps, x) == doctest::Approx((double)oracle).epsilon(1e-11));
        }
}

TEST_CASE("iota(smooth) - sigma(smooth) decays like eps^(q+2)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative d =
        sub(embedDistribution(parseDistribution("smooth((sin x0))"), rho, dom),
            embedSmooth(parseExpr("(sin x0)"), dom));
    const double x = 0.7;
    double prev = 0;
    for (double eps : {0.2, 0.02, 0.002}) {
        const double v = std::abs(evalRep(d, eps, x));
        if (prev > 0) CHECK(v <= prev * std::pow(10.0, -5.5));  // ~eps^6 per decade
        prev = v;
        CHECK(v > 0.0);  // nonzero: iota and sigma differ in the algebra
    }
}

TEST_CASE("principal value embedding matches the symmetrized oracle") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative pv = embedDistribution(parseDistribution("pv_inv"), rho, dom);
    const double R = rho.radius();
    for (double eps : {0.3, 0.08})
        for (double x : {1.0, 0.3, 0.05, 0.0, -0.4}) {
            // pv int rho_eps(x - y)/y dy = int_0^inf (rho_eps(x-y) - rho_eps(x+y))/y dy
            auto rhoEps = [&](long double t) {
                return (long double)kernelAt(rho, (double)(t / eps)) / eps;
            };
            const long double upper = std::abs((long double)x) + eps * R + 0.1L;
            const long double oracle = simpson(
                [&](long double y) {
                    if (y < 1e-14L) y = 1e-14L;
                    return (rhoEps((long double)x - y) - rhoEps((long double)x + y)) / y;
                },
                0.0L, upper, 60000);
            CHECK(evalRep(pv, eps, x) ==
                  doctest::Approx((double)oracle).epsilon(1e-6).scale(1.0 / eps));
        }
}

TEST_CASE("derivative compatibility: d/dx iota(H) = iota(delta)") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-2, 2);
    const Representative h = embedDistribution(parseDistribution("heaviside"), rho, dom);
    const Representative d = embedDistribution(parseDistribution("delta"), rho, dom);
    const Representative hp = h.derive(std::vector<int>{1});
    for (double eps : {0.3, 0.05})
        for (double x : {-0.2, 0.0, 0.03, 0.5})
            CHECK(evalRep(hp, eps, x) ==
                  doctest::Approx(evalRep(d, eps, x)).epsilon(1e-12).scale(1.0 / eps));
}

TEST_CASE("distribution parser: linear combinations and errors") {
    const DistributionSpec spec = parseDistribution("2*delta'' - 0.5*heaviside");
    REQUIRE(spec.terms.size() == 2);
    CHECK(spec.terms[0].kind == DistTerm::Kind::DiracDelta);
    CHECK(spec.terms[0].deltaOrder == 2);
    CHECK(spec.terms[0].coeff == doctest::Approx(2.0));
    CHECK(spec.terms[1].kind == DistTerm::Kind::Heaviside);
    CHECK(spec.terms[1].coeff == doctest::Approx(-0.5));
    CHECK_THROWS_AS(parseDistribution("frobnicate"), ParseError);
    CHECK_THROWS_AS(parseDistribution("pp[(0,1):x^]"), ParseError);
}

TEST_CASE("embedding preconditions") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    // breakpoint too close to the domain edge for the eps_max * R margin
    const ChartDomain tight = ChartDomain::interval(-0.1, 2.0);
    CHECK_THROWS_AS(embedDistribution(parseDistribution("heaviside"), rho, tight),
                    DomainError);
    // sigma rejects eps-dependent input: it embeds functions, not nets
    CHECK_THROWS_AS(embedSmooth(mul(var(0), epsilon()), ChartDomain::interval(-1, 1)),
                    ParameterError);
}
