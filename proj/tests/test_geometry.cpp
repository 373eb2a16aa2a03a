#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gf/geometry.hpp"

using namespace gf;

namespace {

const EpsilonGrid grid = EpsilonGrid::standard();

GeneralizedMetric minkowski() {
    const ChartDomain dom = ChartDomain::box({-2, -2, -2, -2}, {2, 2, 2, 2});
    std::vector<Expr> c(16, constant(0.0));
    c[0] = constant(-1);
    c[5] = constant(1);
    c[10] = constant(1);
    c[15] = constant(1);
    return checkMetric(Representative::matrixValued(c, 4, dom), grid,
                       Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
}

GeneralizedMetric sphere() {
    // round sphere in polar coordinates: diag(1, sin^2 theta)
    const ChartDomain dom = ChartDomain::box({0.2, -3.0}, {2.9, 3.0});
    const Representative g = Representative::matrixValued(
        {constant(1), constant(0), constant(0), powi(sinE(var(0)), 2)}, 2, dom);
    return checkMetric(g, grid, Box::of({0.4, -2}, {2.7, 2}), 32);
}

}  // namespace

TEST_CASE("flat metric: vanishing connection and curvature, straight geodesics") {
    const GeneralizedMetric G = minkowski();
    CHECK(G.index() == 1);
    const double x[4] = {0.1, 0.2, 0.3, 0.4};
    for (double v : christoffel(G, 0.1, std::span<const double>(x, 4)))
        CHECK(std::abs(v) <= 1e-14);
    for (double v : riemann(G, 0.1, std::span<const double>(x, 4)))
        CHECK(std::abs(v) <= 1e-10);
    const double p0[4] = {0, 0, 0, 0}, v0[4] = {1, 0.5, -0.3, 0.2};
    const auto sol = geodesic(G, std::span<const double>(p0, 4),
                              std::span<const double>(v0, 4), 0.1, 0.0, 1.0);
    const auto y = sol.at(1.0);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(y[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(y[2] == doctest::Approx(-0.3).epsilon(1e-10));
    CHECK(y[3] == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("round sphere: classical Christoffel symbols and curvature 1") {
    const GeneralizedMetric G = sphere();
    CHECK(G.index() == 0);
    const double theta = 0.9;
    const double x[2] = {theta, 0.4};
    const auto gam = christoffel(G, 0.1, std::span<const double>(x, 2));
    // Gamma^theta_phiphi = -sin cos, Gamma^phi_thetaphi = cot
    CHECK(gam[(0 * 2 + 1) * 2 + 1] ==
          doctest::Approx(-std::sin(theta) * std::cos(theta)).epsilon(1e-9));
    CHECK(gam[(1 * 2 + 0) * 2 + 1] ==
          doctest::Approx(std::cos(theta) / std::sin(theta)).epsilon(1e-9));
    // torsion-free: exact symmetry of the computed doubles
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(gam[(k * 2 + i) * 2 + j] == gam[(k * 2 + j) * 2 + i]);
    // sectional curvature 1
    const auto R = riemann(G, 0.1, std::span<const double>(x, 2));
    const double R0101 = R[((0 * 2 + 1) * 2 + 0) * 2 + 1];  // g00 = 1 lowers for free
    CHECK(R0101 / std::pow(std::sin(theta), 2) == doctest::Approx(1.0).epsilon(1e-7));
    // Ricci = g on the unit sphere
    const auto Ric = ricci(G, 0.1, std::span<const double>(x, 2));
    CHECK(Ric[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(Ric[3] == doctest::Approx(std::pow(std::sin(theta), 2)).epsilon(1e-7));
}

TEST_CASE("metric gatekeeping rejects diag(x^2, 1) over a box containing 0") {
    const ChartDomain dom = ChartDomain::box({-2, -2}, {2, 2});
    const Representative g = Representative::matrixValued(
        {powi(var(0), 2), constant(0), constant(0), constant(1)}, 2, dom);
    CHECK_THROWS_AS(checkMetric(g, grid, Box::of({-1, -1}, {1, 1}), 32), MetricError);
}

TEST_CASE("non-symmetric matrices are rejected") {
    const ChartDomain dom = ChartDomain::box({-2, -2}, {2, 2});
    const Representative g = Representative::matrixValued(
        {constant(1), var(0), constant(0), constant(1)}, 2, dom);
    CHECK_THROWS_AS(checkMetric(g, grid, Box::of({-1, -1}, {1, 1}), 32), MetricError);
}

TEST_CASE("impulsive wave metric: det -1/4, index 1, distributional curvature") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const Expr f = sub(powi(var(0), 2), powi(var(1), 2));
    const GeneralizedMetric G = checkMetric(ppWaveMetric(f, rho), grid,
                                            Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    CHECK(G.index() == 1);
    const double origin[4] = {0, 0, 0, 0};
    CHECK(evalExpr(G.det(), std::span<const double>(origin, 4), 0.3) ==
          doctest::Approx(-0.25).epsilon(1e-14));

    // R_uu = -(1/2) lap(f) rho_eps(u) exactly; zero for the vacuum profile
    const double eps = 0.1;
    const double x[4] = {0.0, 0.0, 1.0, 1.0};
    CHECK(std::abs(ricci(G, eps, std::span<const double>(x, 4))[0]) <= 1e-9);

    const GeneralizedMetric GMat =
        checkMetric(ppWaveMetric(add(powi(var(0), 2), powi(var(1), 2)), rho), grid,
                    Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    for (double u : {0.0, 0.03, -0.05}) {
        const double xs[4] = {u, 0.0, 1.0, 1.0};
        const double pulse = evalExpr1(rho.kernel(), u / eps, 1.0) / eps;
        CHECK(ricci(GMat, eps, std::span<const double>(xs, 4))[0] ==
              doctest::Approx(-0.5 * 4.0 * pulse).epsilon(1e-7));
    }
}

TEST_CASE("metric compatibility along 10 random curves") {
    // property (iv): d/dt g(xi, eta) = g(xi', eta) + g(xi, eta') for the
    // induced covariant derivative, checked by central differences
    const Mollifier rho = Mollifier::make(2, 0.8);
    const Expr f = sub(powi(var(0), 2), powi(var(1), 2));
    const GeneralizedMetric G = checkMetric(ppWaveMetric(f, rho), grid,
                                            Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    const double eps = 0.3;
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(4), b(4), s(4), e(4);
        for (int i = 0; i < 4; ++i) {
            a[i] = coef(rng);
            b[i] = coef(rng);
            s[i] = coef(rng);
            e[i] = coef(rng);
        }
        Curve gamma;
        gamma.pos = [a, b](double t) {
            std::vector<double> x(4);
            for (int i = 0; i < 4; ++i) x[i] = a[i] + b[i] * t + 0.1 * std::sin(t + i);
            return x;
        };
        gamma.vel = [b](double t) {
            std::vector<double> v(4);
            for (int i = 0; i < 4; ++i) v[i] = b[i] + 0.1 * std::cos(t + i);
            return v;
        };
        CurveVectorField xi, eta;
        xi.value = [s](double t) {
            std::vector<double> v(4);
            for (int i = 0; i < 4; ++i) v[i] = s[i] * std::cos(0.5 * t) + 0.2 * i;
            return v;
        };
        eta.value = [e](double t) {
            std::vector<double> v(4);
            for (int i = 0; i < 4; ++i) v[i] = e[i] + 0.3 * std::sin(0.7 * t);
            return v;
        };
        const CurveVectorField dxi = inducedCovariantDerivative(G, eps, gamma, xi);
        const CurveVectorField deta = inducedCovariantDerivative(G, eps, gamma, eta);

        auto inner = [&](double t, const std::vector<double>& u,
                         const std::vector<double>& v) {
            const std::vector<double> x = gamma.pos(t);
            const std::vector<double> g = G.value(eps, x);
            double sum = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) sum += g[i * 4 + j] * u[i] * v[j];
            return sum;
        };
        for (double t : {0.2, 0.8}) {
            const double h = 1e-5;
            const double lhs = (inner(t + h, xi.value(t + h), eta.value(t + h)) -
                                inner(t - h, xi.value(t - h), eta.value(t - h))) /
                               (2 * h);
            const double rhs =
                inner(t, dxi.value(t), eta.value(t)) + inner(t, xi.value(t), deta.value(t));
            CHECK(std::abs(lhs - rhs) <= 1e-6);
        }
    }
}

TEST_CASE("geodesics conserve their energy g(gammadot, gammadot)") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const Expr f = sub(powi(var(0), 2), powi(var(1), 2));
    const GeneralizedMetric G = checkMetric(ppWaveMetric(f, rho), grid,
                                            Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    const double eps = 0.05;
    const double p0[4] = {-1, 0, 1, 1}, v0[4] = {1, 0.3, 0.1, 0};
    const auto sol = geodesic(G, std::span<const double>(p0, 4),
                              std::span<const double>(v0, 4), eps, 0.0, 2.0);
    auto energy = [&](double t) {
        const std::vector<double> y = sol.at(t);
        const std::vector<double> g =
            G.value(eps, std::span<const double>(y.data(), 4));
        double sum = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) sum += g[i * 4 + j] * y[4 + i] * y[4 + j];
        return sum;
    };
    const double e0 = energy(0.0);
    const double scale = std::max(1.0, std::abs(e0));
    for (double t = 0.1; t <= 2.0; t += 0.1)
        CHECK(std::abs(energy(t) - e0) <= 1e-8 * scale);
}

TEST_CASE("impulsive geodesics refract; the limit is a broken straight line") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const Expr f = sub(powi(var(0), 2), powi(var(1), 2));
    const GeneralizedMetric G = checkMetric(ppWaveMetric(f, rho), grid,
                                            Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    const double p0[4] = {-1, 0, 1, 1}, v0[4] = {1, 0, 0, 0};
    const GeodesicNet net = geodesicNet(G, std::span<const double>(p0, 4),
                                        std::span<const double>(v0, 4), grid, 0.0, 2.0);
    CHECK(net.cBounded);
    CHECK(net.limitCauchy);
    // jump of xdot across the pulse -> (1/2) d_x f = x(0) ~ 1
    std::vector<double> jumps;
    for (const auto& c : net.curves) jumps.push_back(c.at(1.5)[6] - c.at(0.5)[6]);
    const double jump = aitkenAccelerate(jumps).back();
    const double expected = net.curves.back().at(1.0)[2];
    CHECK(jump == doctest::Approx(expected).epsilon(0.02));
}
