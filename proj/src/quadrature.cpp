#include "gf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "gf/errors.hpp"

namespace gf::quad {

namespace {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by
// Newton iteration on Legendre polynomials.
struct GLRule {
    std::vector<double> x, w;
};

GLRule makeGL(int n) {
    GLRule r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.x[static_cast<size_t>(i)] = -z;
        r.x[static_cast<size_t>(n - 1 - i)] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[static_cast<size_t>(i)] = wi;
        r.w[static_cast<size_t>(n - 1 - i)] = wi;
    }
    return r;
}

const GLRule& glRule(int order) {
    static std::mutex mtx;
    static std::vector<GLRule> cache(65);
    std::lock_guard<std::mutex> lock(mtx);
    auto& r = cache[static_cast<size_t>(order)];
    if (r.x.empty()) r = makeGL(order);
    return r;
}

// Kronrod 15 / Gauss 7 nodes and weights on [-1,1].
const double kXGK[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWGK[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWG[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct GKResult {
    double value, error;
};

GKResult gk15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXGK[i]);
        fv[14 - i] = f(c + h * kXGK[i]);
    }
    fv[7] = f(c);
    double resK = 0, resG = 0;
    for (int i = 0; i < 7; ++i) resK += kWGK[i] * (fv[i] + fv[14 - i]);
    resK += kWGK[7] * fv[7];
    for (int i = 0; i < 3; ++i) resG += kWG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resG += kWG[3] * fv[7];
    return {resK * h, std::abs((resK - resG) * h)};
}

double adaptiveSegment(const Fn& f, double a, double b, double absTol, int depth,
                       int maxDepth) {
    GKResult r = gk15(f, a, b);
    if (r.error <= absTol || b - a < 1e-15 * (std::abs(a) + std::abs(b) + 1.0))
        return r.value;
    if (depth >= maxDepth)
        throw QuadratureError("adaptive quadrature did not converge on [" +
                              std::to_string(a) + ", " + std::to_string(b) + "]");
    double m = 0.5 * (a + b);
    return adaptiveSegment(f, a, m, 0.5 * absTol, depth + 1, maxDepth) +
           adaptiveSegment(f, m, b, 0.5 * absTol, depth + 1, maxDepth);
}

}  // namespace

double gauss(const Fn& f, double a, double b, int order) {
    const GLRule& r = glRule(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < order; ++i)
        s += r.w[static_cast<size_t>(i)] * f(c + h * r.x[static_cast<size_t>(i)]);
    return s * h;
}

double compositeGauss(const Fn& f, double a, double b, int ncells, int order) {
    double s = 0;
    const double h = (b - a) / ncells;
    for (int i = 0; i < ncells; ++i) s += gauss(f, a + i * h, a + (i + 1) * h, order);
    return s;
}

double adaptive(const Fn& f, double a, double b, double absTol,
                std::vector<double> breakpoints, int maxDepth) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double s = 0;
    const double tolPer = absTol / static_cast<double>(pts.size() - 1);
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        s += adaptiveSegment(f, pts[i], pts[i + 1], tolPer, 0, maxDepth);
    return sign * s;
}

}  // namespace gf::quad
