#include "gf/ode.hpp"

#include <algorithm>
#include <cmath>

#include "gf/errors.hpp"

namespace gf::ode {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// embedded 4th-order error weights (b - bhat)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

size_t DenseSolution::segment(double t) const {
    const bool fwd = ts_.back() >= ts_.front();
    auto cmp = [fwd](double a, double b) { return fwd ? a < b : a > b; };
    size_t lo = 0, hi = ts_.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (cmp(t, ts_[mid]))
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

std::vector<double> DenseSolution::at(double t) const {
    const size_t s = segment(t);
    const double h = ts_[s + 1] - ts_[s];
    const double u = (t - ts_[s]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    std::vector<double> out(static_cast<size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        const auto k = static_cast<size_t>(i);
        out[k] = h00 * ys_[s][k] + h * h10 * fs_[s][k] + h01 * ys_[s + 1][k] +
                 h * h11 * fs_[s + 1][k];
    }
    return out;
}

std::vector<double> DenseSolution::velocityAt(double t) const {
    const size_t s = segment(t);
    const double h = ts_[s + 1] - ts_[s];
    const double u = (t - ts_[s]) / h;
    const double u2 = u * u;
    const double d00 = (6 * u2 - 6 * u) / h, d10 = 3 * u2 - 4 * u + 1;
    const double d01 = (-6 * u2 + 6 * u) / h, d11 = 3 * u2 - 2 * u;
    std::vector<double> out(static_cast<size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        const auto k = static_cast<size_t>(i);
        out[k] = d00 * ys_[s][k] + d10 * fs_[s][k] + d01 * ys_[s + 1][k] +
                 d11 * fs_[s + 1][k];
    }
    return out;
}

DenseSolution integrate(const Rhs& f, double t0, double t1, std::span<const double> y0,
                        const IntegrateOptions& opt) {
    const int n = static_cast<int>(y0.size());
    if (n == 0) throw ParameterError("integrate: empty state");
    if (t1 == t0) throw ParameterError("integrate: empty time span");
    const double dir = t1 > t0 ? 1.0 : -1.0;

    DenseSolution sol;
    sol.dim_ = n;

    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
        k5(y.size()), k6(y.size()), k7(y.size()), ytmp(y.size()), ynew(y.size());
    double t = t0;
    f(t, y, k1);

    sol.ts_.push_back(t);
    sol.ys_.push_back(y);
    sol.fs_.push_back(k1);

    double h = dir * std::min(std::abs(t1 - t0) / 100.0, 0.01);
    long steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > opt.maxSteps)
            throw Error("integrate: step budget exhausted (stiff or pulse-trapped)");
        if (opt.maxStep) {
            const double cap = opt.maxStep(t, y);
            if (cap > 0 && std::abs(h) > cap) h = dir * cap;
        }
        if (dir * (t + h - t1) > 0) h = t1 - t;
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
            throw Error("integrate: step size underflow");

        auto stage = [&](std::vector<double>& k, double c, auto... aw) {
            const double as[] = {aw...};
            const std::vector<double>* ks[] = {&k1, &k2, &k3, &k4, &k5, &k6};
            for (size_t i = 0; i < y.size(); ++i) {
                double acc = y[i];
                for (size_t j = 0; j < sizeof...(aw); ++j) acc += h * as[j] * (*ks[j])[i];
                ytmp[i] = acc;
            }
            f(t + c * h, ytmp, k);
        };
        stage(k2, c2, a21);
        stage(k3, c3, a31, a32);
        stage(k4, c4, a41, a42, a43);
        stage(k5, c5, a51, a52, a53, a54);
        stage(k6, 1.0, a61, a62, a63, a64, a65);
        for (size_t i = 0; i < y.size(); ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        f(t + h, ynew, k7);  // FSAL stage, also the error stage

        double err = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.absTol + opt.relTol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            if (opt.inDomain && !opt.inDomain(y)) {
                sol.truncated_ = true;
                sol.ts_.push_back(t);
                sol.ys_.push_back(y);
                sol.fs_.push_back(k1);
                return sol;
            }
            sol.ts_.push_back(t);
            sol.ys_.push_back(y);
            sol.fs_.push_back(k1);
        }
        const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    return sol;
}

}  // namespace gf::ode
