#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gf/errors.hpp"

namespace gf {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Chart domain: an open box (a_i, b_i)^n, or the flat 2-torus chart
/// [0, 2*pi)^2 with periodic identification.
class ChartDomain {
  public:
    enum class Kind { Box, Torus2 };

    static ChartDomain box(std::vector<double> lo, std::vector<double> hi,
                           std::vector<std::string> names = {}) {
        if (lo.size() != hi.size() || lo.empty())
            throw ParameterError("chart box: lo/hi size mismatch");
        for (size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw ParameterError("chart box: requires a_i < b_i");
        ChartDomain d;
        d.kind_ = Kind::Box;
        d.lo_ = std::move(lo);
        d.hi_ = std::move(hi);
        if (names.empty())
            for (size_t i = 0; i < d.lo_.size(); ++i)
                names.push_back("x" + std::to_string(i));
        d.names_ = std::move(names);
        return d;
    }

    static ChartDomain interval(double a, double b) { return box({a}, {b}); }

    static ChartDomain torus2() {
        ChartDomain d;
        d.kind_ = Kind::Torus2;
        d.lo_ = {0.0, 0.0};
        d.hi_ = {kTwoPi, kTwoPi};
        d.names_ = {"alpha", "beta"};
        return d;
    }

    Kind kind() const { return kind_; }
    int dim() const { return static_cast<int>(lo_.size()); }
    double lo(int i) const { return lo_[static_cast<size_t>(i)]; }
    double hi(int i) const { return hi_[static_cast<size_t>(i)]; }
    const std::string& name(int i) const { return names_[static_cast<size_t>(i)]; }
    bool periodic() const { return kind_ == Kind::Torus2; }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim()) return false;
        if (periodic()) return true;  // wraps
        for (int i = 0; i < dim(); ++i)
            if (!(x[static_cast<size_t>(i)] > lo(i) && x[static_cast<size_t>(i)] < hi(i)))
                return false;
        return true;
    }

    /// Torus angles reported in [0, 2*pi); boxes unchanged.
    std::vector<double> wrap(std::span<const double> x) const {
        std::vector<double> w(x.begin(), x.end());
        if (periodic())
            for (double& v : w) {
                v = std::fmod(v, kTwoPi);
                if (v < 0) v += kTwoPi;
            }
        return w;
    }

    /// Chart distance: Euclidean on boxes, flat periodic product metric on
    /// the torus.
    double distance(std::span<const double> a, std::span<const double> b) const {
        double s = 0;
        for (int i = 0; i < dim(); ++i) {
            double d = a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
            if (periodic()) {
                d = std::fmod(d, kTwoPi);
                if (d > std::numbers::pi) d -= kTwoPi;
                if (d < -std::numbers::pi) d += kTwoPi;
            }
            s += d * d;
        }
        return std::sqrt(s);
    }

    bool operator==(const ChartDomain& o) const {
        return kind_ == o.kind_ && lo_ == o.lo_ && hi_ == o.hi_;
    }

  private:
    Kind kind_ = Kind::Box;
    std::vector<double> lo_, hi_;
    std::vector<std::string> names_;
};

/// A closed axis-aligned box, used for sup estimation on compacts.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    static Box of(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw ParameterError("box: lo/hi size mismatch");
        for (size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) throw ParameterError("box: lo > hi");
        return Box{std::move(lo), std::move(hi)};
    }

    static Box interval(double a, double b) { return of({a}, {b}); }

    /// Strictly inside an open box chart; torus charts contain every box of
    /// matching dimension.
    bool strictlyInside(const ChartDomain& d) const {
        if (dim() != d.dim()) return false;
        if (d.periodic()) return true;
        for (int i = 0; i < dim(); ++i)
            if (!(lo[static_cast<size_t>(i)] > d.lo(i) && hi[static_cast<size_t>(i)] < d.hi(i)))
                return false;
        return true;
    }
};

}  // namespace gf
