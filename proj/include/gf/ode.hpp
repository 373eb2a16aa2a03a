#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gf::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Dense solution of an initial value problem: accepted steps with states
/// and derivatives, interpolated by cubic Hermite polynomials in between.
class DenseSolution {
  public:
    double t0() const { return ts_.front(); }
    double t1() const { return ts_.back(); }
    bool truncated() const { return truncated_; }
    int dim() const { return dim_; }
    const std::vector<double>& times() const { return ts_; }

    std::vector<double> at(double t) const;
    std::vector<double> velocityAt(double t) const;

  private:
    friend DenseSolution integrate(const Rhs&, double, double, std::span<const double>,
                                   const struct IntegrateOptions&);
    int dim_ = 0;
    bool truncated_ = false;
    std::vector<double> ts_;
    std::vector<std::vector<double>> ys_, fs_;

    size_t segment(double t) const;
};

struct IntegrateOptions {
    double relTol = 1e-10;
    double absTol = 1e-12;
    /// Optional per-state step-size cap (pulse-aware integration): the next
    /// step never exceeds maxStep(t, y) when set.
    std::function<double(double, std::span<const double>)> maxStep;
    /// Optional containment predicate; integration stops (flagged truncated)
    /// when the state leaves the region.
    std::function<bool(std::span<const double>)> inDomain;
    long maxSteps = 2'000'000;
};

/// Dormand-Prince 5(4) adaptive Runge-Kutta from t0 to t1 (either
/// direction). Throws on step-count exhaustion or step underflow.
DenseSolution integrate(const Rhs& f, double t0, double t1, std::span<const double> y0,
                        const IntegrateOptions& opt = {});

}  // namespace gf::ode
