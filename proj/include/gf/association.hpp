#pragma once

#include <vector>

#include "gf/asymptotics.hpp"
#include "gf/chart.hpp"
#include "gf/grid.hpp"
#include "gf/representative.hpp"

namespace gf {

/// Compactly supported smooth test function on a 1-D chart, built from the
/// standard bump so that it vanishes identically outside its support box.
class TestFunction {
  public:
    /// amplitude * bump((x - center)/halfWidth), support [c - w, c + w].
    static TestFunction bumpAt(double center, double halfWidth, double amplitude = 1.0);

    const Expr& expr() const { return expr_; }
    const Box& support() const { return support_; }
    double operator()(double x) const;

  private:
    Expr expr_;
    Box support_ = Box::interval(-1, 1);
};

/// The fixed, versioned 12-member battery of bumps covering K used by
/// isAssociated; deterministic so acceptance runs are reproducible.
std::vector<TestFunction> defaultBattery(const Box& K);

/// Distributional pairing: adaptive quadrature of u_eps * phi over the
/// support of phi, absolute tolerance 1e-10, with quadrature breakpoints
/// seeded at kernel pulse edges so eps-width spikes are resolved.
double pair(const Representative& rep, const TestFunction& phi, double eps);

struct AssociatedLimit {
    double limit = 0.0;
    bool converged = false;
    bool accelerated = false;         // limit read off the Aitken tail
    std::vector<double> values;       // pairing values along the grid
};

/// Limit of pair(rep, phi, eps_j): converged when the last 5 raw values are
/// Cauchy within tolAssoc, or -- for sequences with geometric differences,
/// as produced by O(eps^s) tails -- when the Aitken-accelerated tail is.
AssociatedLimit associatedLimit(const Representative& rep, const TestFunction& phi,
                                const EpsilonGrid& grid, double tolAssoc = 1e-6);

/// u ~ v iff the pairing of u - v tends to 0 for every battery member.
Verdict isAssociated(const Representative& u, const Representative& v,
                     const std::vector<TestFunction>& battery, const EpsilonGrid& grid,
                     double tolAssoc = 1e-6);

/// C^k-association: sup_K |d^alpha(u_eps - v_eps)| -> 0 for all |alpha| <= k,
/// read off the sup sequence along the grid (below 1e-4 at the smallest eps
/// with a monotone tail).
Verdict ckAssociated(const Representative& u, const Representative& v, int k,
                     const Box& K, const EpsilonGrid& grid);

}  // namespace gf
