#pragma once

#include <string>
#include <vector>

#include "gf/chart.hpp"
#include "gf/grid.hpp"
#include "gf/representative.hpp"

namespace gf {

/// Three-valued answer: asymptotic statements cannot be decided from finite
/// data, so "inconclusive" is a first-class outcome and is never coerced.
enum class Verdict { Yes, No, Inconclusive };

std::string verdictName(Verdict v);

/// Classification thresholds (spec'd defaults; configurable, not hard-coded
/// at call sites).
struct ClassifyTolerances {
    double slope = 0.25;
    double residual = 0.15;
};

/// Least-squares fit of log(value) against log(eps) over the smallest half
/// of the grid: value ~ exp(intercept) * eps^slope.
struct OrderEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the log-log fit
    bool usable = false;    // >= 4 usable (positive, finite) points
    bool zeroNet = false;   // every value at the clamp floor: identically 0
    int clamped = 0;        // values clamped to the 1e-300 floor
};

/// sup over a dense deterministic sample of K of |d^alpha u_eps|, one value
/// per grid eps (max over components for vector/matrix nets). The sample is
/// a uniform lattice (>= 64 points per axis in dimensions 1-2, reduced in
/// higher dimensions) enriched with points seeded by the kernel features of
/// the expression -- pulse centers and widths scale with eps, so a fixed
/// lattice alone would miss shrinking spikes -- then refined x4 around the
/// running maximizer, two rounds.
std::vector<double> supOnCompact(const Representative& rep, const Box& K,
                                 const std::vector<int>& alpha, const EpsilonGrid& grid);

OrderEstimate fitOrder(const std::vector<double>& values, const EpsilonGrid& grid);

/// One Aitken delta-squared pass over a sequence: collapses a geometric
/// error term v_j = L + C r^j to L plus a higher-order remainder. Guarded
/// against vanishing difference denominators.
std::vector<double> aitkenAccelerate(const std::vector<double>& v);

/// Outcome of a moderateness / negligibility sweep over derivative orders.
struct Classification {
    Verdict verdict = Verdict::Inconclusive;
    int order = 0;          // N_est for moderate, m_verified for negligible
    double worstSlope = 0;  // the binding slope across multi-indices
    double worstResidual = 0;
    std::vector<OrderEstimate> perAlpha;
};

/// Moderate iff every |alpha| <= alphaMax gives a finite clean power-law fit;
/// N_est = ceil(-min slope).
Classification classifyModerate(const Representative& rep, const Box& K, int alphaMax,
                                const EpsilonGrid& grid,
                                const ClassifyTolerances& tol = {});

/// Negligible at order mMax iff fitted slope >= mMax - tol.slope with clean
/// residual. With assumeModerate only alpha = 0 is tested (the
/// derivative-free characterization for nets already known moderate);
/// otherwise all |alpha| <= mMax are swept.
Classification classifyNegligible(const Representative& rep, const Box& K, int mMax,
                                  const EpsilonGrid& grid, bool assumeModerate = true,
                                  const ClassifyTolerances& tol = {});

/// A net of scalars: an expression in eps alone.
class GeneralizedNumber {
  public:
    explicit GeneralizedNumber(Expr net);
    const Expr& net() const { return net_; }
    double at(double eps) const;

  private:
    Expr net_;
};

/// A compactly supported net of points: one eps-expression per coordinate,
/// staying inside a fixed support box.
class GeneralizedPoint {
  public:
    GeneralizedPoint(std::vector<Expr> net, Box support, const EpsilonGrid& grid);
    static GeneralizedPoint classical(std::vector<double> x);

    int dim() const { return static_cast<int>(net_.size()); }
    const Expr& coord(int i) const { return net_[static_cast<size_t>(i)]; }
    const Box& support() const { return support_; }
    std::vector<double> at(double eps) const;

  private:
    GeneralizedPoint() = default;
    std::vector<Expr> net_;
    Box support_;
};

/// The net eps -> u_eps(p(eps)) as a composed expression.
GeneralizedNumber pointEval(const Representative& rep, const GeneralizedPoint& p);

/// Strict nonzeroness |r_eps| >= c * eps^N: invertible iff the values are
/// positive on the whole grid with a clean finite power-law fit.
Verdict isInvertibleNumber(const GeneralizedNumber& r, const EpsilonGrid& grid,
                           const ClassifyTolerances& tol = {});

}  // namespace gf
