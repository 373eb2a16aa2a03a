#include "gf/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gf/errors.hpp"

namespace gf {

std::string verdictName(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

constexpr double kZeroFloor = 1e-300;

int basePointsPerAxis(int dim) {
    // >= 64 per axis where the product lattice stays small; documented
    // reduction in higher dimensions to keep the sweep deterministic and fast
    switch (dim) {
        case 1:
        case 2: return 65;
        case 3: return 17;
        default: return 11;
    }
}

/// Per-axis candidate coordinates: uniform lattice plus feature-seeded
/// points around every kernel pulse living on that axis.
std::vector<std::vector<double>> candidateAxes(const Box& K,
                                               const std::vector<KernelFeature>& feats,
                                               double eps) {
    const int dim = K.dim();
    std::vector<std::vector<double>> axes(static_cast<size_t>(dim));
    const int n = basePointsPerAxis(dim);
    for (int i = 0; i < dim; ++i) {
        auto& ax = axes[static_cast<size_t>(i)];
        const double lo = K.lo[static_cast<size_t>(i)], hi = K.hi[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) ax.push_back(lo + (hi - lo) * j / (n - 1.0));
        for (const KernelFeature& f : feats) {
            if (f.coord != i) continue;
            double c = f.center(eps);
            const double hw = f.halfWidth(eps);
            if (f.period > 0) {
                c = std::fmod(c - lo, f.period);
                if (c < 0) c += f.period;
                c += lo;
            }
            for (int j = -8; j <= 8; ++j) {
                const double p = c + hw * j / 8.0;
                if (p >= lo && p <= hi) ax.push_back(p);
            }
        }
        std::sort(ax.begin(), ax.end());
    }
    return axes;
}

struct SupResult {
    double value = 0.0;
    std::vector<double> argmax;
};

SupResult scanLattice(const Representative& rep, double eps,
                      const std::vector<std::vector<double>>& axes) {
    const int dim = static_cast<int>(axes.size());
    std::vector<size_t> idx(static_cast<size_t>(dim), 0);
    std::vector<double> x(static_cast<size_t>(dim));
    SupResult best;
    best.value = -1.0;
    while (true) {
        for (int i = 0; i < dim; ++i)
            x[static_cast<size_t>(i)] = axes[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
        std::vector<double> v = rep.eval(eps, x);
        double m = 0.0;
        for (double c : v) m = std::max(m, std::abs(c));
        if (m > best.value) {
            best.value = m;
            best.argmax = x;
        }
        int k = dim - 1;
        while (k >= 0 && ++idx[static_cast<size_t>(k)] == axes[static_cast<size_t>(k)].size()) {
            idx[static_cast<size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return best;
}

}  // namespace

std::vector<double> supOnCompact(const Representative& rep, const Box& K,
                                 const std::vector<int>& alpha, const EpsilonGrid& grid) {
    if (K.dim() != rep.domain().dim())
        throw ParameterError("supOnCompact: box dimension mismatch");
    if (!K.strictlyInside(rep.domain()))
        throw DomainError("supOnCompact: box not strictly inside the chart domain");

    Representative d = alpha.empty() ? rep : rep.derive(alpha);
    std::vector<KernelFeature> feats;
    for (const Expr& e : d.components())
        for (KernelFeature& f : kernelFeatures(e)) feats.push_back(std::move(f));

    const int dim = K.dim();
    std::vector<double> out;
    out.reserve(grid.values().size());
    for (double eps : grid.values()) {
        auto axes = candidateAxes(K, feats, eps);
        SupResult best = scanLattice(d, eps, axes);

        // two refinement rounds x4 around the running maximizer
        std::vector<double> spacing(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            spacing[static_cast<size_t>(i)] =
                (K.hi[static_cast<size_t>(i)] - K.lo[static_cast<size_t>(i)]) /
                (basePointsPerAxis(dim) - 1.0);
        for (int round = 0; round < 2; ++round) {
            std::vector<std::vector<double>> local(static_cast<size_t>(dim));
            for (int i = 0; i < dim; ++i) {
                const double lo = K.lo[static_cast<size_t>(i)], hi = K.hi[static_cast<size_t>(i)];
                for (int j = -4; j <= 4; ++j) {
                    const double p = best.argmax[static_cast<size_t>(i)] +
                                     spacing[static_cast<size_t>(i)] * j / 4.0;
                    if (p >= lo && p <= hi) local[static_cast<size_t>(i)].push_back(p);
                }
            }
            SupResult refined = scanLattice(d, eps, local);
            if (refined.value > best.value) best = refined;
            for (double& s : spacing) s /= 4.0;
        }
        out.push_back(best.value);
    }
    return out;
}

OrderEstimate fitOrder(const std::vector<double>& values, const EpsilonGrid& grid) {
    const auto& eps = grid.values();
    if (values.size() != eps.size())
        throw ParameterError("fitOrder: value/grid length mismatch");

    OrderEstimate est;
    const size_t half = eps.size() / 2;  // smallest-eps half (grid is descending)
    std::vector<double> lx, ly;
    for (size_t j = half; j < eps.size(); ++j) {
        double v = values[j];
        if (!(v > kZeroFloor)) {
            ++est.clamped;
            continue;
        }
        if (!std::isfinite(v)) continue;
        lx.push_back(std::log(eps[j]));
        ly.push_back(std::log(v));
    }
    if (est.clamped == static_cast<int>(eps.size() - half)) {
        est.zeroNet = true;
        est.usable = true;
        est.slope = std::numeric_limits<double>::infinity();
        return est;
    }
    if (lx.size() < 4) return est;  // inconclusive

    const size_t n = lx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    est.slope = (n * sxy - sx * sy) / det;
    est.intercept = (sy * sxx - sx * sxy) / det;
    double rss = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (est.intercept + est.slope * lx[i]);
        rss += r * r;
    }
    est.residual = std::sqrt(rss / n);
    est.usable = std::isfinite(est.slope) && std::isfinite(est.residual);
    return est;
}

std::vector<double> aitkenAccelerate(const std::vector<double>& v) {
    std::vector<double> w;
    for (size_t j = 0; j + 2 < v.size(); ++j) {
        const double d1 = v[j + 1] - v[j];
        const double d2 = v[j + 2] - v[j + 1];
        const double den = d2 - d1;
        const double scale = std::abs(v[j]) + std::abs(v[j + 1]) + std::abs(v[j + 2]);
        if (std::abs(den) < 1e-14 * scale + 1e-300)
            w.push_back(v[j + 2]);
        else
            w.push_back(v[j + 2] - d2 * d2 / den);
    }
    return w;
}

namespace {

void multiIndices(int dim, int maxOrder, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(static_cast<size_t>(dim), 0);
    // enumerate all alpha with |alpha| <= maxOrder, lexicographically
    while (true) {
        int total = 0;
        for (int c : cur) total += c;
        if (total <= maxOrder) out.push_back(cur);
        int k = dim - 1;
        while (k >= 0 && cur[static_cast<size_t>(k)] == maxOrder) {
            cur[static_cast<size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<size_t>(k)];
    }
}

/// True when the log-log local slopes steepen beyond any polynomial cap:
/// used to refute (rather than leave inconclusive) super-polynomial growth
/// or decay.
bool slopesDiverge(const std::vector<double>& values, const EpsilonGrid& grid,
                   double cap) {
    const auto& eps = grid.values();
    const size_t half = eps.size() / 2;
    std::vector<double> local;
    size_t j = half;
    for (; j + 1 < eps.size(); ++j) {
        if (!(values[j] > kZeroFloor) || !(values[j + 1] > kZeroFloor)) return false;
        if (!std::isfinite(values[j]) || !std::isfinite(values[j + 1])) break;
        local.push_back((std::log(values[j + 1]) - std::log(values[j])) /
                        (std::log(eps[j + 1]) - std::log(eps[j])));
    }
    // an overflow tail: once infinite, the values must stay that way, and the
    // blowup is past any polynomial cap by itself
    bool overflowed = false;
    for (; j < eps.size(); ++j) {
        if (!std::isfinite(values[j]))
            overflowed = true;
        else if (overflowed)
            return false;
    }
    if (overflowed)
        return local.size() >= 2 &&
               std::abs(local[local.size() - 1]) > std::abs(local[local.size() - 2]);
    if (local.size() < 3) return false;
    const size_t n = local.size();
    return std::abs(local[n - 1]) > cap && std::abs(local[n - 1]) > std::abs(local[n - 2]) &&
           std::abs(local[n - 2]) > std::abs(local[n - 3]);
}

/// True when the net decays faster than any polynomial: positive, steepening
/// local decay slopes past the cap, allowing an underflowed-to-zero tail
/// (once zero, the values must stay zero).
bool decaysSuperPolynomially(const std::vector<double>& values, const EpsilonGrid& grid,
                             double cap) {
    const auto& eps = grid.values();
    const size_t half = eps.size() / 2;
    std::vector<double> local;
    size_t j = half;
    for (; j + 1 < eps.size(); ++j) {
        if (!(values[j] > kZeroFloor) || !(values[j + 1] > kZeroFloor)) break;
        local.push_back((std::log(values[j + 1]) - std::log(values[j])) /
                        (std::log(eps[j + 1]) - std::log(eps[j])));
    }
    bool seenZero = false;
    for (; j < eps.size(); ++j) {
        if (!(values[j] > kZeroFloor))
            seenZero = true;
        else if (seenZero)
            return false;  // resurfacing after underflow
    }
    if (local.size() < 3) return false;
    const size_t n = local.size();
    return local[n - 1] > cap && local[n - 1] > local[n - 2] && local[n - 2] > local[n - 3];
}

}  // namespace

Classification classifyModerate(const Representative& rep, const Box& K, int alphaMax,
                                const EpsilonGrid& grid, const ClassifyTolerances& tol) {
    std::vector<std::vector<int>> alphas;
    multiIndices(rep.domain().dim(), alphaMax, alphas);

    Classification c;
    c.worstSlope = std::numeric_limits<double>::infinity();
    bool anyInconclusive = false, anyRefuted = false;
    for (const auto& a : alphas) {
        std::vector<double> sup = supOnCompact(rep, K, a, grid);
        OrderEstimate est = fitOrder(sup, grid);
        c.perAlpha.push_back(est);
        if (est.zeroNet) continue;
        if (!est.usable || est.residual > tol.residual) {
            if (slopesDiverge(sup, grid, 20.0))
                anyRefuted = true;
            else
                anyInconclusive = true;
            continue;
        }
        if (est.slope < c.worstSlope) c.worstSlope = est.slope;
        c.worstResidual = std::max(c.worstResidual, est.residual);
    }
    if (anyRefuted) {
        c.verdict = Verdict::No;
    } else if (anyInconclusive) {
        c.verdict = Verdict::Inconclusive;
    } else {
        c.verdict = Verdict::Yes;
        c.order = std::isfinite(c.worstSlope)
                      ? std::max(0, static_cast<int>(std::ceil(-c.worstSlope)))
                      : 0;
    }
    return c;
}

Classification classifyNegligible(const Representative& rep, const Box& K, int mMax,
                                  const EpsilonGrid& grid, bool assumeModerate,
                                  const ClassifyTolerances& tol) {
    if (mMax > 8) throw ParameterError("classifyNegligible: m_max <= 8");
    std::vector<std::vector<int>> alphas;
    if (assumeModerate)
        alphas.push_back(std::vector<int>(static_cast<size_t>(rep.domain().dim()), 0));
    else
        multiIndices(rep.domain().dim(), mMax, alphas);

    Classification c;
    c.order = mMax;
    c.worstSlope = std::numeric_limits<double>::infinity();
    bool anyInconclusive = false, anyNo = false;
    for (const auto& a : alphas) {
        std::vector<double> sup = supOnCompact(rep, K, a, grid);
        OrderEstimate est = fitOrder(sup, grid);
        c.perAlpha.push_back(est);
        if (est.zeroNet) continue;  // the zero net is negligible at any order
        if (!est.usable) {
            anyInconclusive = true;
            continue;
        }
        if (est.slope < c.worstSlope) c.worstSlope = est.slope;
        c.worstResidual = std::max(c.worstResidual, est.residual);
        if (est.residual > tol.residual) {
            // a clean power law it is not; steepening decay past any
            // polynomial order still certifies negligibility
            if (!decaysSuperPolynomially(sup, grid, std::max(20.0, double(mMax))))
                anyInconclusive = true;
        } else if (est.slope < mMax - tol.slope) {
            anyNo = true;
        }
    }
    if (anyNo)
        c.verdict = Verdict::No;
    else if (anyInconclusive)
        c.verdict = Verdict::Inconclusive;
    else
        c.verdict = Verdict::Yes;
    return c;
}

GeneralizedNumber::GeneralizedNumber(Expr net) : net_(std::move(net)) {
    if (maxVarIndex(net_) >= 0)
        throw ParameterError("generalized number: net must depend on eps only");
}

double GeneralizedNumber::at(double eps) const { return evalExpr(net_, {}, eps); }

GeneralizedPoint::GeneralizedPoint(std::vector<Expr> net, Box support,
                                   const EpsilonGrid& grid)
    : net_(std::move(net)), support_(std::move(support)) {
    if (static_cast<int>(net_.size()) != support_.dim())
        throw ParameterError("generalized point: coordinate/support dimension mismatch");
    for (const Expr& e : net_)
        if (maxVarIndex(e) >= 0)
            throw ParameterError("generalized point: coordinates must depend on eps only");
    for (double eps : grid.values()) {
        std::vector<double> x = at(eps);
        for (int i = 0; i < dim(); ++i)
            if (!(x[static_cast<size_t>(i)] >= support_.lo[static_cast<size_t>(i)] &&
                  x[static_cast<size_t>(i)] <= support_.hi[static_cast<size_t>(i)]))
                throw DomainError("generalized point: net leaves its support box on the grid");
    }
}

GeneralizedPoint GeneralizedPoint::classical(std::vector<double> x) {
    GeneralizedPoint p;
    for (double c : x) p.net_.push_back(constant(c));
    p.support_ = Box::of(x, x);
    return p;
}

std::vector<double> GeneralizedPoint::at(double eps) const {
    std::vector<double> x;
    x.reserve(net_.size());
    for (const Expr& e : net_) x.push_back(evalExpr(e, {}, eps));
    return x;
}

GeneralizedNumber pointEval(const Representative& rep, const GeneralizedPoint& p) {
    if (rep.shape() != Shape::Scalar)
        throw ParameterError("pointEval: representative must be scalar-valued");
    if (p.dim() != rep.domain().dim())
        throw ParameterError("pointEval: point dimension mismatch");
    if (!rep.domain().periodic())
        for (int i = 0; i < p.dim(); ++i)
            if (!(p.support().lo[static_cast<size_t>(i)] > rep.domain().lo(i) &&
                  p.support().hi[static_cast<size_t>(i)] < rep.domain().hi(i)))
                throw DomainError("pointEval: support box not inside the chart domain");
    std::vector<Expr> repl;
    for (int i = 0; i < p.dim(); ++i) repl.push_back(p.coord(i));
    return GeneralizedNumber(substitute(rep.comp(), repl));
}

Verdict isInvertibleNumber(const GeneralizedNumber& r, const EpsilonGrid& grid,
                           const ClassifyTolerances& tol) {
    std::vector<double> values;
    for (double eps : grid.values()) {
        const double v = std::abs(r.at(eps));
        if (!(v > 0.0)) return Verdict::No;  // a zero on the grid: no eps^-N floor
        values.push_back(v);
    }
    OrderEstimate est = fitOrder(values, grid);
    if (!est.usable) return Verdict::Inconclusive;
    // super-polynomial decay (e.g. exp(-1/eps)) shows up as a diverging,
    // steepening log-log slope: refuted, not inconclusive
    if (est.residual > tol.residual)
        return slopesDiverge(values, grid, 20.0) ? Verdict::No : Verdict::Inconclusive;
    return Verdict::Yes;
}

}  // namespace gf
