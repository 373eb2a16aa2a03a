#pragma once

#include <string>
#include <vector>

#include "gf/chart.hpp"
#include "gf/expr.hpp"
#include "gf/representative.hpp"

namespace gf {

/// Unit-integral compactly supported kernel: a fixed C^inf bump times an
/// even polynomial correction enforcing vanishing moments 1..q.
class Mollifier {
  public:
    /// q <= 8 (curated range). Moment conditions are imposed by solving a
    /// small linear system in the even-polynomial basis; the constructed
    /// kernel is verified by quadrature (|int rho - 1| <= 1e-10 and
    /// |int x^k rho| <= 1e-10 for 1 <= k <= q).
    static Mollifier make(int momentOrder, double supportRadius);

    const Expr& kernel() const { return kernel_; }
    double radius() const { return radius_; }
    int momentOrder() const { return q_; }

    /// d-th symbolic derivative of the kernel (cached).
    Expr kernelDeriv(int d) const;

    /// Full moment int y^k rho(y) dy by quadrature.
    double moment(int k) const;

  private:
    Expr kernel_;
    double radius_ = 1.0;
    int q_ = 0;
};

/// rho_eps(x) = eps^-n prod_i rho(x_i / eps) as an expression in
/// x0..x_{n-1} and eps (tensor product across coordinates for n > 1).
Expr scaledKernel(const Mollifier& rho, int dim);

/// 1-D scaled kernel with a general argument/scale (e.g. rho_{sigma(eps)}
/// of a wrapped torus angle).
Expr scaledKernel1d(const Mollifier& rho, const Expr& arg, const Expr& scaleExpr,
                    double period = 0.0);

// ---- classical distributions on R ----

struct PiecePoly {
    double a = 0, b = 0;          // piece interval (a, b)
    std::vector<double> coeffs;   // polynomial coefficients, ascending
};

struct DistTerm {
    enum class Kind {
        DiracDelta,     // delta^(d)
        Heaviside,
        Sign,
        AbsoluteValue,
        PvReciprocal,   // vp(1/x)
        PiecewisePoly,
        SmoothLiteral,  // a smooth 1-D expression
    };
    Kind kind = Kind::DiracDelta;
    double coeff = 1.0;
    int deltaOrder = 0;
    std::vector<PiecePoly> pieces;
    Expr smooth;
};

struct DistributionSpec {
    std::vector<DistTerm> terms;
};

/// Textual form: "delta", "delta''", "heaviside", "sign", "abs", "pv_inv",
/// "pp[(-1,0):0; (0,1):x^2]", "smooth((sin x0))", and linear combinations
/// such as "2*delta - 0.5*heaviside".
DistributionSpec parseDistribution(const std::string& text);

/// iota: w -> (w * rho_eps)_eps on a 1-D chart, in closed form where
/// available; vp(1/x) through the lazily evaluated principal-value node.
/// Breakpoints of w must sit inside the domain with margin epsMax * R.
Representative embedDistribution(const DistributionSpec& w, const Mollifier& rho,
                                 const ChartDomain& domain, double epsMax = 0.5);

/// sigma: diagonal embedding of a smooth expression (eps-independent net).
Representative embedSmooth(const Expr& f, const ChartDomain& domain);

}  // namespace gf
