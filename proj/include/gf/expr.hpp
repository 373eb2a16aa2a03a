#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gf {

class ExprNode;

/// Immutable symbolic expression in chart coordinates x0, x1, ... and the
/// regularization parameter eps. Shared subtrees are the norm; nodes are
/// never mutated after construction, so sharing is safe across threads.
using Expr = std::shared_ptr<const ExprNode>;

enum class NodeKind {
    Const,
    Var,
    Eps,
    Add,
    Sub,
    Mul,
    Div,   // carries a nonvanishing-denominator certificate
    Pow,   // integer exponent
    Sin,
    Cos,
    Exp,
    Log,
    Poly,  // polynomial with fixed coefficients applied to a subtree
    Bump,  // k-th derivative of the standard bump exp(-1/(1-t^2)) on (-1,1)
    Conv,  // 1-D kernel transform node (direct / antiderivative / pv-Hilbert)
    SmoothConv,  // convolution of a smooth 1-D function with a scaled kernel
};

enum class ConvTag { Direct, Antideriv, PvHilbert };

/// Certificate for quotients: denominator = eps^epsPow * (floor + nonneg)
/// with floor > 0 and `nonneg` pointwise nonnegative on the domain.
struct DivCertificate {
    int epsPow = 0;
    double floor = 1.0;
};

// ---- construction (all constructors apply light algebraic normalization:
// constant folding, 0/1 identities, a - a -> 0 on shared subtrees) ----

Expr constant(double v);
Expr var(int index);
Expr epsilon();
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr powi(const Expr& a, int n);
Expr sinE(const Expr& a);
Expr cosE(const Expr& a);
Expr expE(const Expr& a);
Expr logE(const Expr& a);
Expr poly(std::vector<double> coeffs, const Expr& arg);
Expr bump(int order, const Expr& arg);

/// Quotient num / (eps^epsPow * (floor + nonneg)). The certificate is what
/// makes the division admissible; there is no uncertified division.
Expr certifiedDiv(const Expr& num, const Expr& nonneg, const DivCertificate& cert);

/// value = scale^-p * T[kernel](w / scale) where w = arg, wrapped into
/// [-period/2, period/2) when period > 0, and T is the transform selected
/// by the tag. kernel is a compactly supported 1-D expression in x0 with
/// support inside [-radius, radius]; scale is an expression in eps only.
Expr conv(ConvTag tag, const Expr& kernel1d, double radius, int scalePow,
          const Expr& arg, const Expr& scale, double period = 0.0);

/// value = integral over y in [-radius, radius] of fn(arg - scale*y) * kernel(y) dy
/// minus the diagonal value fn(arg): the correction term of the convolution
/// embedding of a smooth function. Evaluated as a moment series so that
/// differences against the diagonal embedding are cancellation-free at small
/// scales. The full embedding is add(fn(arg), smoothConv(...)).
Expr smoothConv(const Expr& kernel1d, double radius, const Expr& fn1d,
                const Expr& arg, const Expr& scale);

// ---- queries / operations ----

double evalExpr(const Expr& e, std::span<const double> x, double eps);
double evalExpr1(const Expr& e, double x, double eps);

/// Exact symbolic partial derivative with respect to coordinate x_i.
Expr diff(const Expr& e, int coord);
Expr diffMulti(const Expr& e, std::span<const int> alpha);

/// Replace Var(i) by repl[i] (Var(i) with i >= repl.size() is an error).
/// Kernel-internal variables of Conv/SmoothConv nodes are bound and not
/// substituted.
Expr substitute(const Expr& e, const std::vector<Expr>& repl);

int maxVarIndex(const Expr& e);  // -1 when coordinate-free
bool dependsOnEps(const Expr& e);

std::string serialize(const Expr& e);
Expr parseExpr(const std::string& text);

/// Exact structural equality of the serialized normal forms.
bool structurallyEqual(const Expr& a, const Expr& b);

/// A kernel feature: a Conv node whose argument is affine in exactly one
/// coordinate. Used to seed sup-norm sampling, quadrature breakpoints and
/// ODE step control around moving/shrinking pulses.
struct KernelFeature {
    int coord = 0;
    double slope = 1.0;   // d(arg)/d(x_coord)
    Expr argAtZero;       // arg with the coordinate set to 0 (eps-dependent)
    Expr scale;
    double radius = 1.0;
    double period = 0.0;

    /// Pulse center in the coordinate, for the given eps.
    double center(double eps) const;
    /// Pulse half width in the coordinate, for the given eps.
    double halfWidth(double eps) const;
};

std::vector<KernelFeature> kernelFeatures(const Expr& e);

// node access (read-only; used by serialization, tests and tooling)
NodeKind kindOf(const Expr& e);
double constValue(const Expr& e);

}  // namespace gf
