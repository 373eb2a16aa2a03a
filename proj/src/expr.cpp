#include "gf/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>

#include "gf/errors.hpp"
#include "gf/quadrature.hpp"

namespace gf {

namespace {

constexpr int kMaxSeriesOrder = 30;

const double* factorials() {
    static double f[kMaxSeriesOrder + 1] = {};
    static std::once_flag once;
    std::call_once(once, [] {
        f[0] = 1.0;
        for (int k = 1; k <= kMaxSeriesOrder; ++k) f[k] = f[k - 1] * k;
    });
    return f;
}

// ---- standard bump: b(t) = exp(-1/(1-t^2)) on (-1,1), 0 outside ----
// b^(k)(t) = P_k(t) / (1-t^2)^(2k) * b(t) with P_0 = 1 and
// P_{k+1} = P_k'(1-t^2)^2 + 4k t P_k (1-t^2) - 2t P_k.

using Polyn = std::vector<double>;

Polyn polyAdd(const Polyn& a, const Polyn& b) {
    Polyn r(std::max(a.size(), b.size()), 0.0);
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

Polyn polyMul(const Polyn& a, const Polyn& b) {
    Polyn r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Polyn polyScale(Polyn a, double s) {
    for (double& c : a) c *= s;
    return a;
}

Polyn polyDeriv(const Polyn& a) {
    if (a.size() <= 1) return {0.0};
    Polyn r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<double>(i);
    return r;
}

double polyEval(const Polyn& a, double t) {
    double v = 0;
    for (size_t i = a.size(); i-- > 0;) v = v * t + a[i];
    return v;
}

const Polyn& bumpNumerator(int k) {
    static std::mutex mtx;
    static std::vector<Polyn> cache{{1.0}};
    std::lock_guard<std::mutex> lock(mtx);
    const Polyn oneMinusT2{1.0, 0.0, -1.0};
    const Polyn minusTwoT{0.0, -2.0};
    while (static_cast<int>(cache.size()) <= k) {
        const int n = static_cast<int>(cache.size()) - 1;
        const Polyn& p = cache.back();
        Polyn next = polyMul(polyDeriv(p), polyMul(oneMinusT2, oneMinusT2));
        next = polyAdd(next, polyScale(polyMul(Polyn{0.0, 4.0 * n}, polyMul(p, oneMinusT2)), 1.0));
        next = polyAdd(next, polyMul(minusTwoT, p));
        cache.push_back(std::move(next));
    }
    return cache[static_cast<size_t>(k)];
}

double bumpEval(int k, double t) {
    if (!(std::abs(t) < 1.0)) return 0.0;
    const double e = 1.0 - t * t;
    const double p = polyEval(bumpNumerator(k), t);
    if (p == 0.0) return 0.0;
    // evaluated in log space: near |t| = 1 the exponential decays faster
    // than the rational prefactor grows
    const double lg = std::log(std::abs(p)) - 2.0 * k * std::log(e) - 1.0 / e;
    if (lg < -745.0) return 0.0;
    return (p > 0 ? 1.0 : -1.0) * std::exp(lg);
}

}  // namespace

// ---- node payloads ----

double evalExpr1(const Expr& e, double x, double eps);

struct ConvData {
    ConvTag tag = ConvTag::Direct;
    Expr kernel;
    double radius = 1.0;
    int scalePow = 0;
    Expr arg, scale;
    double period = 0.0;

    // antiderivative table (lazy)
    mutable std::once_flag tableOnce;
    mutable std::vector<double> cum;
    mutable double cellWidth = 0;
    mutable double total = 0;

    // pv memo keyed on the argument rounded to 1e-12
    mutable std::mutex pvMtx;
    mutable std::map<long long, double> pvMemo;

    double kernelAt(double t) const { return evalExpr1(kernel, t, 1.0); }

    void buildTable() const {
        std::call_once(tableOnce, [this] {
            const int N = 2048;
            cum.resize(N + 1);
            cum[0] = 0.0;
            cellWidth = 2.0 * radius / N;
            auto f = [this](double t) { return kernelAt(t); };
            for (int i = 0; i < N; ++i)
                cum[static_cast<size_t>(i) + 1] =
                    cum[static_cast<size_t>(i)] +
                    quad::gauss(f, -radius + i * cellWidth, -radius + (i + 1) * cellWidth, 15);
            total = cum.back();
        });
    }

    double antideriv(double t) const {
        buildTable();
        if (t <= -radius) return 0.0;
        if (t >= radius) return total;
        const int N = static_cast<int>(cum.size()) - 1;
        int j = static_cast<int>((t + radius) / cellWidth);
        j = std::clamp(j, 0, N - 1);
        const double left = -radius + j * cellWidth;
        auto f = [this](double s) { return kernelAt(s); };
        return cum[static_cast<size_t>(j)] + quad::gauss(f, left, t, 15);
    }

    double pvValue(double u) const {
        // F(u) = pv int_{-R}^{R} kernel(t) / (u - t) dt
        const double ku = std::abs(u) < radius ? kernelAt(u) : 0.0;
        auto smooth = [this, u, ku](double t) {
            const double d = u - t;
            return (kernelAt(t) - ku) / d;
        };
        if (std::abs(u) >= radius) {
            return quad::adaptive([this, u](double t) { return kernelAt(t) / (u - t); },
                                  -radius, radius, 1e-12);
        }
        const double i1 = quad::adaptive(smooth, -radius, u, 1e-12);
        const double i2 = quad::adaptive(smooth, u, radius, 1e-12);
        const double lg = ku == 0.0 ? 0.0 : ku * std::log((radius + u) / (radius - u));
        return i1 + i2 + lg;
    }

    double pvHilbert(double u) const {
        if (std::abs(u) > 1e5) return pvValue(u);
        const long long key = llround(u * 1e12);
        {
            std::lock_guard<std::mutex> lock(pvMtx);
            auto it = pvMemo.find(key);
            if (it != pvMemo.end()) return it->second;
        }
        const double v = pvValue(u);
        std::lock_guard<std::mutex> lock(pvMtx);
        pvMemo.emplace(key, v);
        return v;
    }
};

struct SmoothConvData {
    Expr kernel;
    double radius = 1.0;
    Expr fn, arg, scale;

    mutable std::once_flag momentsOnce;
    mutable std::vector<double> moments;
    mutable std::mutex derivMtx;
    mutable std::vector<Expr> fnDerivs;

    const std::vector<double>& momentsOf() const {
        std::call_once(momentsOnce, [this] {
            moments.resize(kMaxSeriesOrder + 1);
            for (int k = 0; k <= kMaxSeriesOrder; ++k) {
                double m = quad::compositeGauss(
                    [this, k](double y) { return std::pow(y, k) * evalExpr1(kernel, y, 1.0); },
                    -radius, radius, 16, 15);
                // moments the kernel class forces to vanish come out at the
                // accuracy of its construction (~1e-12); snap them to zero so
                // the series reproduces the intended net, not the residue
                if (std::abs(m) < 1e-9) m = 0.0;
                moments[static_cast<size_t>(k)] = m;
            }
        });
        return moments;
    }

    Expr fnDeriv(int k) const;
};

class ExprNode {
  public:
    NodeKind kind = NodeKind::Const;
    double value = 0.0;        // Const
    int index = 0;             // Var index / Pow exponent / Bump order
    std::vector<double> coeffs;  // Poly
    Expr a, b;
    DivCertificate cert;
    std::shared_ptr<ConvData> conv;
    std::shared_ptr<SmoothConvData> sconv;
};

namespace {

Expr mk(NodeKind k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    return n;
}

bool isConst(const Expr& e, double v) { return e->kind == NodeKind::Const && e->value == v; }

}  // namespace

Expr SmoothConvData::fnDeriv(int k) const {
    std::lock_guard<std::mutex> lock(derivMtx);
    if (fnDerivs.empty()) fnDerivs.push_back(fn);
    while (static_cast<int>(fnDerivs.size()) <= k) fnDerivs.push_back(diff(fnDerivs.back(), 0));
    return fnDerivs[static_cast<size_t>(k)];
}

// ---- constructors ----

Expr constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Const;
    n->value = v;
    return n;
}

Expr var(int index) {
    if (index < 0) throw ParameterError("var: negative index");
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Var;
    n->index = index;
    return n;
}

Expr epsilon() { return mk(NodeKind::Eps); }

Expr add(const Expr& a, const Expr& b) {
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return constant(a->value + b->value);
    if (isConst(a, 0.0)) return b;
    if (isConst(b, 0.0)) return a;
    auto n = mk(NodeKind::Add);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->a = a;
    m->b = b;
    return n;
}

namespace {

// bounded structural-equality check so that differences of embeddings
// cancel their shared diagonal part exactly (not just on pointer-equal
// subtrees); the size cap keeps construction cost linear for large trees
bool cancels(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    std::string sa = serialize(a);
    if (sa.size() > 1 << 16) return false;
    return sa == serialize(b);
}

}  // namespace

Expr sub(const Expr& a, const Expr& b) {
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return constant(a->value - b->value);
    if (isConst(b, 0.0)) return a;
    if (a == b) return constant(0.0);
    if (cancels(a, b)) return constant(0.0);
    if (a->kind == NodeKind::Add) {
        if (cancels(a->a, b)) return a->b;
        if (cancels(a->b, b)) return a->a;
    }
    if (b->kind == NodeKind::Add) {
        if (cancels(b->a, a)) return neg(b->b);
        if (cancels(b->b, a)) return neg(b->a);
    }
    auto n = mk(NodeKind::Sub);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->a = a;
    m->b = b;
    return n;
}

Expr mul(const Expr& a, const Expr& b) {
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return constant(a->value * b->value);
    if (isConst(a, 0.0) || isConst(b, 0.0)) return constant(0.0);
    if (isConst(a, 1.0)) return b;
    if (isConst(b, 1.0)) return a;
    auto n = mk(NodeKind::Mul);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->a = a;
    m->b = b;
    return n;
}

Expr neg(const Expr& a) { return mul(constant(-1.0), a); }

Expr powi(const Expr& a, int n) {
    if (n == 0) return constant(1.0);
    if (n == 1) return a;
    if (a->kind == NodeKind::Const) {
        const double v = std::pow(a->value, n);
        if (std::isfinite(v)) return constant(v);
    }
    auto node = mk(NodeKind::Pow);
    auto m = std::const_pointer_cast<ExprNode>(node);
    m->a = a;
    m->index = n;
    return node;
}

namespace {
Expr unary(NodeKind k, const Expr& a, double (*f)(double)) {
    if (a->kind == NodeKind::Const) return constant(f(a->value));
    auto n = mk(k);
    std::const_pointer_cast<ExprNode>(n)->a = a;
    return n;
}
}  // namespace

Expr sinE(const Expr& a) { return unary(NodeKind::Sin, a, std::sin); }
Expr cosE(const Expr& a) { return unary(NodeKind::Cos, a, std::cos); }
Expr expE(const Expr& a) { return unary(NodeKind::Exp, a, std::exp); }
Expr logE(const Expr& a) { return unary(NodeKind::Log, a, std::log); }

Expr poly(std::vector<double> coeffs, const Expr& arg) {
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.empty()) return constant(0.0);
    if (coeffs.size() == 1) return constant(coeffs[0]);
    if (arg->kind == NodeKind::Const) return constant(polyEval(coeffs, arg->value));
    auto n = mk(NodeKind::Poly);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->coeffs = std::move(coeffs);
    m->a = arg;
    return n;
}

Expr bump(int order, const Expr& arg) {
    if (order < 0) throw ParameterError("bump: negative derivative order");
    if (arg->kind == NodeKind::Const) return constant(bumpEval(order, arg->value));
    auto n = mk(NodeKind::Bump);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->index = order;
    m->a = arg;
    return n;
}

Expr certifiedDiv(const Expr& num, const Expr& nonneg, const DivCertificate& cert) {
    if (!(cert.floor > 0.0))
        throw CertificateError("certifiedDiv: certificate floor must be positive");
    auto n = mk(NodeKind::Div);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->a = num;
    m->b = nonneg;
    m->cert = cert;
    return n;
}

Expr conv(ConvTag tag, const Expr& kernel1d, double radius, int scalePow,
          const Expr& arg, const Expr& scale, double period) {
    if (!(radius > 0)) throw ParameterError("conv: radius must be positive");
    auto n = mk(NodeKind::Conv);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->conv = std::make_shared<ConvData>();
    m->conv->tag = tag;
    m->conv->kernel = kernel1d;
    m->conv->radius = radius;
    m->conv->scalePow = scalePow;
    m->conv->arg = arg;
    m->conv->scale = scale;
    m->conv->period = period;
    return n;
}

Expr smoothConv(const Expr& kernel1d, double radius, const Expr& fn1d,
                const Expr& arg, const Expr& scale) {
    if (!(radius > 0)) throw ParameterError("smoothConv: radius must be positive");
    auto n = mk(NodeKind::SmoothConv);
    auto m = std::const_pointer_cast<ExprNode>(n);
    m->sconv = std::make_shared<SmoothConvData>();
    m->sconv->kernel = kernel1d;
    m->sconv->radius = radius;
    m->sconv->fn = fn1d;
    m->sconv->arg = arg;
    m->sconv->scale = scale;
    return n;
}

// ---- evaluation ----

namespace {

double evalNode(const ExprNode* n, std::span<const double> x, double eps);

double evalConv(const ConvData& c, std::span<const double> x, double eps) {
    const double s = evalNode(c.scale.get(), x, eps);
    double a = evalNode(c.arg.get(), x, eps);
    double shift = 0.0;
    if (c.period > 0) {
        const double k = std::floor((a + 0.5 * c.period) / c.period);
        a -= k * c.period;
        shift = k;
    }
    const double t = a / s;
    double base = 0.0;
    switch (c.tag) {
        case ConvTag::Direct:
            base = std::abs(t) >= c.radius ? 0.0 : c.kernelAt(t);
            break;
        case ConvTag::Antideriv:
            base = c.antideriv(t);
            if (c.period > 0) {
                c.buildTable();
                base += shift * c.total;
            }
            break;
        case ConvTag::PvHilbert:
            base = c.pvHilbert(t);
            break;
    }
    return base * std::pow(s, -c.scalePow);
}

double evalSmoothConv(const SmoothConvData& d, std::span<const double> x, double eps) {
    const double s = evalNode(d.scale.get(), x, eps);
    const double a = evalNode(d.arg.get(), x, eps);
    const double fa = evalExpr1(d.fn, a, eps);
    // moment series in the scale; the node carries only the correction to
    // the diagonal value fn(arg), so differences against the diagonal
    // embedding never lose the tail to rounding of the large term
    if (std::abs(s) * d.radius <= 0.5) {
        const auto& m = d.momentsOf();
        const double* fact = factorials();
        double tail = 0.0, sk = 1.0, prev = HUGE_VAL;
        bool converged = false, badDeriv = false;
        int live = 0;  // terms with a nonvanishing moment
        for (int k = 1; k <= kMaxSeriesOrder; ++k) {
            sk *= -s;
            const double mk = m[static_cast<size_t>(k)];
            if (mk == 0.0) continue;
            const double fk = evalExpr1(d.fnDeriv(k), a, eps);
            if (!std::isfinite(fk)) {
                badDeriv = true;
                break;
            }
            const double term = sk / fact[k] * mk * fk;
            tail += term;
            ++live;
            const double mag = std::abs(term);
            if (live >= 2 && mag <= prev &&
                mag <= 1e-18 * (std::abs(fa) + std::abs(tail)) + 1e-300) {
                converged = true;
                break;
            }
            prev = mag;
        }
        if (live == 0 && !badDeriv) converged = true;  // all capped moments vanish
        if (converged) return tail;
    }
    // fallback: direct quadrature of the subtracted integrand
    const double tail = quad::compositeGauss(
        [&](double y) {
            return (evalExpr1(d.fn, a - s * y, eps) - fa) * evalExpr1(d.kernel, y, 1.0);
        },
        -d.radius, d.radius, 16, 15);
    return tail;
}

double evalNode(const ExprNode* n, std::span<const double> x, double eps) {
    switch (n->kind) {
        case NodeKind::Const:
            return n->value;
        case NodeKind::Var:
            if (n->index >= static_cast<int>(x.size()))
                throw DomainError("eval: coordinate x" + std::to_string(n->index) +
                                  " not supplied");
            return x[static_cast<size_t>(n->index)];
        case NodeKind::Eps:
            return eps;
        case NodeKind::Add:
            return evalNode(n->a.get(), x, eps) + evalNode(n->b.get(), x, eps);
        case NodeKind::Sub:
            return evalNode(n->a.get(), x, eps) - evalNode(n->b.get(), x, eps);
        case NodeKind::Mul:
            return evalNode(n->a.get(), x, eps) * evalNode(n->b.get(), x, eps);
        case NodeKind::Div: {
            const double num = evalNode(n->a.get(), x, eps);
            const double den = std::pow(eps, n->cert.epsPow) *
                               (n->cert.floor + evalNode(n->b.get(), x, eps));
            return num / den;
        }
        case NodeKind::Pow: {
            const double a = evalNode(n->a.get(), x, eps);
            return std::pow(a, n->index);
        }
        case NodeKind::Sin:
            return std::sin(evalNode(n->a.get(), x, eps));
        case NodeKind::Cos:
            return std::cos(evalNode(n->a.get(), x, eps));
        case NodeKind::Exp:
            return std::exp(evalNode(n->a.get(), x, eps));
        case NodeKind::Log:
            return std::log(evalNode(n->a.get(), x, eps));
        case NodeKind::Poly:
            return polyEval(n->coeffs, evalNode(n->a.get(), x, eps));
        case NodeKind::Bump:
            return bumpEval(n->index, evalNode(n->a.get(), x, eps));
        case NodeKind::Conv:
            return evalConv(*n->conv, x, eps);
        case NodeKind::SmoothConv:
            return evalSmoothConv(*n->sconv, x, eps);
    }
    throw Error("eval: corrupt node");
}

}  // namespace

double evalExpr(const Expr& e, std::span<const double> x, double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw ParameterError("eval: eps must be in (0,1]");
    return evalNode(e.get(), x, eps);
}

double evalExpr1(const Expr& e, double x, double eps) {
    return evalNode(e.get(), std::span<const double>(&x, 1), eps);
}

// ---- differentiation ----

Expr diff(const Expr& e, int coord) {
    const ExprNode* n = e.get();
    switch (n->kind) {
        case NodeKind::Const:
        case NodeKind::Eps:
            return constant(0.0);
        case NodeKind::Var:
            return constant(n->index == coord ? 1.0 : 0.0);
        case NodeKind::Add:
            return add(diff(n->a, coord), diff(n->b, coord));
        case NodeKind::Sub:
            return sub(diff(n->a, coord), diff(n->b, coord));
        case NodeKind::Mul:
            return add(mul(diff(n->a, coord), n->b), mul(n->a, diff(n->b, coord)));
        case NodeKind::Div: {
            // d (num / (eps^k (c + q))) = num'/den - num q' / den^2,
            // den^2 = eps^(2k) (c^2 + (2c q + q^2))
            const Expr dn = certifiedDiv(diff(n->a, coord), n->b, n->cert);
            const Expr dq = diff(n->b, coord);
            if (isConst(dq, 0.0)) return dn;
            const Expr q2 = add(mul(constant(2.0 * n->cert.floor), n->b), mul(n->b, n->b));
            DivCertificate c2{2 * n->cert.epsPow, n->cert.floor * n->cert.floor};
            return sub(dn, certifiedDiv(mul(n->a, dq), q2, c2));
        }
        case NodeKind::Pow:
            return mul(mul(constant(n->index), powi(n->a, n->index - 1)), diff(n->a, coord));
        case NodeKind::Sin:
            return mul(cosE(n->a), diff(n->a, coord));
        case NodeKind::Cos:
            return mul(neg(sinE(n->a)), diff(n->a, coord));
        case NodeKind::Exp:
            return mul(expE(n->a), diff(n->a, coord));
        case NodeKind::Log:
            return mul(powi(n->a, -1), diff(n->a, coord));
        case NodeKind::Poly:
            return mul(poly(polyDeriv(n->coeffs), n->a), diff(n->a, coord));
        case NodeKind::Bump:
            return mul(bump(n->index + 1, n->a), diff(n->a, coord));
        case NodeKind::Conv: {
            const ConvData& c = *n->conv;
            const Expr da = diff(c.arg, coord);
            if (isConst(da, 0.0)) return constant(0.0);
            Expr inner;
            switch (c.tag) {
                case ConvTag::Direct:
                    inner = conv(ConvTag::Direct, diff(c.kernel, 0), c.radius,
                                 c.scalePow + 1, c.arg, c.scale, c.period);
                    break;
                case ConvTag::Antideriv:
                    inner = conv(ConvTag::Direct, c.kernel, c.radius, c.scalePow + 1,
                                 c.arg, c.scale, c.period);
                    break;
                case ConvTag::PvHilbert:
                    inner = conv(ConvTag::PvHilbert, diff(c.kernel, 0), c.radius,
                                 c.scalePow + 1, c.arg, c.scale, c.period);
                    break;
            }
            return mul(inner, da);
        }
        case NodeKind::SmoothConv: {
            const SmoothConvData& d = *n->sconv;
            const Expr da = diff(d.arg, coord);
            if (isConst(da, 0.0)) return constant(0.0);
            return mul(smoothConv(d.kernel, d.radius, d.fnDeriv(1), d.arg, d.scale), da);
        }
    }
    throw Error("diff: corrupt node");
}

Expr diffMulti(const Expr& e, std::span<const int> alpha) {
    Expr r = e;
    for (size_t i = 0; i < alpha.size(); ++i)
        for (int k = 0; k < alpha[i]; ++k) r = diff(r, static_cast<int>(i));
    return r;
}

// ---- substitution ----

Expr substitute(const Expr& e, const std::vector<Expr>& repl) {
    const ExprNode* n = e.get();
    switch (n->kind) {
        case NodeKind::Const:
        case NodeKind::Eps:
            return e;
        case NodeKind::Var:
            if (n->index >= static_cast<int>(repl.size()))
                throw ParameterError("substitute: no replacement for x" +
                                     std::to_string(n->index));
            return repl[static_cast<size_t>(n->index)];
        case NodeKind::Add:
            return add(substitute(n->a, repl), substitute(n->b, repl));
        case NodeKind::Sub:
            return sub(substitute(n->a, repl), substitute(n->b, repl));
        case NodeKind::Mul:
            return mul(substitute(n->a, repl), substitute(n->b, repl));
        case NodeKind::Div:
            return certifiedDiv(substitute(n->a, repl), substitute(n->b, repl), n->cert);
        case NodeKind::Pow:
            return powi(substitute(n->a, repl), n->index);
        case NodeKind::Sin:
            return sinE(substitute(n->a, repl));
        case NodeKind::Cos:
            return cosE(substitute(n->a, repl));
        case NodeKind::Exp:
            return expE(substitute(n->a, repl));
        case NodeKind::Log:
            return logE(substitute(n->a, repl));
        case NodeKind::Poly:
            return poly(n->coeffs, substitute(n->a, repl));
        case NodeKind::Bump:
            return bump(n->index, substitute(n->a, repl));
        case NodeKind::Conv: {
            const ConvData& c = *n->conv;
            // kernel variable is bound; scale is eps-only
            return conv(c.tag, c.kernel, c.radius, c.scalePow, substitute(c.arg, repl),
                        c.scale, c.period);
        }
        case NodeKind::SmoothConv: {
            const SmoothConvData& d = *n->sconv;
            return smoothConv(d.kernel, d.radius, d.fn, substitute(d.arg, repl), d.scale);
        }
    }
    throw Error("substitute: corrupt node");
}

// ---- queries ----

int maxVarIndex(const Expr& e) {
    const ExprNode* n = e.get();
    switch (n->kind) {
        case NodeKind::Const:
        case NodeKind::Eps:
            return -1;
        case NodeKind::Var:
            return n->index;
        case NodeKind::Conv:
            return maxVarIndex(n->conv->arg);
        case NodeKind::SmoothConv:
            return maxVarIndex(n->sconv->arg);
        default: {
            int m = n->a ? maxVarIndex(n->a) : -1;
            if (n->b) m = std::max(m, maxVarIndex(n->b));
            return m;
        }
    }
}

bool dependsOnEps(const Expr& e) {
    const ExprNode* n = e.get();
    switch (n->kind) {
        case NodeKind::Const:
        case NodeKind::Var:
            return false;
        case NodeKind::Eps:
            return true;
        case NodeKind::Div:
            return n->cert.epsPow != 0 || dependsOnEps(n->a) || dependsOnEps(n->b);
        case NodeKind::Conv:
            return dependsOnEps(n->conv->arg) || dependsOnEps(n->conv->scale);
        case NodeKind::SmoothConv:
            return dependsOnEps(n->sconv->arg) || dependsOnEps(n->sconv->scale);
        default:
            return (n->a && dependsOnEps(n->a)) || (n->b && dependsOnEps(n->b));
    }
}

NodeKind kindOf(const Expr& e) { return e->kind; }

double constValue(const Expr& e) {
    if (e->kind != NodeKind::Const) throw Error("constValue: not a constant node");
    return e->value;
}

// ---- kernel features ----

double KernelFeature::center(double eps) const {
    return -evalExpr(argAtZero, {}, eps) / slope;
}

double KernelFeature::halfWidth(double eps) const {
    return std::abs(evalExpr(scale, {}, eps)) * radius / std::abs(slope);
}

namespace {

void collectFeatures(const Expr& e, std::vector<KernelFeature>& out) {
    const ExprNode* n = e.get();
    if (n->kind == NodeKind::Conv) {
        const ConvData& c = *n->conv;
        collectFeatures(c.arg, out);
        const int mv = maxVarIndex(c.arg);
        if (mv >= 0) {
            int active = -1;
            double slope = 0;
            bool affine = true;
            for (int i = 0; i <= mv && affine; ++i) {
                Expr d = diff(c.arg, i);
                if (d->kind != NodeKind::Const) {
                    affine = false;
                } else if (d->value != 0.0) {
                    if (active >= 0)
                        affine = false;  // affine in more than one coordinate
                    active = i;
                    slope = d->value;
                }
            }
            if (affine && active >= 0) {
                std::vector<Expr> zeros(static_cast<size_t>(mv) + 1, constant(0.0));
                KernelFeature f;
                f.coord = active;
                f.slope = slope;
                f.argAtZero = substitute(c.arg, zeros);
                f.scale = c.scale;
                f.radius = c.radius;
                f.period = c.period;
                out.push_back(std::move(f));
            }
        }
        return;
    }
    if (n->kind == NodeKind::SmoothConv) {
        collectFeatures(n->sconv->arg, out);
        return;
    }
    if (n->a) collectFeatures(n->a, out);
    if (n->b) collectFeatures(n->b, out);
}

}  // namespace

std::vector<KernelFeature> kernelFeatures(const Expr& e) {
    std::vector<KernelFeature> out;
    collectFeatures(e, out);
    return out;
}

// ---- serialization ----

namespace {

std::string fmtNum(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ser(const Expr& e, std::string& out) {
    const ExprNode* n = e.get();
    switch (n->kind) {
        case NodeKind::Const:
            out += fmtNum(n->value);
            return;
        case NodeKind::Var:
            out += "x" + std::to_string(n->index);
            return;
        case NodeKind::Eps:
            out += "eps";
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul: {
            out += n->kind == NodeKind::Add ? "(+ " : n->kind == NodeKind::Sub ? "(- " : "(* ";
            ser(n->a, out);
            out += ' ';
            ser(n->b, out);
            out += ')';
            return;
        }
        case NodeKind::Div:
            out += "(divc " + std::to_string(n->cert.epsPow) + ' ' + fmtNum(n->cert.floor) + ' ';
            ser(n->a, out);
            out += ' ';
            ser(n->b, out);
            out += ')';
            return;
        case NodeKind::Pow:
            out += "(^ ";
            ser(n->a, out);
            out += ' ' + std::to_string(n->index) + ')';
            return;
        case NodeKind::Sin:
        case NodeKind::Cos:
        case NodeKind::Exp:
        case NodeKind::Log: {
            const char* name = n->kind == NodeKind::Sin   ? "sin"
                               : n->kind == NodeKind::Cos ? "cos"
                               : n->kind == NodeKind::Exp ? "exp"
                                                          : "log";
            out += '(';
            out += name;
            out += ' ';
            ser(n->a, out);
            out += ')';
            return;
        }
        case NodeKind::Poly:
            out += "(poly";
            for (double c : n->coeffs) out += ' ' + fmtNum(c);
            out += ' ';
            ser(n->a, out);
            out += ')';
            return;
        case NodeKind::Bump:
            out += "(bump " + std::to_string(n->index) + ' ';
            ser(n->a, out);
            out += ')';
            return;
        case NodeKind::Conv: {
            const ConvData& c = *n->conv;
            const char* tag = c.tag == ConvTag::Direct      ? "direct"
                              : c.tag == ConvTag::Antideriv ? "anti"
                                                            : "pv";
            out += "(conv ";
            out += tag;
            out += ' ' + std::to_string(c.scalePow) + ' ' + fmtNum(c.radius) + ' ' +
                   fmtNum(c.period) + ' ';
            ser(c.kernel, out);
            out += ' ';
            ser(c.arg, out);
            out += ' ';
            ser(c.scale, out);
            out += ')';
            return;
        }
        case NodeKind::SmoothConv: {
            const SmoothConvData& d = *n->sconv;
            out += "(sconv " + fmtNum(d.radius) + ' ';
            ser(d.kernel, out);
            out += ' ';
            ser(d.fn, out);
            out += ' ';
            ser(d.arg, out);
            out += ' ';
            ser(d.scale, out);
            out += ')';
            return;
        }
    }
    throw Error("serialize: corrupt node");
}

// tokenizer for the prefix DSL
struct Lexer {
    const std::string& s;
    size_t pos = 0;

    explicit Lexer(const std::string& str) : s(str) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool atEnd() {
        skipWs();
        return pos >= s.size();
    }

    char peek() {
        skipWs();
        if (pos >= s.size()) throw ParseError("unexpected end of expression");
        return s[pos];
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "' at position " +
                             std::to_string(pos));
        ++pos;
    }

    std::string atom() {
        skipWs();
        size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
               s[pos] != '(' && s[pos] != ')')
            ++pos;
        if (start == pos) throw ParseError("expected atom at position " + std::to_string(pos));
        return s.substr(start, pos - start);
    }
};

bool isNumberToken(const std::string& t) {
    char* end = nullptr;
    std::strtod(t.c_str(), &end);
    return end && *end == '\0' && end != t.c_str();
}

double toNumber(const std::string& t) {
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (!end || *end != '\0') throw ParseError("bad number '" + t + "'");
    return v;
}

int toInt(const std::string& t) {
    try {
        size_t idx = 0;
        int v = std::stoi(t, &idx);
        if (idx != t.size()) throw ParseError("bad integer '" + t + "'");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad integer '" + t + "'");
    }
}

Expr parseNode(Lexer& lx);

Expr parseForm(Lexer& lx) {
    lx.expect('(');
    const std::string head = lx.atom();
    Expr result;
    if (head == "+" || head == "-" || head == "*") {
        Expr a = parseNode(lx), b = parseNode(lx);
        result = head == "+" ? add(a, b) : head == "-" ? sub(a, b) : mul(a, b);
    } else if (head == "divc") {
        int k = toInt(lx.atom());
        double floor = toNumber(lx.atom());
        Expr num = parseNode(lx), nn = parseNode(lx);
        result = certifiedDiv(num, nn, DivCertificate{k, floor});
    } else if (head == "^") {
        Expr a = parseNode(lx);
        result = powi(a, toInt(lx.atom()));
    } else if (head == "sin" || head == "cos" || head == "exp" || head == "log") {
        Expr a = parseNode(lx);
        result = head == "sin" ? sinE(a) : head == "cos" ? cosE(a) : head == "exp" ? expE(a) : logE(a);
    } else if (head == "poly") {
        std::vector<double> coeffs;
        while (true) {
            if (lx.peek() == '(') break;
            std::string t = lx.atom();
            if (isNumberToken(t)) {
                coeffs.push_back(toNumber(t));
                // the final atom may be the argument (x_i / eps); detect by
                // lookahead on close paren
                lx.skipWs();
            } else {
                // non-numeric atom terminates the coefficient list
                if (t == "eps")
                    result = poly(coeffs, epsilon());
                else if (t.size() > 1 && t[0] == 'x')
                    result = poly(coeffs, var(toInt(t.substr(1))));
                else
                    throw ParseError("bad poly argument '" + t + "'");
                break;
            }
        }
        if (!result) result = poly(coeffs, parseNode(lx));
    } else if (head == "bump") {
        int k = toInt(lx.atom());
        result = bump(k, parseNode(lx));
    } else if (head == "conv") {
        std::string tagName = lx.atom();
        ConvTag tag;
        if (tagName == "direct")
            tag = ConvTag::Direct;
        else if (tagName == "anti")
            tag = ConvTag::Antideriv;
        else if (tagName == "pv")
            tag = ConvTag::PvHilbert;
        else
            throw ParseError("bad conv tag '" + tagName + "'");
        int p = toInt(lx.atom());
        double radius = toNumber(lx.atom());
        double period = toNumber(lx.atom());
        Expr kernel = parseNode(lx), arg = parseNode(lx), scale = parseNode(lx);
        result = conv(tag, kernel, radius, p, arg, scale, period);
    } else if (head == "sconv") {
        double radius = toNumber(lx.atom());
        Expr kernel = parseNode(lx), fn = parseNode(lx), arg = parseNode(lx),
             scale = parseNode(lx);
        result = smoothConv(kernel, radius, fn, arg, scale);
    } else {
        throw ParseError("unknown form '" + head + "'");
    }
    lx.expect(')');
    return result;
}

Expr parseNode(Lexer& lx) {
    if (lx.peek() == '(') return parseForm(lx);
    std::string t = lx.atom();
    if (t == "eps") return epsilon();
    if (isNumberToken(t)) return constant(toNumber(t));
    if (t.size() > 1 && t[0] == 'x') return var(toInt(t.substr(1)));
    throw ParseError("unknown atom '" + t + "'");
}

}  // namespace

std::string serialize(const Expr& e) {
    std::string out;
    ser(e, out);
    return out;
}

Expr parseExpr(const std::string& text) {
    Lexer lx(text);
    Expr e = parseNode(lx);
    if (!lx.atEnd()) throw ParseError("trailing input after expression");
    return e;
}

bool structurallyEqual(const Expr& a, const Expr& b) {
    return a == b || serialize(a) == serialize(b);
}

}  // namespace gf
