#include "gf/mollifier.hpp"

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <mutex>

#include "gf/errors.hpp"
#include "gf/quadrature.hpp"

namespace gf {

namespace {

// cached symbolic kernel derivatives, keyed on the kernel serialization
std::mutex gDerivMtx;

Expr monomialTimes(int k, const Expr& kernel) {
    // y^k * kernel(y) as an expression in the kernel variable
    if (k == 0) return kernel;
    std::vector<double> coeffs(static_cast<size_t>(k) + 1, 0.0);
    coeffs.back() = 1.0;
    return mul(poly(std::move(coeffs), var(0)), kernel);
}

}  // namespace

Mollifier Mollifier::make(int momentOrder, double supportRadius) {
    if (momentOrder < 0 || momentOrder > 8)
        throw ParameterError("mollifier: moment order must be in 0..8");
    if (!(supportRadius > 0)) throw ParameterError("mollifier: radius must be positive");

    const int q = momentOrder;
    const double R = supportRadius;
    const int nb = q / 2 + 1;  // even basis x^{2j} * bump(x/R), j = 0..nb-1

    // basis moments int x^{2i} x^{2j} bump(x/R) dx = R^{2i+2j+1} c_{i+j}
    auto bumpMoment = [](int m) {
        return quad::compositeGauss(
            [m](double t) { return std::pow(t, 2 * m) * std::exp(-1.0 / (1.0 - t * t)); },
            -1.0 + 1e-14, 1.0 - 1e-14, 32, 15);
    };
    Eigen::MatrixXd M(nb, nb);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            M(i, j) = std::pow(R, 2 * (i + j) + 1) * bumpMoment(i + j);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
    rhs(0) = 1.0;
    Eigen::VectorXd c = M.fullPivLu().solve(rhs);
    if (!c.allFinite()) throw Error("mollifier: moment correction system is singular");

    std::vector<double> coeffs(static_cast<size_t>(2 * (nb - 1)) + 1, 0.0);
    for (int j = 0; j < nb; ++j) coeffs[static_cast<size_t>(2 * j)] = c(j);

    Mollifier rho;
    rho.q_ = q;
    rho.radius_ = R;
    rho.kernel_ = mul(poly(std::move(coeffs), var(0)),
                      bump(0, mul(constant(1.0 / R), var(0))));

    // verify the construction invariants by quadrature
    const double unit = rho.moment(0);
    if (std::abs(unit - 1.0) > 1e-10)
        throw Error("mollifier: unit integral violated, residual " +
                    std::to_string(unit - 1.0));
    for (int k = 1; k <= q; ++k)
        if (std::abs(rho.moment(k)) > 1e-10)
            throw Error("mollifier: moment " + std::to_string(k) + " does not vanish");
    return rho;
}

Expr Mollifier::kernelDeriv(int d) const {
    static std::vector<std::pair<std::string, std::vector<Expr>>> cache;
    std::lock_guard<std::mutex> lock(gDerivMtx);
    const std::string key = serialize(kernel_);
    std::vector<Expr>* entry = nullptr;
    for (auto& [k, v] : cache)
        if (k == key) entry = &v;
    if (!entry) {
        cache.emplace_back(key, std::vector<Expr>{kernel_});
        entry = &cache.back().second;
    }
    while (static_cast<int>(entry->size()) <= d) entry->push_back(diff(entry->back(), 0));
    return (*entry)[static_cast<size_t>(d)];
}

double Mollifier::moment(int k) const {
    return quad::adaptive(
        [this, k](double y) { return std::pow(y, k) * evalExpr1(kernel_, y, 1.0); },
        -radius_, radius_, 1e-13);
}

Expr scaledKernel(const Mollifier& rho, int dim) {
    if (dim < 1) throw ParameterError("scaledKernel: dimension must be >= 1");
    Expr prod = conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, var(0), epsilon());
    for (int i = 1; i < dim; ++i)
        prod = mul(prod, conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, var(i), epsilon()));
    return prod;
}

Expr scaledKernel1d(const Mollifier& rho, const Expr& arg, const Expr& scaleExpr,
                    double period) {
    return conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, arg, scaleExpr, period);
}

// ---- embedding ----

namespace {

std::vector<double> polyDerivCoeffs(const std::vector<double>& a) {
    if (a.size() <= 1) return {0.0};
    std::vector<double> r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<double>(i);
    return r;
}

/// iota(H(. - c) * p): sum_k p^(k)(x) (-eps)^k / k! * A_k((x - c)/eps)
/// with A_k the antiderivative of y^k rho(y).
Expr embedSteppedPoly(const Mollifier& rho, double c, std::vector<double> coeffs,
                      double sign) {
    Expr x = var(0);
    Expr argShift = sub(x, constant(c));
    Expr out = constant(0.0);
    std::vector<double> dk = std::move(coeffs);
    double fact = 1.0;
    for (int k = 0; !dk.empty(); ++k) {
        const bool zero = dk.size() == 1 && dk[0] == 0.0;
        if (!zero) {
            Expr ak = conv(ConvTag::Antideriv, monomialTimes(k, rho.kernel()), rho.radius(),
                           0, argShift, epsilon());
            Expr term = mul(poly(dk, x), ak);
            const double factor = sign * (k % 2 == 0 ? 1.0 : -1.0) / fact;
            term = mul(constant(factor), mul(powi(epsilon(), k), term));
            out = add(out, term);
        }
        if (dk.size() == 1) break;
        dk = polyDerivCoeffs(dk);
        fact *= k + 1.0;
    }
    return out;
}

Expr embedTerm(const DistTerm& t, const Mollifier& rho) {
    Expr x = var(0);
    switch (t.kind) {
        case DistTerm::Kind::DiracDelta:
            // delta^(d) * rho_eps = rho_eps^(d) = eps^-(d+1) rho^(d)(x/eps)
            return conv(ConvTag::Direct, rho.kernelDeriv(t.deltaOrder), rho.radius(),
                        t.deltaOrder + 1, x, epsilon());
        case DistTerm::Kind::Heaviside:
            return conv(ConvTag::Antideriv, rho.kernel(), rho.radius(), 0, x, epsilon());
        case DistTerm::Kind::Sign:
            return sub(mul(constant(2.0),
                           conv(ConvTag::Antideriv, rho.kernel(), rho.radius(), 0, x,
                                epsilon())),
                       constant(1.0));
        case DistTerm::Kind::AbsoluteValue: {
            // |.| * rho_eps = x (2 A0(x/eps) - m0) - eps (2 A1(x/eps) - m1)
            Expr a0 = conv(ConvTag::Antideriv, rho.kernel(), rho.radius(), 0, x, epsilon());
            Expr a1 = conv(ConvTag::Antideriv, monomialTimes(1, rho.kernel()), rho.radius(),
                           0, x, epsilon());
            const double m0 = rho.moment(0), m1 = rho.moment(1);
            Expr first = mul(x, sub(mul(constant(2.0), a0), constant(m0)));
            Expr second = mul(epsilon(), sub(mul(constant(2.0), a1), constant(m1)));
            return sub(first, second);
        }
        case DistTerm::Kind::PvReciprocal:
            // (vp(1/.) * rho_eps)(x) = eps^-1 F(x/eps), F the pv transform
            return conv(ConvTag::PvHilbert, rho.kernel(), rho.radius(), 1, x, epsilon());
        case DistTerm::Kind::PiecewisePoly: {
            Expr out = constant(0.0);
            for (const PiecePoly& p : t.pieces) {
                out = add(out, embedSteppedPoly(rho, p.a, p.coeffs, 1.0));
                out = add(out, embedSteppedPoly(rho, p.b, p.coeffs, -1.0));
            }
            return out;
        }
        case DistTerm::Kind::SmoothLiteral:
            // diagonal value plus the moment-series correction node
            return add(t.smooth, smoothConv(rho.kernel(), rho.radius(), t.smooth, x,
                                            epsilon()));
    }
    throw UnsupportedDistributionError("embed: unsupported distribution term");
}

std::vector<double> breakpointsOf(const DistTerm& t) {
    switch (t.kind) {
        case DistTerm::Kind::DiracDelta:
        case DistTerm::Kind::Heaviside:
        case DistTerm::Kind::Sign:
        case DistTerm::Kind::AbsoluteValue:
        case DistTerm::Kind::PvReciprocal:
            return {0.0};
        case DistTerm::Kind::PiecewisePoly: {
            std::vector<double> b;
            for (const PiecePoly& p : t.pieces) {
                b.push_back(p.a);
                b.push_back(p.b);
            }
            return b;
        }
        case DistTerm::Kind::SmoothLiteral:
            return {};
    }
    return {};
}

}  // namespace

Representative embedDistribution(const DistributionSpec& w, const Mollifier& rho,
                                 const ChartDomain& domain, double epsMax) {
    if (domain.dim() != 1)
        throw UnsupportedDistributionError("embed: distributions are embedded in 1-D charts");
    const double margin = epsMax * rho.radius();
    Expr out = constant(0.0);
    for (const DistTerm& t : w.terms) {
        for (double b : breakpointsOf(t))
            if (!(b > domain.lo(0) + margin && b < domain.hi(0) - margin))
                throw DomainError("embed: breakpoint " + std::to_string(b) +
                                  " violates the eps*R margin to the domain boundary");
        out = add(out, mul(constant(t.coeff), embedTerm(t, rho)));
    }
    return Representative::scalar(out, domain);
}

Representative embedSmooth(const Expr& f, const ChartDomain& domain) {
    if (dependsOnEps(f))
        throw ParameterError("embedSmooth: diagonal embedding takes an eps-free expression");
    return Representative::scalar(f, domain);
}

// ---- distribution spec parser ----

namespace {

struct DParser {
    const std::string& s;
    size_t pos = 0;

    explicit DParser(const std::string& str) : s(str) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool done() {
        skipWs();
        return pos >= s.size();
    }

    char peek() {
        skipWs();
        return pos < s.size() ? s[pos] : '\0';
    }

    bool consume(char c) {
        skipWs();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    double number() {
        skipWs();
        char* end = nullptr;
        double v = std::strtod(s.c_str() + pos, &end);
        if (end == s.c_str() + pos) throw ParseError("distribution: expected number");
        pos = static_cast<size_t>(end - s.c_str());
        return v;
    }

    std::string ident() {
        skipWs();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }
};

// polynomial in x, e.g. "2*x^2 - x + 3" or "0"
std::vector<double> parsePolyText(const std::string& text) {
    std::vector<double> coeffs{0.0};
    DParser p(text);
    double sign = 1.0;
    if (p.consume('-')) sign = -1.0;
    while (!p.done()) {
        double c = 1.0;
        bool haveCoeff = false;
        p.skipWs();
        if (p.pos < p.s.size() &&
            (std::isdigit(static_cast<unsigned char>(p.s[p.pos])) || p.s[p.pos] == '.')) {
            c = p.number();
            haveCoeff = true;
        }
        int power = 0;
        p.consume('*');
        if (p.peek() == 'x') {
            ++p.pos;
            power = 1;
            if (p.consume('^')) power = static_cast<int>(p.number());
        } else if (!haveCoeff) {
            throw ParseError("distribution: bad polynomial term in '" + text + "'");
        }
        if (static_cast<int>(coeffs.size()) <= power)
            coeffs.resize(static_cast<size_t>(power) + 1, 0.0);
        coeffs[static_cast<size_t>(power)] += sign * c;
        if (p.done()) break;
        if (p.consume('+'))
            sign = 1.0;
        else if (p.consume('-'))
            sign = -1.0;
        else
            throw ParseError("distribution: expected + or - in polynomial '" + text + "'");
    }
    return coeffs;
}

DistTerm parseAtom(DParser& p) {
    DistTerm t;
    std::string name = p.ident();
    if (name == "delta") {
        t.kind = DistTerm::Kind::DiracDelta;
        while (p.pos < p.s.size() && p.s[p.pos] == '\'') {
            ++t.deltaOrder;
            ++p.pos;
        }
    } else if (name == "heaviside") {
        t.kind = DistTerm::Kind::Heaviside;
    } else if (name == "sign") {
        t.kind = DistTerm::Kind::Sign;
    } else if (name == "abs") {
        t.kind = DistTerm::Kind::AbsoluteValue;
    } else if (name == "pv_inv") {
        t.kind = DistTerm::Kind::PvReciprocal;
    } else if (name == "pp") {
        t.kind = DistTerm::Kind::PiecewisePoly;
        if (!p.consume('[')) throw ParseError("distribution: expected '[' after pp");
        while (true) {
            if (!p.consume('(')) throw ParseError("distribution: expected '(' in pp piece");
            PiecePoly piece;
            piece.a = p.number();
            if (!p.consume(',')) throw ParseError("distribution: expected ',' in pp piece");
            piece.b = p.number();
            if (!p.consume(')')) throw ParseError("distribution: expected ')' in pp piece");
            if (!p.consume(':')) throw ParseError("distribution: expected ':' in pp piece");
            size_t start = p.pos;
            while (p.pos < p.s.size() && p.s[p.pos] != ';' && p.s[p.pos] != ']') ++p.pos;
            piece.coeffs = parsePolyText(p.s.substr(start, p.pos - start));
            if (!(piece.a < piece.b))
                throw ParseError("distribution: pp piece interval must have a < b");
            t.pieces.push_back(std::move(piece));
            if (p.consume(';')) continue;
            if (p.consume(']')) break;
            throw ParseError("distribution: expected ';' or ']' in pp");
        }
        // well-ordered pieces
        for (size_t i = 1; i < t.pieces.size(); ++i)
            if (t.pieces[i].a < t.pieces[i - 1].b)
                throw ParseError("distribution: pp pieces overlap");
    } else if (name == "smooth") {
        t.kind = DistTerm::Kind::SmoothLiteral;
        if (!p.consume('(')) throw ParseError("distribution: expected '(' after smooth");
        int depth = 1;
        size_t start = p.pos;
        while (p.pos < p.s.size() && depth > 0) {
            if (p.s[p.pos] == '(') ++depth;
            if (p.s[p.pos] == ')') --depth;
            ++p.pos;
        }
        if (depth != 0) throw ParseError("distribution: unbalanced smooth(...)");
        t.smooth = parseExpr(p.s.substr(start, p.pos - 1 - start));
    } else {
        throw ParseError("distribution: unknown atom '" + name + "'");
    }
    return t;
}

}  // namespace

DistributionSpec parseDistribution(const std::string& text) {
    DistributionSpec spec;
    DParser p(text);
    double sign = 1.0;
    if (p.consume('-')) sign = -1.0;
    while (true) {
        double coeff = 1.0;
        p.skipWs();
        if (p.pos < p.s.size() &&
            (std::isdigit(static_cast<unsigned char>(p.s[p.pos])) || p.s[p.pos] == '.')) {
            coeff = p.number();
            if (!p.consume('*'))
                throw ParseError("distribution: expected '*' after coefficient");
        }
        DistTerm t = parseAtom(p);
        t.coeff = sign * coeff;
        if (!std::isfinite(t.coeff)) throw ParseError("distribution: non-finite coefficient");
        spec.terms.push_back(std::move(t));
        if (p.done()) break;
        if (p.consume('+'))
            sign = 1.0;
        else if (p.consume('-'))
            sign = -1.0;
        else
            throw ParseError("distribution: expected '+' or '-' between terms");
    }
    return spec;
}

}  // namespace gf
