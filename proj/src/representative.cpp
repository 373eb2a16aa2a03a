#include "gf/representative.hpp"

#include <cmath>

#include "gf/errors.hpp"

namespace gf {

Representative Representative::scalar(Expr e, ChartDomain domain) {
    Representative r;
    r.shape_ = Shape::Scalar;
    r.rows_ = r.cols_ = 1;
    r.domain_ = std::move(domain);
    r.comps_ = {std::move(e)};
    return r;
}

Representative Representative::vectorValued(std::vector<Expr> comps, ChartDomain domain) {
    if (comps.empty()) throw ParameterError("representative: empty component list");
    Representative r;
    r.shape_ = Shape::Vector;
    r.rows_ = static_cast<int>(comps.size());
    r.cols_ = 1;
    r.domain_ = std::move(domain);
    r.comps_ = std::move(comps);
    return r;
}

Representative Representative::matrixValued(std::vector<Expr> rowMajor, int n,
                                            ChartDomain domain) {
    if (static_cast<int>(rowMajor.size()) != n * n)
        throw ParameterError("representative: matrix component count != n*n");
    Representative r;
    r.shape_ = Shape::Matrix;
    r.rows_ = r.cols_ = n;
    r.domain_ = std::move(domain);
    r.comps_ = std::move(rowMajor);
    return r;
}

double Representative::evalScalar(double eps, std::span<const double> x) const {
    if (shape_ != Shape::Scalar)
        throw ParameterError("evalScalar: representative is not scalar-valued");
    if (!domain_.contains(x)) throw DomainError("eval: point outside chart domain");
    return evalExpr(comps_[0], x, eps);
}

std::vector<double> Representative::eval(double eps, std::span<const double> x) const {
    if (!domain_.contains(x)) throw DomainError("eval: point outside chart domain");
    std::vector<double> out;
    out.reserve(comps_.size());
    for (const Expr& e : comps_) out.push_back(evalExpr(e, x, eps));
    return out;
}

Representative Representative::derive(std::span<const int> alpha) const {
    std::vector<Expr> out;
    out.reserve(comps_.size());
    for (const Expr& e : comps_) out.push_back(diffMulti(e, alpha));
    Representative r = *this;
    r.comps_ = std::move(out);
    return r;
}

Representative Representative::derive(const std::vector<int>& alpha) const {
    return derive(std::span<const int>(alpha));
}

Representative Representative::withComponents(std::vector<Expr> comps) const {
    if (comps.size() != comps_.size())
        throw ParameterError("withComponents: component count mismatch");
    Representative r = *this;
    r.comps_ = std::move(comps);
    return r;
}

namespace {

using BinOp = Expr (*)(const Expr&, const Expr&);

Representative zip(const Representative& a, const Representative& b, BinOp op,
                   const char* name) {
    if (!(a.domain() == b.domain()))
        throw ParameterError(std::string(name) + ": domain mismatch");
    if (a.shape() == Shape::Scalar && b.shape() != Shape::Scalar) {
        std::vector<Expr> out;
        for (const Expr& e : b.components()) out.push_back(op(a.comp(), e));
        return b.withComponents(std::move(out));
    }
    if (b.shape() == Shape::Scalar && a.shape() != Shape::Scalar) {
        std::vector<Expr> out;
        for (const Expr& e : a.components()) out.push_back(op(e, b.comp()));
        return a.withComponents(std::move(out));
    }
    if (a.shape() != b.shape() || a.rows() != b.rows() || a.cols() != b.cols())
        throw ParameterError(std::string(name) + ": shape mismatch");
    std::vector<Expr> out;
    for (size_t i = 0; i < a.components().size(); ++i)
        out.push_back(op(a.components()[i], b.components()[i]));
    return a.withComponents(std::move(out));
}

}  // namespace

Representative add(const Representative& a, const Representative& b) {
    return zip(a, b, &gf::add, "add");
}

Representative sub(const Representative& a, const Representative& b) {
    return zip(a, b, &gf::sub, "sub");
}

Representative mul(const Representative& a, const Representative& b) {
    return zip(a, b, &gf::mul, "mul");
}

Representative scale(const Representative& a, double c) { return scale(a, constant(c)); }

Representative scale(const Representative& a, const Expr& c) {
    std::vector<Expr> out;
    for (const Expr& e : a.components()) out.push_back(mul(c, e));
    return a.withComponents(std::move(out));
}

Representative div(const Representative& num, const Representative& denNonneg,
                   const DivCertificate& cert) {
    if (denNonneg.shape() != Shape::Scalar)
        throw ParameterError("div: denominator must be scalar-valued");
    if (!(num.domain() == denNonneg.domain())) throw ParameterError("div: domain mismatch");
    std::vector<Expr> out;
    for (const Expr& e : num.components())
        out.push_back(certifiedDiv(e, denNonneg.comp(), cert));
    return num.withComponents(std::move(out));
}

Representative compose(const Representative& u, const Representative& v,
                       const EpsilonGrid& grid) {
    const int m = v.domain().dim();
    const int nu = u.shape() == Shape::Scalar ? 1 : u.rows();
    if (u.shape() == Shape::Matrix)
        throw ParameterError("compose: inner map must be scalar or vector valued");
    if (nu != m) throw CompositionError("compose: inner map dimension != outer domain dimension");

    // verify on the grid that the image of a dense sample stays inside v's
    // domain (c-boundedness into the target chart)
    if (!v.domain().periodic()) {
        const int perAxis = 17;
        const ChartDomain& dom = u.domain();
        std::vector<int> idx(static_cast<size_t>(dom.dim()), 0);
        std::vector<double> x(static_cast<size_t>(dom.dim()));
        while (true) {
            for (int i = 0; i < dom.dim(); ++i) {
                const double t = (idx[static_cast<size_t>(i)] + 0.5) / perAxis;
                x[static_cast<size_t>(i)] = dom.lo(i) + t * (dom.hi(i) - dom.lo(i));
            }
            for (double eps : grid.values()) {
                std::vector<double> y = u.eval(eps, x);
                if (!v.domain().contains(y))
                    throw CompositionError("compose: range escapes outer domain on the grid");
            }
            int k = dom.dim() - 1;
            while (k >= 0 && ++idx[static_cast<size_t>(k)] == perAxis) {
                idx[static_cast<size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }

    std::vector<Expr> inner(u.components().begin(), u.components().end());
    std::vector<Expr> out;
    for (const Expr& e : v.components()) out.push_back(substitute(e, inner));
    Representative r = v.withComponents(std::move(out));
    // result lives on the inner map's domain
    if (v.shape() == Shape::Scalar) return Representative::scalar(r.comp(), u.domain());
    if (v.shape() == Shape::Vector)
        return Representative::vectorValued(r.components(), u.domain());
    return Representative::matrixValued(r.components(), r.rows(), u.domain());
}

}  // namespace gf
