#pragma once

#include <span>
#include <vector>

#include "gf/chart.hpp"
#include "gf/expr.hpp"
#include "gf/grid.hpp"

namespace gf {

enum class Shape { Scalar, Vector, Matrix };

/// One eps-net (u_eps)_eps of smooth functions on a chart: a scalar, vector
/// or square-matrix array of expression trees sharing the chart domain.
class Representative {
  public:
    static Representative scalar(Expr e, ChartDomain domain);
    static Representative vectorValued(std::vector<Expr> comps, ChartDomain domain);
    static Representative matrixValued(std::vector<Expr> rowMajor, int n, ChartDomain domain);

    Shape shape() const { return shape_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const ChartDomain& domain() const { return domain_; }
    const Expr& comp(int i = 0) const { return comps_[static_cast<size_t>(i)]; }
    const Expr& at(int i, int j) const { return comps_[static_cast<size_t>(i * cols_ + j)]; }
    const std::vector<Expr>& components() const { return comps_; }

    /// Pure pointwise evaluation. eps in (0,1], x in the domain.
    double evalScalar(double eps, std::span<const double> x) const;
    std::vector<double> eval(double eps, std::span<const double> x) const;

    /// Exact symbolic derivative d^alpha, componentwise.
    Representative derive(std::span<const int> alpha) const;
    Representative derive(const std::vector<int>& alpha) const;

    Representative withComponents(std::vector<Expr> comps) const;

  private:
    Shape shape_ = Shape::Scalar;
    int rows_ = 1, cols_ = 1;
    ChartDomain domain_ = ChartDomain::interval(-1, 1);
    std::vector<Expr> comps_;
};

// componentwise algebra; scalars broadcast over vectors/matrices
Representative add(const Representative& a, const Representative& b);
Representative sub(const Representative& a, const Representative& b);
Representative mul(const Representative& a, const Representative& b);
Representative scale(const Representative& a, double c);
Representative scale(const Representative& a, const Expr& c);

/// Quotient by a certified scalar denominator (see certifiedDiv).
Representative div(const Representative& num, const Representative& denNonneg,
                   const DivCertificate& cert);

/// v o u, componentwise on expression trees. u must be vector-valued (or
/// scalar, for 1-D targets) with range inside v's domain; the range is
/// verified on the grid over a dense sample of u's domain.
Representative compose(const Representative& u, const Representative& v,
                       const EpsilonGrid& grid);

}  // namespace gf
