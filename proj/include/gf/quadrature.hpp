#pragma once

#include <functional>
#include <vector>

namespace gf::quad {

using Fn = std::function<double(double)>;

/// Fixed-order Gauss-Legendre on [a, b] (order = number of nodes, <= 64).
double gauss(const Fn& f, double a, double b, int order = 40);

/// Composite Gauss-Legendre: ncells equal cells, `order` nodes per cell.
double compositeGauss(const Fn& f, double a, double b, int ncells, int order = 15);

/// Adaptive Gauss-Kronrod 7/15 to absolute tolerance. Initial subdivision at
/// the supplied breakpoints. Throws QuadratureError on non-convergence.
double adaptive(const Fn& f, double a, double b, double absTol,
                std::vector<double> breakpoints = {}, int maxDepth = 40);

}  // namespace gf::quad
