#pragma once

#include <cmath>
#include <vector>

#include "gf/errors.hpp"

namespace gf {

/// Geometric grid eps_j = eps_max * r^j, j = 0..J-1, used for all
/// asymptotic estimation.
class EpsilonGrid {
  public:
    EpsilonGrid(double epsMax, double ratio, int count) {
        if (!(epsMax > 0 && epsMax <= 1.0))
            throw ParameterError("epsilon grid: eps_max must be in (0,1]");
        if (!(ratio > 0 && ratio < 1.0))
            throw ParameterError("epsilon grid: ratio must be in (0,1)");
        if (count < 8) throw ParameterError("epsilon grid: count must be >= 8");
        eps_.reserve(static_cast<size_t>(count));
        double e = epsMax;
        for (int j = 0; j < count; ++j) {
            eps_.push_back(e);
            e *= ratio;
        }
        ratio_ = ratio;
    }

    static EpsilonGrid standard() { return EpsilonGrid(0.5, 0.7, 24); }

    int size() const { return static_cast<int>(eps_.size()); }
    double operator[](int j) const { return eps_[static_cast<size_t>(j)]; }
    double smallest() const { return eps_.back(); }
    double ratio() const { return ratio_; }
    const std::vector<double>& values() const { return eps_; }

  private:
    std::vector<double> eps_;
    double ratio_ = 0;
};

}  // namespace gf
