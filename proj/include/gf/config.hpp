#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "gf/asymptotics.hpp"
#include "gf/grid.hpp"

namespace gf {

/// Flat key=value run configuration; '#' starts a comment. Unknown keys are
/// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    double epsMax = 0.5;
    double ratio = 0.7;
    int gridCount = 24;
    int mollifierQ = 4;
    double mollifierR = 0.8;
    double tolSlope = 0.25;
    double tolRes = 0.15;
    double tolAssoc = 1e-6;
    double odeRelTol = 1e-10;
    std::string outDir = ".";

    static RunConfig fromFile(const std::string& path);
    void apply(const std::string& key, const std::string& value);

    EpsilonGrid grid() const { return EpsilonGrid(epsMax, ratio, gridCount); }
    ClassifyTolerances tolerances() const { return {tolSlope, tolRes}; }
};

/// CSV emission with fixed, locale-independent formatting (%.17g), so equal
/// runs produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<double>& values);
    void textRow(const std::vector<std::string>& cells);

    static std::string formatNumber(double v);

  private:
    std::ofstream out_;
    size_t columns_;
};

}  // namespace gf
