// Command-line front end: classification, embedding, pairing, association,
// geodesics, flows, and the four worked demos. Emits CSV (fixed %.17g
// formatting, byte-identical across runs) plus JSON verdict documents.
//
// Exit codes: 0 yes/pass, 1 no/fail, 2 inconclusive, 64 usage/parse error,
// 70 internal error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gf/association.hpp"
#include "gf/asymptotics.hpp"
#include "gf/config.hpp"
#include "gf/flows.hpp"
#include "gf/geometry.hpp"
#include "gf/mollifier.hpp"
#include "gf/netspec.hpp"
#include "gf/quadrature.hpp"

using nlohmann::json;
using namespace gf;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

int verdictExit(Verdict v) {
    switch (v) {
        case Verdict::Yes: return kExitYes;
        case Verdict::No: return kExitNo;
        default: return kExitInconclusive;
    }
}

// Shared flags; a config file is applied first, flags override it.
struct Common {
    std::string configFile;
    std::string outDir;
    std::string gridSpec;  // "eps_max:ratio:count"
    int mollifierQ = -1;
    double mollifierR = -1;
};

void addCommon(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.configFile, "run configuration file (key = value)");
    sub->add_option("--out", c.outDir, "output directory for CSV/JSON reports");
    sub->add_option("--grid", c.gridSpec, "epsilon grid as eps_max:ratio:count");
    sub->add_option("--mollifier-q", c.mollifierQ, "mollifier vanishing-moment order");
    sub->add_option("--mollifier-r", c.mollifierR, "mollifier support radius");
}

RunConfig resolveConfig(const Common& c) {
    RunConfig cfg;
    if (!c.configFile.empty()) cfg = RunConfig::fromFile(c.configFile);
    if (!c.gridSpec.empty()) {
        double emax = 0, ratio = 0;
        int count = 0;
        char colon1 = 0, colon2 = 0;
        std::istringstream in(c.gridSpec);
        in >> emax >> colon1 >> ratio >> colon2 >> count;
        if (!in || colon1 != ':' || colon2 != ':')
            throw ParseError("--grid: expected eps_max:ratio:count");
        cfg.epsMax = emax;
        cfg.ratio = ratio;
        cfg.gridCount = count;
    }
    if (c.mollifierQ > 0) cfg.mollifierQ = c.mollifierQ;
    if (c.mollifierR > 0) cfg.mollifierR = c.mollifierR;
    if (!c.outDir.empty()) cfg.outDir = c.outDir;
    std::filesystem::create_directories(cfg.outDir);
    return cfg;
}

std::string outPath(const RunConfig& cfg, const std::string& name) {
    return cfg.outDir + "/" + name;
}

void writeJson(const RunConfig& cfg, const std::string& name, const json& doc) {
    std::ofstream out(outPath(cfg, name));
    out << doc.dump(2) << "\n";
}

// Positional expression arguments: a path to a file holding the text, or the
// text itself when no such file exists.
std::string readSpec(const std::string& arg) {
    std::ifstream in(arg);
    if (!in) return arg;
    std::ostringstream all;
    all << in.rdbuf();
    std::string s = all.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::vector<double> parseNumbers(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(std::stod(item));
    return out;
}

// "lo:hi[,lo:hi...]"
Box parseBox(const std::string& text) {
    std::vector<double> lo, hi;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const size_t colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("--box: expected lo:hi");
        lo.push_back(std::stod(item.substr(0, colon)));
        hi.push_back(std::stod(item.substr(colon + 1)));
    }
    return Box::of(std::move(lo), std::move(hi));
}

json orderJson(const OrderEstimate& e) {
    return json{{"slope", e.slope},
                {"intercept", e.intercept},
                {"residual", e.residual},
                {"usable", e.usable},
                {"zero_net", e.zeroNet}};
}

// ---- classify ----------------------------------------------------------

struct ClassifyArgs {
    Common common;
    std::string expr;
    std::string mode = "moderate";
    std::string box = "-1:1";
    std::string domain = "-3:3";
    int alphaMax = 2;
    int order = 4;
};

int runClassify(const ClassifyArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const Box K = parseBox(a.box);
    const Box dom = parseBox(a.domain);
    const ChartDomain chart = ChartDomain::box(dom.lo, dom.hi);
    const Representative rep = parseNet(readSpec(a.expr), rho, chart);

    Classification result;
    if (a.mode == "moderate")
        result = classifyModerate(rep, K, a.alphaMax, grid, cfg.tolerances());
    else if (a.mode == "negligible")
        result = classifyNegligible(rep, K, a.order, grid, true, cfg.tolerances());
    else
        throw ParseError("--mode: expected moderate or negligible");

    const std::vector<double> sup = supOnCompact(rep, K, std::vector<int>(K.dim(), 0), grid);
    CsvWriter csv(outPath(cfg, "classify_sup.csv"), {"eps", "sup"});
    for (int j = 0; j < grid.size(); ++j) csv.row({grid[j], sup[static_cast<size_t>(j)]});

    json doc{{"command", "classify"},
             {"mode", a.mode},
             {"verdict", verdictName(result.verdict)},
             {"order", result.order},
             {"worst_slope", result.worstSlope},
             {"worst_residual", result.worstResidual}};
    for (const auto& e : result.perAlpha) doc["per_alpha"].push_back(orderJson(e));
    writeJson(cfg, "classify.json", doc);
    std::cout << "classify: " << verdictName(result.verdict) << " (order " << result.order
              << ", slope " << result.worstSlope << ")\n";
    return verdictExit(result.verdict);
}

// ---- embed -------------------------------------------------------------

struct EmbedArgs {
    Common common;
    std::string dist;
    std::string domain = "-3:3";
    int samples = 201;
};

int runEmbed(const EmbedArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const Box dom = parseBox(a.domain);
    const ChartDomain chart = ChartDomain::box(dom.lo, dom.hi);
    const Representative rep =
        embedDistribution(parseDistribution(readSpec(a.dist)), rho, chart, cfg.epsMax);

    CsvWriter csv(outPath(cfg, "embed.csv"), {"eps", "x", "value"});
    const double lo = dom.lo[0], hi = dom.hi[0];
    for (double eps : grid.values())
        for (int s = 0; s < a.samples; ++s) {
            const double x = lo + (hi - lo) * (s + 0.5) / a.samples;
            csv.row({eps, x, rep.evalScalar(eps, std::span<const double>(&x, 1))});
        }
    std::cout << "embed: wrote " << grid.size() * a.samples << " samples\n";
    return kExitYes;
}

// ---- pair --------------------------------------------------------------

struct PairArgs {
    Common common;
    std::string expr;
    std::string phi = "0:1";
    std::string domain = "-3:3";
};

TestFunction parsePhi(const std::string& spec) {
    std::vector<double> lo, hi;
    std::istringstream in(spec);
    std::string item;
    std::vector<double> parts;
    while (std::getline(in, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() < 2 || parts.size() > 3)
        throw ParseError("--phi: expected center:halfWidth[:amplitude]");
    return TestFunction::bumpAt(parts[0], parts[1], parts.size() == 3 ? parts[2] : 1.0);
}

int runPair(const PairArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const Box dom = parseBox(a.domain);
    const ChartDomain chart = ChartDomain::box(dom.lo, dom.hi);
    const Representative rep = parseNet(readSpec(a.expr), rho, chart);
    const TestFunction phi = parsePhi(a.phi);

    const AssociatedLimit lim = associatedLimit(rep, phi, grid, cfg.tolAssoc);
    CsvWriter csv(outPath(cfg, "pair.csv"), {"eps", "pairing"});
    for (int j = 0; j < grid.size(); ++j) csv.row({grid[j], lim.values[static_cast<size_t>(j)]});
    writeJson(cfg, "pair.json",
              json{{"command", "pair"},
                   {"limit", lim.limit},
                   {"converged", lim.converged},
                   {"accelerated", lim.accelerated}});
    std::cout << "pair: limit " << CsvWriter::formatNumber(lim.limit)
              << (lim.converged ? " (converged)" : " (not converged)") << "\n";
    return lim.converged ? kExitYes : kExitInconclusive;
}

// ---- associate ---------------------------------------------------------

struct AssociateArgs {
    Common common;
    std::string exprU, exprV;
    std::string box = "-2:2";
    std::string domain = "-3:3";
};

int runAssociate(const AssociateArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const Box dom = parseBox(a.domain);
    const ChartDomain chart = ChartDomain::box(dom.lo, dom.hi);
    const Representative u = parseNet(readSpec(a.exprU), rho, chart);
    const Representative v = parseNet(readSpec(a.exprV), rho, chart);
    const Box K = parseBox(a.box);
    const Verdict verdict = isAssociated(u, v, defaultBattery(K), grid, cfg.tolAssoc);
    writeJson(cfg, "associate.json",
              json{{"command", "associate"}, {"verdict", verdictName(verdict)}});
    std::cout << "associate: " << verdictName(verdict) << "\n";
    return verdictExit(verdict);
}

// ---- geodesic ----------------------------------------------------------

struct GeodesicArgs {
    Common common;
    std::string profile = "(- (^ x0 2) (^ x1 2))";  // f(x, y) of the pp-wave
    std::string start = "-1,0,1,1";
    std::string velocity = "1,0,0,0";
    double t0 = 0, t1 = 2;
};

void writeGeodesicCsvs(const RunConfig& cfg, const GeodesicNet& net, const std::string& prefix) {
    CsvWriter curves(outPath(cfg, prefix + "_geodesics.csv"),
                     {"eps", "t", "u", "v", "x", "y", "du", "dv", "dx", "dy"});
    for (size_t i = 0; i < net.epsValues.size(); ++i)
        for (double t : net.sampleTimes) {
            std::vector<double> row{net.epsValues[i], t};
            const std::vector<double> y = net.curves[i].at(t);
            row.insert(row.end(), y.begin(), y.end());
            curves.row(row);
        }
    CsvWriter lim(outPath(cfg, prefix + "_limit.csv"), {"t", "u", "v", "x", "y"});
    for (size_t s = 0; s < net.sampleTimes.size(); ++s) {
        std::vector<double> row{net.sampleTimes[s]};
        row.insert(row.end(), net.limitPositions[s].begin(), net.limitPositions[s].end());
        lim.row(row);
    }
}

int runGeodesic(const GeodesicArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const Expr f = parseExpr(readSpec(a.profile));
    const GeneralizedMetric G =
        checkMetric(ppWaveMetric(f, rho), grid, Box::of({-1, -1, -1, -1}, {1, 1, 1, 1}), 32);
    const std::vector<double> p0 = parseNumbers(a.start);
    const std::vector<double> v0 = parseNumbers(a.velocity);
    if (p0.size() != 4 || v0.size() != 4)
        throw ParseError("geodesic: start and velocity need 4 components (u,v,x,y)");
    const GeodesicNet net = geodesicNet(G, p0, v0, grid, a.t0, a.t1);
    writeGeodesicCsvs(cfg, net, "geodesic");
    writeJson(cfg, "geodesic.json",
              json{{"command", "geodesic"},
                   {"c_bounded", net.cBounded},
                   {"limit_cauchy", net.limitCauchy},
                   {"last_cauchy_distance", net.lastCauchyDistance}});
    std::cout << "geodesic: limit " << (net.limitCauchy ? "Cauchy" : "not Cauchy")
              << " (last distance " << net.lastCauchyDistance << ")\n";
    return net.limitCauchy ? kExitYes : kExitInconclusive;
}

// ---- flow --------------------------------------------------------------

struct FlowArgs {
    Common common;
    double t0 = 0, t1 = 2;
    int timeSamples = 101;
};

int runFlow(const FlowArgs& a) {
    RunConfig cfg = resolveConfig(a.common);
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    const TorusExampleReport rep = torusExample(rho, grid);

    const std::vector<std::vector<double>> lattice = {
        {0.7, 0.3}, {2.5, 4.0}, {5.0, 1.0}};
    const GeneralizedFlow phi = flowNet(rep.field, grid, a.t0, a.t1, lattice);

    CsvWriter csv(outPath(cfg, "flow_trajectories.csv"),
                  {"eps", "alpha0", "beta0", "t", "alpha", "beta"});
    for (size_t i = 0; i < phi.epsValues.size(); ++i)
        for (size_t p = 0; p < lattice.size(); ++p)
            for (int s = 0; s < a.timeSamples; ++s) {
                const double t = a.t0 + (a.t1 - a.t0) * s / (a.timeSamples - 1.0);
                const std::vector<double> y =
                    rep.field.chart.wrap(phi.curves[i][p].at(t));
                csv.row({phi.epsValues[i], lattice[p][0], lattice[p][1], t, y[0], y[1]});
            }

    const FlowIdentityReport ids = flowIdentities(rep.field, phi);
    writeJson(cfg, "flow.json",
              json{{"command", "flow"},
                   {"max_identity_residual", ids.maxIdentityResidual},
                   {"max_group_residual", ids.maxGroupResidual}});
    const bool pass =
        ids.maxIdentityResidual <= cfg.tolAssoc && ids.maxGroupResidual <= cfg.tolAssoc;
    std::cout << "flow: identity residual " << ids.maxIdentityResidual << ", group residual "
              << ids.maxGroupResidual << (pass ? " (pass)" : " (fail)") << "\n";
    return pass ? kExitYes : kExitNo;
}

// ---- demos -------------------------------------------------------------

struct Check {
    std::string label;
    bool pass;
    std::string detail;
};

int reportChecks(const std::string& demo, const std::vector<Check>& checks,
                 const RunConfig& cfg) {
    bool all = true;
    json doc{{"command", "demo"}, {"demo", demo}};
    for (const Check& c : checks) {
        all = all && c.pass;
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.label << ": " << c.detail << "\n";
        doc["checks"].push_back({{"label", c.label}, {"pass", c.pass}, {"detail", c.detail}});
    }
    doc["pass"] = all;
    writeJson(cfg, "demo_" + demo + ".json", doc);
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? kExitYes : kExitNo;
}

std::string fmt(const char* pattern, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// Impulsive plane wave: refracted geodesics and curvature concentration.
int demoPpwave(const RunConfig& cfg) {
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    std::vector<Check> checks;

    const Expr fVac = sub(powi(var(0), 2), powi(var(1), 2));   // x^2 - y^2
    const Expr fMat = add(powi(var(0), 2), powi(var(1), 2));   // x^2 + y^2
    const Box sample = Box::of({-1, -1, -1, -1}, {1, 1, 1, 1});
    const GeneralizedMetric G = checkMetric(ppWaveMetric(fVac, rho), grid, sample, 32);
    const GeneralizedMetric GMat = checkMetric(ppWaveMetric(fMat, rho), grid, sample, 32);

    const double origin[4] = {0, 0, 0, 0};
    const double det = evalExpr(G.det(), std::span<const double>(origin, 4), 0.1);
    checks.push_back({"metric admitted, det = -1/4, index 1",
                      G.index() == 1 && std::abs(det + 0.25) <= 1e-12,
                      fmt("det = %.17g, index = %.0f", det, G.index())});

    const std::vector<double> p0{-1, 0, 1, 1}, v0{1, 0, 0, 0};
    const GeodesicNet net = geodesicNet(G, p0, v0, grid, 0.0, 2.0);
    writeGeodesicCsvs(cfg, net, "ppwave");

    // velocity jump in x across the pulse, extrapolated over the grid
    std::vector<double> jumps;
    for (const auto& c : net.curves) {
        const std::vector<double> before = c.at(0.5), after = c.at(1.5);
        jumps.push_back(after[6] - before[6]);  // xdot component
    }
    const double jump = aitkenAccelerate(jumps).back();
    const double xPulse = net.curves.back().at(1.0)[2];
    const double expected = xPulse;  // (1/2) d_x f = x for f = x^2 - y^2
    checks.push_back({"refraction jump = (1/2) d_x f within 2%",
                      std::abs(jump - expected) <= 0.02 * std::abs(expected),
                      fmt("jump = %.6f, expected %.6f", jump, expected)});

    double maxSecond = 0;
    const size_t n = net.sampleTimes.size();
    for (size_t s = 1; s + 1 < n; ++s) {
        const double u = p0[0] + net.sampleTimes[s];  // du/dt = 1
        if (std::abs(u) <= 10 * grid.smallest()) continue;
        for (int i = 0; i < 4; ++i)
            maxSecond = std::max(
                maxSecond, std::abs(net.limitPositions[s + 1][static_cast<size_t>(i)] -
                                    2 * net.limitPositions[s][static_cast<size_t>(i)] +
                                    net.limitPositions[s - 1][static_cast<size_t>(i)]));
    }
    checks.push_back({"limit trajectory straight off the pulse (2nd differences <= 1e-4)",
                      net.limitCauchy && maxSecond <= 1e-4,
                      fmt("max 2nd difference = %.3e, Cauchy distance = %.3e", maxSecond,
                          net.lastCauchyDistance)});
    checks.push_back({"geodesic net c-bounded", net.cBounded, net.cBounded ? "yes" : "no"});

    // curvature concentration: int R_uu(eps, u) phi(u) du -> -(1/2) lap f phi(0)
    const TestFunction phi = TestFunction::bumpAt(0.0, 1.0);
    const double x0 = 1.0, y0 = 1.0;
    auto pairing = [&](const GeneralizedMetric& GG, double eps) {
        return quad::adaptive(
            [&](double u) {
                const double x[4] = {u, 0.0, x0, y0};
                return ricci(GG, eps, std::span<const double>(x, 4))[0] * phi(u);
            },
            -1.5, 1.5, 1e-9, {-rho.radius() * eps, 0.0, rho.radius() * eps});
    };
    std::vector<double> vac, mat;
    CsvWriter curv(outPath(cfg, "ppwave_curvature.csv"),
                   {"eps", "vacuum_pairing", "matter_pairing"});
    for (double eps : grid.values()) {
        vac.push_back(pairing(G, eps));
        mat.push_back(pairing(GMat, eps));
        curv.row({eps, vac.back(), mat.back()});
    }
    const double target = -0.5 * 4.0 * phi(0.0);  // lap(x^2 + y^2) = 4
    const double vacLimit = vac.back();
    const double matLimit = aitkenAccelerate(mat).back();
    checks.push_back({"vacuum profile: curvature pairing -> 0 (within 1% of matter scale)",
                      std::abs(vacLimit) <= 0.01 * std::abs(target),
                      fmt("limit = %.3e", vacLimit)});
    checks.push_back({"matter profile: pairing -> -(1/2) lap f phi(0) within 1%",
                      std::abs(matLimit - target) <= 0.01 * std::abs(target),
                      fmt("limit = %.6f, target = %.6f", matLimit, target)});

    return reportChecks("ppwave", checks, cfg);
}

// Slow-scale torus field: computed flow vs closed form vs discontinuous limit.
int demoTorusFlow(const RunConfig& cfg) {
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    std::vector<Check> checks;

    const TorusExampleReport rep = torusExample(rho, grid);
    CsvWriter csv(outPath(cfg, "torus_flow.csv"),
                  {"eps", "sup_vs_closed_form", "limit_distance"});
    for (int j = 0; j < grid.size(); ++j)
        csv.row({grid[j], rep.supVsClosedForm[static_cast<size_t>(j)],
                 rep.limitDistances[static_cast<size_t>(j)]});

    checks.push_back({"flow matches the closed form (sup <= 1e-6 on every grid eps)",
                      rep.worstClosedForm <= 1e-6,
                      fmt("worst sup = %.3e", rep.worstClosedForm)});
    checks.push_back({"pointwise convergence to the discontinuous limit off the pulse window",
                      rep.limitDistanceAtSmallestEps <= 1e-6,
                      fmt("distance at smallest eps = %.3e (from %.3e at eps_max)",
                          rep.limitDistanceAtSmallestEps, rep.limitDistances.front())});

    const EpsilonGrid small(cfg.epsMax, cfg.ratio, 8);
    const std::vector<std::vector<double>> lattice = {{0.7, 0.3}, {2.5, 4.0}, {5.0, 1.0}};
    const GeneralizedFlow phi = flowNet(rep.field, small, 0.0, 2.0, lattice);
    const FlowIdentityReport ids = flowIdentities(rep.field, phi);
    checks.push_back({"flow identities (Phi(0,.) = id, group property) <= 1e-6",
                      ids.maxIdentityResidual <= 1e-6 && ids.maxGroupResidual <= 1e-6,
                      fmt("identity = %.3e, group = %.3e", ids.maxIdentityResidual,
                          ids.maxGroupResidual)});

    return reportChecks("torus-flow", checks, cfg);
}

// Point values at generalized points distinguish u from 0 where classical
// point values cannot.
int demoPointValue(const RunConfig& cfg) {
    const EpsilonGrid grid = cfg.grid();
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    std::vector<Check> checks;

    // u_eps(x) = phi_eps(x - eps), a moving shrinking pulse with u -> 0 in D'
    const ChartDomain chart = ChartDomain::interval(-2, 2);
    const Representative u = Representative::scalar(
        conv(ConvTag::Direct, rho.kernel(), rho.radius(), 1, sub(var(0), epsilon()),
             epsilon()),
        chart);

    const std::vector<double> classicalPoints{0.0, 0.3, -0.3};
    std::vector<std::vector<double>> classicalValues;
    for (double p : classicalPoints) {
        const GeneralizedNumber gn = pointEval(u, GeneralizedPoint::classical({p}));
        std::vector<double> vals;
        for (double eps : grid.values()) vals.push_back(gn.at(eps));
        classicalValues.push_back(std::move(vals));
    }
    const GeneralizedPoint moving({epsilon()}, Box::interval(0, cfg.epsMax), grid);
    const GeneralizedNumber gnMoving = pointEval(u, moving);
    std::vector<double> movingAbs;
    for (double eps : grid.values()) movingAbs.push_back(std::abs(gnMoving.at(eps)));

    CsvWriter csv(outPath(cfg, "pointvalue.csv"),
                  {"eps", "u_at_0", "u_at_p03", "u_at_m03", "u_at_moving_point"});
    for (int j = 0; j < grid.size(); ++j)
        csv.row({grid[j], classicalValues[0][static_cast<size_t>(j)],
                 classicalValues[1][static_cast<size_t>(j)],
                 classicalValues[2][static_cast<size_t>(j)],
                 movingAbs[static_cast<size_t>(j)]});

    bool tailsZero = true;
    double worstTail = 0;
    for (const auto& vals : classicalValues)
        for (size_t j = vals.size() - 10; j < vals.size(); ++j) {
            worstTail = std::max(worstTail, std::abs(vals[j]));
            tailsZero = tailsZero && vals[j] == 0.0;
        }
    checks.push_back({"classical point values vanish identically for small eps", tailsZero,
                      fmt("worst tail value = %.3e", worstTail)});

    const OrderEstimate est = fitOrder(movingAbs, grid);
    checks.push_back({"value at the moving point p = [(eps)] grows like 1/eps",
                      est.usable && std::abs(est.slope + 1.0) <= 0.1,
                      fmt("fitted slope = %.4f (expected -1)", est.slope)});

    return reportChecks("pointvalue", checks, cfg);
}

// The multiplication obstruction: bracketings of x, delta, vp(1/x) give
// different distributional limits; the algebra keeps them apart.
int demoSchwartzObstruction(const RunConfig& cfg) {
    // a trimmed grid: the principal-value factor makes pairings expensive
    const int count = std::min(cfg.gridCount, 14);
    const EpsilonGrid grid(cfg.epsMax, cfg.ratio, std::max(count, 8));
    const Mollifier rho = Mollifier::make(cfg.mollifierQ, cfg.mollifierR);
    std::vector<Check> checks;

    const ChartDomain chart = ChartDomain::box({-3}, {3});
    const TestFunction phi = TestFunction::bumpAt(0.0, 1.0);
    const double phi0 = phi(0.0);

    // (x . delta) . vp(1/x), inner product taken classically: x . delta = 0
    const Representative zero = Representative::scalar(constant(0.0), chart);
    // delta . (x . vp(1/x)), inner product taken classically: x . vp = 1
    const Representative delta = embedDistribution(parseDistribution("delta"), rho, chart);
    // the genuine product in the algebra, no classical shortcuts
    const Representative full =
        mul(mul(embedSmooth(var(0), chart), delta),
            embedDistribution(parseDistribution("pv_inv"), rho, chart));

    const AssociatedLimit l1 = associatedLimit(zero, phi, grid, cfg.tolAssoc);
    const AssociatedLimit l2 = associatedLimit(delta, phi, grid, cfg.tolAssoc);
    const AssociatedLimit l3 = associatedLimit(full, phi, grid, cfg.tolAssoc);

    CsvWriter csv(outPath(cfg, "schwartz_obstruction.csv"),
                  {"eps", "inner_x_delta", "inner_x_vp", "genuine_product"});
    for (int j = 0; j < grid.size(); ++j)
        csv.row({grid[j], l1.values[static_cast<size_t>(j)],
                 l2.values[static_cast<size_t>(j)], l3.values[static_cast<size_t>(j)]});

    checks.push_back({"bracketing (x.delta).vp -> 0", std::abs(l1.limit) <= 1e-9,
                      fmt("limit = %.3e", l1.limit)});
    checks.push_back({"bracketing delta.(x.vp) -> phi(0)",
                      l2.converged && std::abs(l2.limit - phi0) <= 0.01 * phi0,
                      fmt("limit = %.6f, phi(0) = %.6f", l2.limit, phi0)});
    checks.push_back({"genuine product x.delta.vp -> phi(0)/2",
                      std::abs(l3.limit - 0.5 * phi0) <= 0.01 * 0.5 * phi0,
                      fmt("limit = %.6f, phi(0)/2 = %.6f", l3.limit, 0.5 * phi0)});
    checks.push_back({"the three bracketings are pairwise distinct",
                      std::abs(l2.limit - l1.limit) > 0.1 * phi0 &&
                          std::abs(l3.limit - l1.limit) > 0.1 * phi0 &&
                          std::abs(l2.limit - l3.limit) > 0.1 * phi0,
                      "0, phi(0), phi(0)/2"});

    return reportChecks("schwartz-obstruction", checks, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized-function (Colombeau) toolbox"};
    app.require_subcommand(1);

    ClassifyArgs classifyArgs;
    CLI::App* classify = app.add_subcommand(
        "classify", "moderateness / negligibility of a net expression");
    classify->add_option("expr", classifyArgs.expr, "net expression (file or literal)")
        ->required();
    classify->add_option("--mode", classifyArgs.mode, "moderate | negligible");
    classify->add_option("--box", classifyArgs.box, "compact K as lo:hi");
    classify->add_option("--domain", classifyArgs.domain, "chart domain as lo:hi");
    classify->add_option("--alpha-max", classifyArgs.alphaMax, "derivative sweep order");
    classify->add_option("--order", classifyArgs.order, "negligibility order m");
    addCommon(classify, classifyArgs.common);

    EmbedArgs embedArgs;
    CLI::App* embed = app.add_subcommand("embed", "sample the embedding of a distribution");
    embed->add_option("distribution", embedArgs.dist, "distribution spec (file or literal)")
        ->required();
    embed->add_option("--domain", embedArgs.domain, "chart domain as lo:hi");
    embed->add_option("--samples", embedArgs.samples, "sample points per eps");
    addCommon(embed, embedArgs.common);

    PairArgs pairArgs;
    CLI::App* pairCmd = app.add_subcommand("pair", "distributional pairing along the grid");
    pairCmd->add_option("expr", pairArgs.expr, "net expression (file or literal)")->required();
    pairCmd->add_option("--phi", pairArgs.phi, "test bump center:halfWidth[:amplitude]");
    pairCmd->add_option("--domain", pairArgs.domain, "chart domain as lo:hi");
    addCommon(pairCmd, pairArgs.common);

    AssociateArgs associateArgs;
    CLI::App* associate = app.add_subcommand("associate", "association of two nets");
    associate->add_option("u", associateArgs.exprU, "first net")->required();
    associate->add_option("v", associateArgs.exprV, "second net")->required();
    associate->add_option("--box", associateArgs.box, "battery support box lo:hi");
    associate->add_option("--domain", associateArgs.domain, "chart domain as lo:hi");
    addCommon(associate, associateArgs.common);

    GeodesicArgs geodesicArgs;
    CLI::App* geodesicCmd =
        app.add_subcommand("geodesic", "impulsive-wave geodesics over the grid");
    geodesicCmd->add_option("--profile", geodesicArgs.profile,
                            "wave profile f(x0, x1), prefix expression");
    geodesicCmd->add_option("--start", geodesicArgs.start, "start point u,v,x,y");
    geodesicCmd->add_option("--velocity", geodesicArgs.velocity, "start velocity");
    geodesicCmd->add_option("--t0", geodesicArgs.t0, "start time");
    geodesicCmd->add_option("--t1", geodesicArgs.t1, "end time");
    addCommon(geodesicCmd, geodesicArgs.common);

    FlowArgs flowArgs;
    CLI::App* flowCmd = app.add_subcommand("flow", "slow-scale torus field flow");
    flowCmd->add_option("--t0", flowArgs.t0, "start time");
    flowCmd->add_option("--t1", flowArgs.t1, "end time");
    flowCmd->add_option("--time-samples", flowArgs.timeSamples, "CSV samples per curve");
    addCommon(flowCmd, flowArgs.common);

    Common demoCommon;
    std::string demoName;
    CLI::App* demo = app.add_subcommand("demo", "worked examples with pass/fail summary");
    demo->add_option("name", demoName, "ppwave | torus-flow | pointvalue | schwartz-obstruction")
        ->required();
    addCommon(demo, demoCommon);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (classify->parsed()) return runClassify(classifyArgs);
        if (embed->parsed()) return runEmbed(embedArgs);
        if (pairCmd->parsed()) return runPair(pairArgs);
        if (associate->parsed()) return runAssociate(associateArgs);
        if (geodesicCmd->parsed()) return runGeodesic(geodesicArgs);
        if (flowCmd->parsed()) return runFlow(flowArgs);
        if (demo->parsed()) {
            const RunConfig cfg = resolveConfig(demoCommon);
            if (demoName == "ppwave") return demoPpwave(cfg);
            if (demoName == "torus-flow") return demoTorusFlow(cfg);
            if (demoName == "pointvalue") return demoPointValue(cfg);
            if (demoName == "schwartz-obstruction") return demoSchwartzObstruction(cfg);
            throw ParseError("demo: unknown name '" + demoName + "'");
        }
    } catch (const ParseError& e) {
        std::cout << json{{"error", e.what()}, {"kind", "parse"}}.dump() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}, {"kind", "internal"}}.dump() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
