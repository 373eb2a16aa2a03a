#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gf/config.hpp"
#include "gf/mollifier.hpp"
#include "gf/netspec.hpp"

using namespace gf;

namespace {

std::string tmpFile(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/gf_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream all;
    all << in.rdbuf();
    return all.str();
}

}  // namespace

TEST_CASE("net expressions: embeddings, algebra, powers") {
    const Mollifier rho = Mollifier::make(4, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    const double eps = 0.1, x = 0.05;
    const auto at = [&](const Representative& r) {
        return r.evalScalar(eps, std::span<const double>(&x, 1));
    };

    const Representative d = parseNet("iota(delta)", rho, dom);
    CHECK(at(d) == doctest::Approx(evalExpr1(rho.kernel(), x / eps, 1.0) / eps));

    const Representative combo = parseNet("x * iota(delta) + 0.5 * eps", rho, dom);
    CHECK(at(combo) == doctest::Approx(x * at(d) + 0.5 * eps));

    const Representative sq = parseNet("iota(heaviside)^2 - iota(heaviside)", rho, dom);
    const Representative h = parseNet("iota(heaviside)", rho, dom);
    CHECK(at(sq) == doctest::Approx(at(h) * at(h) - at(h)));

    const Representative s = parseNet("sigma((sin x0)) - 1", rho, dom);
    CHECK(at(s) == doctest::Approx(std::sin(x) - 1.0));

    const Representative parens = parseNet("-(x + eps) * (x - eps)", rho, dom);
    CHECK(at(parens) == doctest::Approx(-(x + eps) * (x - eps)));
}

TEST_CASE("net expression parse errors") {
    const Mollifier rho = Mollifier::make(2, 0.8);
    const ChartDomain dom = ChartDomain::interval(-3, 3);
    CHECK_THROWS_AS(parseNet("iota(delta", rho, dom), ParseError);
    CHECK_THROWS_AS(parseNet("gamma(x)", rho, dom), ParseError);
    CHECK_THROWS_AS(parseNet("x x", rho, dom), ParseError);
    CHECK_THROWS_AS(parseNet("x ^ 0", rho, dom), ParseError);
    CHECK_THROWS_AS(parseNet("", rho, dom), ParseError);
}

TEST_CASE("run configuration: file parsing, comments, unknown keys") {
    const std::string path = tmpFile("config.txt",
                                     "# acceptance run\n"
                                     "eps_max = 0.4\n"
                                     "ratio = 0.6   # tighter grid\n"
                                     "grid_count = 12\n"
                                     "mollifier_q = 6\n"
                                     "out_dir = /tmp/gf_run\n");
    const RunConfig cfg = RunConfig::fromFile(path);
    CHECK(cfg.epsMax == doctest::Approx(0.4));
    CHECK(cfg.ratio == doctest::Approx(0.6));
    CHECK(cfg.gridCount == 12);
    CHECK(cfg.mollifierQ == 6);
    CHECK(cfg.outDir == "/tmp/gf_run");
    CHECK(cfg.tolSlope == doctest::Approx(0.25));  // untouched default

    const EpsilonGrid g = cfg.grid();
    CHECK(g.size() == 12);
    CHECK(g[0] == doctest::Approx(0.4));

    CHECK_THROWS_AS(RunConfig::fromFile(tmpFile("bad1.txt", "eps_maxx = 0.4\n")),
                    ParseError);
    CHECK_THROWS_AS(RunConfig::fromFile(tmpFile("bad2.txt", "eps_max 0.4\n")), ParseError);
    CHECK_THROWS_AS(RunConfig::fromFile(tmpFile("bad3.txt", "eps_max = fast\n")),
                    ParseError);
    CHECK_THROWS_AS(RunConfig::fromFile("/tmp/gf_test_does_not_exist"), ParseError);
}

TEST_CASE("CSV writer: fixed %.17g formatting, stable across runs") {
    const std::string path = "/tmp/gf_test_out.csv";
    {
        CsvWriter csv(path, {"eps", "value"});
        csv.row({0.5, 1.0 / 3.0});
        csv.row({0.1234567890123456789, -2e-300});
    }
    const std::string once = slurp(path);
    {
        CsvWriter csv(path, {"eps", "value"});
        csv.row({0.5, 1.0 / 3.0});
        csv.row({0.1234567890123456789, -2e-300});
    }
    CHECK(slurp(path) == once);
    CHECK(once.substr(0, 10) == "eps,value\n");
    CHECK(once.find("0.33333333333333331") != std::string::npos);

    CsvWriter csv(path, {"a", "b"});
    CHECK_THROWS_AS(csv.row({1.0}), ParameterError);
    std::remove(path.c_str());
}
