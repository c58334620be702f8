#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "vicar/classify.hpp"
#include "vicar/parser.hpp"
#include "vicar/problem.hpp"

using namespace vicar;

namespace {

Problem load(const std::string& name) {
    return load_problem(std::string(VICAR_PROBLEM_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("symbolic determinant and inverse") {
    auto S = std::set<std::string>{"a", "b", "c"};
    std::vector<std::vector<Expr>> m{{sym("a"), sym("b"), zero()},
                                     {zero(), sym("c"), one()},
                                     {one(), zero(), sym("a")}};
    Expr det = canon(sym_det(m));
    CHECK(struct_eq(det, canon(parse_expr("a^2*c+b", S))));
    auto inv = sym_inverse(m);
    // m * inv = identity
    DomainBox box;
    for (auto& s : S) box.set(s, 1.5, 3.0);
    ZeroTester tester(box);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            std::vector<Expr> terms;
            for (int k = 0; k < 3; ++k) terms.push_back(mul({m[i][k], inv[k][j]}));
            Expr want = i == j ? one() : zero();
            CHECK(tester.is_zero(sub(add(std::move(terms)), want)) == Verdict::Zero);
        }
    CHECK_THROWS_AS(sym_inverse(std::vector<std::vector<Expr>>{{one(), one()}, {one(), one()}}),
                    EigenError);
}

TEST_CASE("supplied eigendata is verified and completed with dual forms") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, p.eigen);
    REQUIRE(eig.phi.size() == 3);
    CHECK(eig.all_distinct());

    // oracle: phi rows are numerically dual to the eigenvector rows
    std::map<std::string, double> pt{{"t", 4.0}, {"x", 1.5}, {"y", 1.5}, {"z", 1.5},
                                     {"u", 1.3}, {"v", 1.7}, {"w", 1.1}};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0;
            for (int c = 0; c < 3; ++c)
                s += eval_numeric(eig.phi[a][c], pt) * eval_numeric(eig.X[b][c], pt);
            CHECK_THAT(s, Catch::Matchers::WithinAbs(a == b ? 1.0 : 0.0, 1e-10));
        }
}

TEST_CASE("bad eigendata is rejected with a residual message") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData bad = *p.eigen;
    bad.X[0][0] = one();  // no longer an eigenvector
    CHECK_THROWS_AS(resolve_eigendata(geo, tester, bad), EigenError);
}

TEST_CASE("automatic eigen-solution for a vanishing root") {
    // third characteristic root of the time-coupled system is zero, so the
    // remaining quadratic is solvable without supplied data
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, std::nullopt);
    REQUIRE(eig.lambda.size() == 3);
    for (int a = 0; a < 3; ++a)
        for (int e = 0; e < 3; ++e) {
            std::vector<Expr> terms;
            for (int c = 0; c < 3; ++c) terms.push_back(mul({geo.Phi(e, c), eig.X[a][c]}));
            CHECK(tester.is_zero(sub(add(std::move(terms)), mul({eig.lambda[a], eig.X[a][e]}))) ==
                  Verdict::Zero);
        }
    CHECK(eig.all_distinct());
}

TEST_CASE("automatic eigen-solution for two uncoupled oscillators") {
    Sode s;
    s.n = 2;
    s.coords = {"x", "y"};
    s.vels = {"u", "v"};
    auto S = s.symbol_set();
    s.F = {parse_expr("-x", S), parse_expr("-2*y", S)};
    for (auto& name : {"t", "x", "y", "u", "v"}) s.box.set(name, 1.0, 2.0);
    GeometryData geo(s);
    ZeroTester tester = s.tester();
    EigenData eig = resolve_eigendata(geo, tester, std::nullopt);
    // eigenvalues 2 and 1 in some order, with axis-aligned eigenvectors
    std::vector<double> vals;
    for (auto& l : eig.lambda) vals.push_back(eval_numeric(l, {{"x", 1.0}}));
    std::sort(vals.begin(), vals.end());
    CHECK(vals[0] == 1.0);
    CHECK(vals[1] == 2.0);
    CHECK(eig.all_distinct());
    for (int a = 0; a < 2; ++a)
        for (int e = 0; e < 2; ++e) {
            std::vector<Expr> terms;
            for (int c = 0; c < 2; ++c) terms.push_back(mul({geo.Phi(e, c), eig.X[a][c]}));
            CHECK(tester.is_zero(sub(add(std::move(terms)), mul({eig.lambda[a], eig.X[a][e]}))) ==
                  Verdict::Zero);
        }
}

TEST_CASE("expansion coefficients reassemble the derivative of the eigenforms") {
    for (const char* name : {"ex1.vicar", "ex2.vicar"}) {
        Problem p = load(name);
        GeometryData geo(p.sode);
        ZeroTester tester = p.sode.tester();
        EigenData eig = resolve_eigendata(geo, tester, p.eigen);
        StructureFunctionExtractor ext(geo, eig);
        StructureFunctions sf = ext.extract(tester);
        const int n = sf.n;
        for (int a = 0; a < n; ++a) {
            CoframeForm rebuilt(2, sf.m);
            for (int b = 0; b < n; ++b) {
                rebuilt.set(0, 1 + b, neg(sf.tauGamma[a][b]));
                if (b == a) rebuilt.set(0, 1 + n + b, neg(eig.lambda[a]));
                for (int c = 0; c < n; ++c)
                    rebuilt.set(1 + b, 1 + n + c, sf.tauH[a][c][b]);
                for (int c = b + 1; c < n; ++c) {
                    rebuilt.set(1 + b, 1 + c, sub(sf.tauV[a][c][b], sf.tauV[a][b][c]));
                    rebuilt.set(1 + n + b, 1 + n + c, neg(sf.curv[a][b][c]));
                }
            }
            for (int i = 0; i < sf.m; ++i)
                for (int j = i + 1; j < sf.m; ++j) {
                    INFO(name << " a=" << a + 1 << " slot (" << i << "," << j << ")");
                    CHECK(tester.is_zero(sub(sf.dphiV[a].at(i, j), rebuilt.at(i, j))) ==
                          Verdict::Zero);
                }
        }
    }
}

TEST_CASE("two routes to the curvature coefficients agree") {
    for (const char* name : {"ex1.vicar", "ex3.vicar"}) {
        Problem p = load(name);
        GeometryData geo(p.sode);
        ZeroTester tester = p.sode.tester();
        EigenData eig = resolve_eigendata(geo, tester, p.eigen);
        StructureFunctionExtractor ext(geo, eig);
        StructureFunctions sf = ext.extract(tester);
        for (int a = 0; a < sf.n; ++a)
            for (int b = 0; b < sf.n; ++b)
                for (int c = 0; c < sf.n; ++c) {
                    INFO(name << " [" << a << "][" << b << "][" << c << "]");
                    CHECK(tester.is_zero(sub(sf.curv[a][b][c],
                                             ext.curvature_contraction(a, b, c))) ==
                          Verdict::Zero);
                }
    }
}

TEST_CASE("eigenvector rescaling does not change the verdicts") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();

    Classifier plain(geo, resolve_eigendata(geo, tester, p.eigen), tester);
    ClassificationReport r1 = plain.run();

    EigenData scaled = *p.eigen;
    for (int c = 0; c < 3; ++c) scaled.X[0][c] = canon(mul({sym("t"), scaled.X[0][c]}));
    Classifier resc(geo, resolve_eigendata(geo, tester, scaled), tester);
    ClassificationReport r2 = resc.run();

    CHECK(r1.verdict == OverallVerdict::Variational);
    CHECK(r2.verdict == r1.verdict);
    CHECK(r2.case_label == r1.case_label);
    CHECK(r2.generality.text == r1.generality.text);
}
