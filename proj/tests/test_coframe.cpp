#include <catch2/catch_amalgamated.hpp>

#include "vicar/eigenframe.hpp"
#include "vicar/parser.hpp"
#include "vicar/problem.hpp"

using namespace vicar;

namespace {

Problem load(const std::string& name) {
    return load_problem(std::string(VICAR_PROBLEM_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("form accessors apply antisymmetry") {
    CoframeForm w(2, 5);
    w.set(1, 3, sym("t"));
    CHECK(struct_eq(w.at(1, 3), sym("t")));
    CHECK(struct_eq(canon(w.at(3, 1)), neg(sym("t"))));
    CHECK(is_zero_node(w.at(2, 2)));

    CoframeForm v(3, 5);
    v.set(0, 1, 2, sym("t"));
    CHECK(struct_eq(canon(v.at(1, 0, 2)), neg(sym("t"))));
    CHECK(struct_eq(canon(v.at(2, 0, 1)), sym("t")));
    CHECK(is_zero_node(v.at(0, 1, 1)));
    CHECK_THROWS_AS(v.set(0, 1, 1, sym("t")), std::invalid_argument);
}

TEST_CASE("wedge products") {
    const int m = 5;
    CoframeForm a(1, m), b(1, m);
    a.set(0, sym("t"));
    a.set(2, one());
    b.set(1, sym("x"));
    b.set(2, sym("u"));

    CoframeForm ab = CoframeForm::wedge11(a, b);
    CHECK(struct_eq(canon(ab.at(0, 1)), canon(mul({sym("t"), sym("x")}))));
    CHECK(struct_eq(canon(ab.at(0, 2)), canon(mul({sym("t"), sym("u")}))));
    CHECK(struct_eq(canon(ab.at(1, 2)), canon(neg(sym("x")))));

    // a ^ b = -(b ^ a)
    CoframeForm ba = CoframeForm::wedge11(b, a);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            CHECK(is_zero_node(canon(add({ab.at(i, j), ba.at(i, j)}))));

    // a ^ (a ^ b) = 0
    CoframeForm aab = CoframeForm::wedge12(a, ab);
    for (auto& c : aab.raw()) CHECK(is_zero_node(canon(c)));
}

TEST_CASE("frame brackets reproduce the commutator table") {
    for (const char* name : {"ex1.vicar", "ex2.vicar"}) {
        Problem p = load(name);
        GeometryData geo(p.sode);
        ZeroTester tester = p.sode.tester();
        FrameCalculus fc(geo);
        const int n = p.sode.n;
        auto expect = [&](const std::vector<Expr>& got, const std::vector<Expr>& want) {
            for (int k = 0; k < fc.dim(); ++k)
                CHECK(tester.is_zero(sub(got[k], want[k])) == Verdict::Zero);
        };
        for (int a = 0; a < n; ++a) {
            // [Gamma, V_a] = -H_a + Gamma^b_a V_b
            std::vector<Expr> w(fc.dim(), zero());
            w[1 + a] = num(-1);
            for (int b = 0; b < n; ++b) w[1 + n + b] = geo.Gamma(b, a);
            expect(fc.bracket(0, 1 + n + a), w);

            // [Gamma, H_a] = Gamma^b_a H_b + Phi^b_a V_b
            std::vector<Expr> h(fc.dim(), zero());
            for (int b = 0; b < n; ++b) {
                h[1 + b] = geo.Gamma(b, a);
                h[1 + n + b] = geo.Phi(b, a);
            }
            expect(fc.bracket(0, 1 + a), h);

            for (int b = a + 1; b < n; ++b) {
                // [H_a, H_b] = R^d_{ab} V_d
                std::vector<Expr> r(fc.dim(), zero());
                for (int d = 0; d < n; ++d) r[1 + n + d] = geo.R(d, a, b);
                expect(fc.bracket(1 + a, 1 + b), r);

                // [V_a, V_b] = 0
                expect(fc.bracket(1 + n + a, 1 + n + b),
                       std::vector<Expr>(fc.dim(), zero()));
            }
            // [H_a, V_b] = V_b(Gamma^c_a) V_c
            for (int b = 0; b < n; ++b) {
                int i = 1 + a, j = 1 + n + b;
                std::vector<Expr> w2(fc.dim(), zero());
                for (int c = 0; c < n; ++c)
                    w2[1 + n + c] = geo.frame_derivative(geo.Gamma(c, a), FrameKind::V, b);
                if (i < j)
                    expect(fc.bracket(i, j), w2);
            }
        }
    }
}

TEST_CASE("exterior derivative kills dt and df") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    FrameCalculus fc(geo);

    CoframeForm dt(1, fc.dim());
    dt.set(0, one());
    CoframeForm ddt = fc.exterior_derivative(dt);
    for (auto& c : ddt.raw()) CHECK(tester.is_zero(c) == Verdict::Zero);

    for (const char* src : {"sqrt(t)*x", "x*z-t*u", "1/(4*t)"}) {
        Expr f = parse_expr(src, p.sode.symbol_set());
        CoframeForm ddf = fc.exterior_derivative(fc.differential(f));
        for (auto& c : ddf.raw())
            CHECK(tester.is_zero(c) == Verdict::Zero);
    }
}

TEST_CASE("d squared vanishes on nontrivial one-forms") {
    for (const char* name : {"ex1.vicar", "ex2.vicar", "ex3.vicar"}) {
        Problem p = load(name);
        GeometryData geo(p.sode);
        ZeroTester tester = p.sode.tester();
        FrameCalculus fc(geo);
        REQUIRE(p.eigen);
        EigenData eig = resolve_eigendata(geo, tester, p.eigen);
        StructureFunctionExtractor ext(geo, eig);
        for (int a = 0; a < p.sode.n; ++a) {
            for (const CoframeForm& w : {ext.phiV(a), ext.phiH(a)}) {
                CoframeForm ddw = fc.exterior_derivative(fc.exterior_derivative(w));
                for (auto& c : ddw.raw()) {
                    INFO(name << " form for eigenvalue " << a + 1);
                    CHECK(tester.is_zero(c) == Verdict::Zero);
                }
            }
        }
    }
}

TEST_CASE("frame change round-trips forms") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, p.eigen);
    StructureFunctionExtractor ext(geo, eig);
    const int m = 2 * p.sode.n + 1;

    CoframeForm w(1, m);
    w.set(0, sym("t"));
    w.set(2, parse_expr("x*u", p.sode.symbol_set()));
    w.set(5, one());
    CoframeForm back = ext.to_natural(ext.to_eigen(w));
    for (int i = 0; i < m; ++i)
        CHECK(tester.is_zero(sub(back.at(i), w.at(i))) == Verdict::Zero);

    CoframeForm w2(2, m);
    w2.set(0, 3, sym("z"));
    w2.set(1, 4, parse_expr("sqrt(t)", p.sode.symbol_set()));
    CoframeForm back2 = ext.to_natural(ext.to_eigen(w2));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            CHECK(tester.is_zero(sub(back2.at(i, j), w2.at(i, j))) == Verdict::Zero);
}

TEST_CASE("differential in the frame basis matches the chain rule") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    FrameCalculus fc(geo);
    auto S = p.sode.symbol_set();
    Expr f = parse_expr("sqrt(t)*x", S), g = parse_expr("z+u", S);
    // d(fg) = f dg + g df
    CoframeForm lhs = fc.differential(canon(mul({f, g})));
    CoframeForm rhs = fc.differential(g).scaled(f) + fc.differential(f).scaled(g);
    for (int i = 0; i < fc.dim(); ++i)
        CHECK(tester.is_zero(sub(lhs.at(i), rhs.at(i))) == Verdict::Zero);
}
