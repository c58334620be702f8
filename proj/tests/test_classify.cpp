#include <catch2/catch_amalgamated.hpp>

#include "vicar/classify.hpp"
#include "vicar/parser.hpp"
#include "vicar/problem.hpp"

using namespace vicar;

namespace {

Problem load(const std::string& name) {
    return load_problem(std::string(VICAR_PROBLEM_DIR) + "/" + name);
}

const Condition* find_condition(const ClassificationReport& rep, const std::string& id) {
    for (auto& c : rep.conditions)
        if (c.id == id) return &c;
    return nullptr;
}

ZeroTester unit_tester() {
    DomainBox box;
    box.set("s", 1.0, 2.0);
    return ZeroTester(box);
}

}  // namespace

TEST_CASE("membership test sums the cyclic curvature terms") {
    StructureFunctions sf;
    sf.n = 3;
    sf.m = 7;
    sf.curv.assign(3, std::vector<std::vector<Expr>>(3, std::vector<Expr>(3, zero())));
    sf.curv[0][1][2] = one();
    ZeroTester tester = unit_tester();
    CHECK(sigma1_membership({one(), one(), one()}, sf, tester) == Verdict::NonZero);
    CHECK(sigma1_membership({zero(), one(), one()}, sf, tester) == Verdict::Zero);

    // vacuous for n = 2: no distinct triples
    StructureFunctions sf2;
    sf2.n = 2;
    sf2.m = 5;
    CHECK(sigma1_membership({one(), one()}, sf2, tester) == Verdict::Zero);
}

TEST_CASE("differential ideal test on the example corpus") {
    // holds for the cubic-root system, fails for the time-coupled one
    Problem p3 = load("ex3.vicar");
    GeometryData geo3(p3.sode);
    ZeroTester t3 = p3.sode.tester();
    StructureFunctions sf3 =
        StructureFunctionExtractor(geo3, resolve_eigendata(geo3, t3, p3.eigen)).extract(t3);
    CHECK(sigma_tilde1_di_test(sf3, t3).verdict == Verdict::Zero);

    Problem p2 = load("ex2.vicar");
    GeometryData geo2(p2.sode);
    ZeroTester t2 = p2.sode.tester();
    StructureFunctions sf2 =
        StructureFunctionExtractor(geo2, resolve_eigendata(geo2, t2, p2.eigen)).extract(t2);
    Condition c = sigma_tilde1_di_test(sf2, t2);
    CHECK(c.verdict == Verdict::NonZero);
    CHECK(c.witness.find("tauGamma") != std::string::npos);
}

TEST_CASE("tableau characters") {
    Generality g2 = cartan_generality(2, "BNII1");
    CHECK(g2.s1 == 0);
    CHECK(g2.t == 0);
    CHECK(g2.text == "no free functions at this level");
    Generality g3 = cartan_generality(3, "BNII1");
    CHECK(g3.s1 == 1);
    CHECK(g3.s2 == 1);
    CHECK(g3.t == 3);
    CHECK(g3.text == "1 function of 2 variables");
    Generality g5 = cartan_generality(5, "BNII1");
    CHECK(g5.t == g5.s1 + 2 * g5.s2);
    CHECK(g5.text == "3 functions of 2 variables");
}

TEST_CASE("regularity check requires every basis 2-form") {
    const int n = 2, m = 5;
    ZeroTester tester = unit_tester();
    auto omega = [&](int a) {
        CoframeForm w(2, m);
        w.set(1 + a, 1 + n + a, one());
        return w;
    };
    TwoFormModule full{2, {"w1", "w2"}, {omega(0), omega(1)}};
    CHECK(degenerate_check(full, n, tester) == Verdict::Zero);
    TwoFormModule missing{2, {"w1"}, {omega(0)}};
    CHECK(degenerate_check(missing, n, tester) == Verdict::NonZero);
}

TEST_CASE("case detection") {
    Problem fp = load("free_particle.vicar");
    GeometryData geo(fp.sode);
    ZeroTester tester = fp.sode.tester();
    CHECK(detect_case(geo, std::nullopt, tester) == "A");

    Problem p3 = load("ex3.vicar");
    GeometryData geo3(p3.sode);
    ZeroTester t3 = p3.sode.tester();
    CHECK(detect_case(geo3, std::nullopt, t3) == "Inconclusive");
    CHECK(detect_case(geo3, std::nullopt, t3, true) == "D-detected");
    EigenData eig3 = resolve_eigendata(geo3, t3, p3.eigen);
    CHECK(detect_case(geo3, eig3, t3) == "B");
}

TEST_CASE("no multiplier for the first example system") {
    Problem p = load("ex1.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    Classifier cls(geo, resolve_eigendata(geo, tester, p.eigen), tester);
    ClassificationReport rep = cls.run();
    CHECK(rep.case_label == "BNII1");
    CHECK(rep.q == 2);
    CHECK(rep.rank_a1 == 1);
    CHECK(rep.verdict == OverallVerdict::NotVariational);
    REQUIRE(rep.h2);
    CHECK(tester.is_zero(sub(*rep.h2, parse_expr("-v/(3*u^2)", p.sode.symbol_set()))) ==
          Verdict::Zero);
    const Condition* c56 = find_condition(rep, "C-56");
    REQUIRE(c56);
    CHECK(c56->verdict == Verdict::NonZero);
    CHECK(!c56->witness.empty());
}

TEST_CASE("the time-coupled system is variational with full conditions") {
    Problem p = load("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    Classifier cls(geo, resolve_eigendata(geo, tester, p.eigen), tester);
    ClassificationReport rep = cls.run();
    CHECK(rep.case_label == "BNII1");
    CHECK(rep.verdict == OverallVerdict::Variational);
    REQUIRE(rep.h2);
    CHECK(struct_eq(canon(*rep.h2), num(-1)));
    for (const char* id : {"C-51", "C-52", "C-56", "C-510", "C-511"}) {
        const Condition* c = find_condition(rep, id);
        REQUIRE(c);
        INFO(id);
        CHECK(c->verdict == Verdict::Zero);
    }
    CHECK(rep.generality.s1 == 1);
    CHECK(rep.generality.s2 == 1);
    CHECK(rep.generality.t == 3);

    // chain property: final module members satisfy the membership test
    const StructureFunctions& sf = cls.structure_functions();
    CHECK(sigma1_membership({one(), *rep.h2, zero()}, sf, tester) == Verdict::Zero);
    CHECK(sigma1_membership({zero(), zero(), one()}, sf, tester) == Verdict::Zero);
}

TEST_CASE("vanishing step-1 matrix for the cubic-root system") {
    Problem p = load("ex3.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    Classifier cls(geo, resolve_eigendata(geo, tester, p.eigen), tester);
    ClassificationReport rep = cls.run();
    CHECK(rep.case_label == "BNII0");
    CHECK(rep.q == 2);
    CHECK(rep.rank_a1 == 0);
    CHECK(rep.verdict == OverallVerdict::OutOfScope);
    REQUIRE(rep.integrable.size() == 3);
    CHECK(rep.integrable[2] == Verdict::Zero);
}

TEST_CASE("fully separated system has no non-integrable labels") {
    Sode s;
    s.n = 3;
    s.coords = {"x", "y", "z"};
    s.vels = {"u", "v", "w"};
    auto S = s.symbol_set();
    s.F = {parse_expr("-x", S), parse_expr("-2*y", S), parse_expr("-3*z", S)};
    for (auto& name : {"t", "x", "y", "z", "u", "v", "w"}) s.box.set(name, 1.0, 2.0);
    GeometryData geo(s);
    ZeroTester tester = s.tester();
    EigenData eig;
    eig.lambda = {one(), num(2), num(3)};
    eig.X = {{one(), zero(), zero()}, {zero(), one(), zero()}, {zero(), zero(), one()}};
    Classifier cls(geo, resolve_eigendata(geo, tester, eig), tester);
    ClassificationReport rep = cls.run();
    CHECK(rep.case_label == "B-q0");
    CHECK(rep.q == 0);
    CHECK(rep.verdict == OverallVerdict::OutOfScope);
    for (auto v : rep.integrable) CHECK(v == Verdict::Zero);
}

TEST_CASE("failed verdicts always carry a witness") {
    Problem p = load("ex1.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    Classifier cls(geo, resolve_eigendata(geo, tester, p.eigen), tester);
    ClassificationReport rep = cls.run();
    REQUIRE(rep.verdict == OverallVerdict::NotVariational);
    bool witnessed = false;
    for (auto& c : rep.conditions)
        if (c.verdict == Verdict::NonZero && !c.witness.empty()) witnessed = true;
    CHECK(witnessed);
}
