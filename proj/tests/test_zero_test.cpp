#include <catch2/catch_amalgamated.hpp>

#include "vicar/parser.hpp"
#include "vicar/zero_test.hpp"

using namespace vicar;

namespace {

const std::set<std::string> S{"t", "v"};

DomainBox make_box() {
    DomainBox box;
    box.set("t", 1.0, 4.0);
    box.set("v", 1.0, 4.0);
    return box;
}

Expr P(const std::string& src) { return parse_expr(src, S); }

}  // namespace

TEST_CASE("structural and rewrite zeros") {
    ZeroTester tester(make_box());
    ZeroResult r = tester.test(zero());
    CHECK(r.verdict == Verdict::Zero);
    CHECK(r.path == "structural");

    // built without canonicalization, killed by the rewrite pass
    auto raw = std::make_shared<ExprNode>();
    raw->kind = Kind::Add;
    raw->ops = {P("v"), neg(P("v"))};
    r = tester.test(raw);
    CHECK(r.verdict == Verdict::Zero);
    CHECK((r.path == "rewrite" || r.path == "structural"));

    CHECK(tester.is_zero(sub(P("v+t"), P("t+v"))) == Verdict::Zero);
}

TEST_CASE("numeric-tier zero for trig identity") {
    ZeroTester tester(make_box());
    ZeroResult r = tester.test(P("sin(t)^2+cos(t)^2-1"));
    CHECK(r.verdict == Verdict::Zero);
    CHECK((r.path == "numeric" || r.path == "rewrite"));
}

TEST_CASE("nonzero expressions are caught with a witness") {
    ZeroTester tester(make_box());
    ZeroResult r = tester.test(P("-v^(1/4)"));
    CHECK(r.verdict == Verdict::NonZero);
    CHECK(r.max_abs > 0.9);
    CHECK(r.witness_point.count("v") == 1);
    CHECK(tester.is_zero(P("1/(4*t)")) == Verdict::NonZero);
}

TEST_CASE("zero verdict never hides a large value") {
    // property: any expression with |e| > threshold somewhere never tests Zero
    ZeroTester tester(make_box(), 3, 32);
    for (const char* src : {"v-t", "sqrt(v)-1", "t*v-4", "sin(t)", "v^(1/2)-v^(1/4)"}) {
        ZeroResult r = tester.test(P(src));
        INFO(src);
        if (r.max_abs > 1e-6) CHECK(r.verdict != Verdict::Zero);
    }
}

TEST_CASE("sampling is reproducible per seed") {
    ZeroTester a(make_box(), 42, 8), b(make_box(), 42, 8), c(make_box(), 43, 8);
    CHECK(a.sample_points() == b.sample_points());
    CHECK(a.sample_points() != c.sample_points());
    for (auto& p : a.sample_points()) {
        CHECK(p.at("t") >= 1.0);
        CHECK(p.at("t") <= 4.0);
    }
}

TEST_CASE("points outside the expression domain are skipped") {
    DomainBox box;
    box.set("v", -2.0, -1.0);
    ZeroTester tester(box);
    // sqrt(v) undefined everywhere on the box: no evidence either way
    CHECK(tester.is_zero(parse_expr("sqrt(v)", {"v"})) == Verdict::Inconclusive);
}

TEST_CASE("box construction validates intervals") {
    DomainBox box;
    CHECK_THROWS_AS(box.set("t", 2.0, 1.0), std::invalid_argument);
    box.set("t", 1.0, 2.0);
    box.set("t", 0.0, 5.0);  // updating in place keeps a single entry
    CHECK(box.intervals.size() == 1);
    CHECK(box.has("t"));
    CHECK(!box.has("v"));
}
