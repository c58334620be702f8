#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vicar/report.hpp"

#ifndef VICAR_PROBLEM_DIR
#define VICAR_PROBLEM_DIR "problems"
#endif

namespace {

using namespace vicar;

struct Analysis {
    GeometryData geo;
    ZeroTester tester;
    std::optional<EigenData> eig;
    ClassificationReport cls;
    std::optional<StructureFunctions> user_sf;
    std::optional<EigenData> internal_eig;
    std::optional<StructureFunctions> internal_sf;
    std::vector<std::string> caveats;

    explicit Analysis(const Problem& p) : geo(p.sode), tester(p.sode.tester()) {}
};

// geometry -> eigen -> structure functions -> classification
Analysis run_pipeline(const Problem& p) {
    Analysis a(p);
    if (p.eigen) {
        a.eig = resolve_eigendata(a.geo, a.tester, p.eigen);  // throws on bad eigendata
    } else if (detect_case(a.geo, std::nullopt, a.tester) != "A") {
        try {
            a.eig = resolve_eigendata(a.geo, a.tester);
        } catch (const EigenError& e) {
            a.caveats.push_back(std::string("automatic eigen-solution failed: ") + e.what());
        }
    }
    Classifier cls(a.geo, a.eig, a.tester, p.assert_nondiagonalizable);
    a.cls = cls.run();
    a.user_sf = cls.user_structure_functions();
    a.internal_eig = cls.internal_eigendata();
    if (a.internal_eig) a.internal_sf = cls.structure_functions();
    for (auto& c : a.caveats) a.cls.caveats.push_back(c);
    return a;
}

Json build_report(const Problem& p, const Analysis& a) {
    Json rep = report_skeleton(p);
    rep["geometry"] = geometry_report(a.geo);
    if (a.eig) rep["eigen"] = eigen_report(*a.eig);
    if (a.user_sf) rep["structure_functions"] = structure_report(*a.user_sf);
    rep["classification"] = classification_report(a.cls);

    // candidate verification, when the problem supplies one
    std::optional<Multiplier> g;
    if (p.multiplier) {
        g = *p.multiplier;
    } else if (p.cartan_r && a.eig) {
        g = r_to_g(*a.eig, *p.cartan_r);
    }
    if (g) {
        Json h;
        HelmholtzCheck hc = check_helmholtz(a.geo, *g, a.tester);
        h["multiplier"] = detail::expr_matrix(*g);
        h["conditions"] = helmholtz_report(hc);
        {
            std::vector<std::vector<Expr>> gm = *g;
            h["det"] = detail::pexpr(sym_det(gm));
        }
        h["closed_form"] = closed_form_report(check_closed_form(a.geo, *g, a.tester));
        rep["helmholtz"] = std::move(h);
    }

    if (p.pfaffian_r1t && a.internal_eig && a.cls.case_label == "BNII1" && a.cls.h2) {
        const int n = p.sode.n;
        std::vector<Expr> r_alpha;
        bool complete = true;
        for (int i = 2; i < n; ++i) {
            int user = a.cls.relabel[i];
            auto it = p.pfaffian_r.find(user);
            if (it == p.pfaffian_r.end()) {
                complete = false;
                break;
            }
            r_alpha.push_back(it->second);
        }
        if (complete) {
            StructureFunctionExtractor ex(a.geo, *a.internal_eig);
            PfaffianCheck pc = verify_pfaffian_solution(ex, *a.internal_sf, *a.cls.h2,
                                                        *p.pfaffian_r1t, r_alpha, a.tester);
            if (rep["helmholtz"].is_null()) rep["helmholtz"] = Json::object();
            rep["helmholtz"]["pfaffian"] = pfaffian_report(pc);
        } else {
            rep["caveats"].push_back(
                "pfaffian candidate incomplete: supply pfaffian.r.<label> for every "
                "integrable label");
        }
    }
    return rep;
}

void print_summary(const Problem& p, const Analysis& a, std::ostream& os) {
    os << "problem: " << (p.name.empty() ? "(unnamed)" : p.name) << "  (n = " << p.sode.n
       << ", seed = " << p.sode.seed << ")\n";
    os << "case:    " << a.cls.case_label << "  (q = " << a.cls.q;
    if (a.cls.rank_a1 >= 0) os << ", rank A1 = " << a.cls.rank_a1;
    os << ")\n";
    if (a.cls.h2) os << "h2:      " << print(canon(*a.cls.h2)) << "\n";
    os << "verdict: " << verdict_text(a.cls.verdict) << "\n";
    for (auto& c : a.cls.conditions) {
        os << "  [" << c.id << "] " << verdict_name(c.verdict);
        if (!c.witness.empty()) os << "  witness: " << c.witness;
        os << "\n";
    }
    if (!a.cls.generality.text.empty())
        os << "generality: " << a.cls.generality.text << "  (s1 = " << a.cls.generality.s1
           << ", s2 = " << a.cls.generality.s2 << ", t = " << a.cls.generality.t << ")\n";
    for (auto& c : a.cls.caveats) os << "note: " << c << "\n";
}

void apply_overrides(Problem& p, const std::optional<unsigned long long>& seed_flag,
                     const std::optional<int>& samples_flag) {
    if (const char* env = std::getenv("VICAR_SEED")) p.sode.seed = std::stoull(env);
    if (seed_flag) p.sode.seed = *seed_flag;
    if (samples_flag) p.sode.samples = *samples_flag;
}

int cmd_analyze(const std::string& path, const std::string& out,
                const std::optional<unsigned long long>& seed,
                const std::optional<int>& samples) {
    Problem p;
    try {
        p = load_problem(path);
        apply_overrides(p, seed, samples);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        Analysis a = run_pipeline(p);
        Json rep = build_report(p, a);
        if (!out.empty()) {
            std::ofstream os(out);
            if (!os) {
                std::cerr << "error: cannot write " << out << "\n";
                return 1;
            }
            os << rep.dump(2) << "\n";
        }
        print_summary(p, a, std::cout);
        return a.cls.verdict == OverallVerdict::Inconclusive ? 2 : 0;
    } catch (const EigenError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ExpansionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_check(const std::string& path, const std::optional<unsigned long long>& seed,
              const std::optional<int>& samples) {
    Problem p;
    try {
        p = load_problem(path);
        apply_overrides(p, seed, samples);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        GeometryData geo(p.sode);
        ZeroTester tester = p.sode.tester();
        std::optional<Multiplier> g;
        if (p.multiplier) {
            g = *p.multiplier;
        } else if (p.cartan_r) {
            EigenData eig = resolve_eigendata(geo, tester, p.eigen);
            g = r_to_g(eig, *p.cartan_r);
        } else {
            std::cerr << "error: no multiplier or cartan candidate in " << path << "\n";
            return 1;
        }
        HelmholtzCheck hc = check_helmholtz(geo, *g, tester);
        for (auto& item : hc.items) {
            std::cout << item.name << ": " << verdict_name(item.verdict);
            if (!item.witness.empty()) std::cout << "  witness: " << item.witness;
            std::cout << "\n";
        }
        if (hc.passed()) return 0;
        return hc.failed() ? 3 : 2;
    } catch (const EigenError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// selftest: the bundled golden problems with their expected outcomes

std::string problem_dir() {
    if (const char* env = std::getenv("VICAR_PROBLEM_DIR")) return env;
    return VICAR_PROBLEM_DIR;
}

struct SelftestRow {
    std::string name;
    bool (*fn)(std::string& detail);
};

Problem load_golden(const std::string& file) { return load_problem(problem_dir() + "/" + file); }

bool expect(bool cond, const std::string& msg, std::string& detail) {
    if (!cond && detail.empty()) detail = msg;
    return cond;
}

bool row_example3_phi(std::string& detail) {
    Problem p = load_golden("ex3.vicar");
    GeometryData geo(p.sode);
    auto S = p.sode.symbol_set();
    const char* expected[3][3] = {{"-w", "0", "u/2"}, {"-1", "0", "0"}, {"-1", "0", "0"}};
    bool ok = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Expr want = parse_expr(expected[a][b], S);
            ok &= expect(struct_eq(canon(geo.Phi(a, b)), want),
                         "Phi(" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                             ") = " + print(canon(geo.Phi(a, b))),
                         detail);
        }
    return ok;
}

bool row_example2_tau(std::string& detail) {
    Problem p = load_golden("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, p.eigen);
    StructureFunctionExtractor ex(geo, eig);
    StructureFunctions sf = ex.extract(tester);
    auto S = p.sode.symbol_set();
    Expr q = parse_expr("1/(4*t)", S);
    bool ok = true;
    ok &= expect(tester.is_zero(sub(sf.tauGamma[0][0], q)) == Verdict::Zero, "tauGamma[1][1]",
                 detail);
    ok &= expect(tester.is_zero(sub(sf.tauGamma[1][1], q)) == Verdict::Zero, "tauGamma[2][2]",
                 detail);
    ok &= expect(tester.is_zero(add({sf.tauGamma[0][1], q})) == Verdict::Zero, "tauGamma[1][2]",
                 detail);
    ok &= expect(tester.is_zero(add({sf.tauGamma[1][0], q})) == Verdict::Zero, "tauGamma[2][1]",
                 detail);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (!(a == b || (a < 2 && b < 2)))
                ok &= expect(tester.is_zero(sf.tauGamma[a][b]) == Verdict::Zero,
                             "tauGamma stray entry", detail);
            for (int c = 0; c < 3; ++c) {
                ok &= expect(tester.is_zero(sf.tauV[a][b][c]) == Verdict::Zero, "tauV stray entry",
                             detail);
                ok &= expect(tester.is_zero(sf.tauH[a][b][c]) == Verdict::Zero, "tauH stray entry",
                             detail);
                ok &= expect(tester.is_zero(sf.curv[a][b][c]) == Verdict::Zero, "C stray entry",
                             detail);
            }
        }
    return ok;
}

bool row_example1_tau(std::string& detail) {
    Problem p = load_golden("ex1.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, p.eigen);
    StructureFunctionExtractor ex(geo, eig);
    StructureFunctions sf = ex.extract(tester);
    auto S = p.sode.symbol_set();
    bool ok = true;
    ok &= expect(tester.is_zero(sub(sf.tauGamma[0][1], parse_expr("-sqrt(v)/(4*v)", S))) ==
                     Verdict::Zero,
                 "tauGamma[1][2] = " + print(canon(sf.tauGamma[0][1])), detail);
    ok &= expect(tester.is_zero(sub(sf.tauGamma[1][0],
                                    parse_expr("-3*u^2/(4*v*sqrt(v))", S))) == Verdict::Zero,
                 "tauGamma[2][1] = " + print(canon(sf.tauGamma[1][0])), detail);
    ok &= expect(tester.is_zero(sub(sf.curv[1][0][1], parse_expr("-v^(1/4)", S))) ==
                     Verdict::Zero,
                 "C[2][1][2] = " + print(canon(sf.curv[1][0][1])), detail);
    return ok;
}

bool row_example1_classification(std::string& detail) {
    Problem p = load_golden("ex1.vicar");
    Analysis a = run_pipeline(p);
    bool ok = true;
    ok &= expect(a.cls.case_label == "BNII1", "case = " + a.cls.case_label, detail);
    ok &= expect(a.cls.verdict == OverallVerdict::NotVariational,
                 std::string("verdict = ") + verdict_text(a.cls.verdict), detail);
    bool c56_fails = false;
    for (auto& c : a.cls.conditions)
        if (c.id == "C-56" && c.verdict == Verdict::NonZero) c56_fails = true;
    ok &= expect(c56_fails, "C-56 did not fail", detail);
    return ok;
}

bool row_example2_classification(std::string& detail) {
    Problem p = load_golden("ex2.vicar");
    Analysis a = run_pipeline(p);
    bool ok = true;
    ok &= expect(a.cls.case_label == "BNII1", "case = " + a.cls.case_label, detail);
    ok &= expect(a.cls.verdict == OverallVerdict::Variational,
                 std::string("verdict = ") + verdict_text(a.cls.verdict), detail);
    ok &= expect(a.cls.h2.has_value() &&
                     a.tester.is_zero(add({*a.cls.h2, one()})) == Verdict::Zero,
                 "h2 != -1", detail);
    ok &= expect(a.cls.generality.s1 == 1 && a.cls.generality.s2 == 1 &&
                     a.cls.generality.text == "1 function of 2 variables",
                 "generality mismatch", detail);
    return ok;
}

bool row_example3_classification(std::string& detail) {
    Problem p = load_golden("ex3.vicar");
    Analysis a = run_pipeline(p);
    bool ok = true;
    ok &= expect(a.cls.case_label == "BNII0", "case = " + a.cls.case_label, detail);
    ok &= expect(a.cls.q == 2, "q = " + std::to_string(a.cls.q), detail);
    ok &= expect(a.cls.integrable.size() == 3 && a.cls.integrable[2] == Verdict::Zero,
                 "third co-distribution not integrable", detail);
    return ok;
}

bool row_example2_multiplier(std::string& detail) {
    Problem p = load_golden("ex2.vicar");
    GeometryData geo(p.sode);
    ZeroTester tester = p.sode.tester();
    EigenData eig = resolve_eigendata(geo, tester, p.eigen);
    Multiplier g = r_to_g(eig, *p.cartan_r);
    auto S = p.sode.symbol_set();
    const char* expected[3][3] = {{"0", "0", "-1/2"}, {"0", "1", "0"}, {"-1/2", "0", "0"}};
    bool ok = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            ok &= expect(tester.is_zero(sub(g[a][b], parse_expr(expected[a][b], S))) ==
                             Verdict::Zero,
                         "g(" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                             ") = " + print(canon(g[a][b])),
                         detail);
    HelmholtzCheck hc = check_helmholtz(geo, g, tester);
    ok &= expect(hc.passed(), "multiplier conditions failed", detail);
    Expr det = sym_det(g);
    ok &= expect(tester.is_zero(add({det, num(Rational(1, 4))})) == Verdict::Zero,
                 "det g = " + print(canon(det)), detail);
    return ok;
}

bool row_example2_pfaffian(std::string& detail) {
    Problem p = load_golden("ex2.vicar");
    Analysis a = run_pipeline(p);
    bool ok = expect(a.cls.case_label == "BNII1" && a.cls.h2.has_value(), "not BNII1", detail);
    if (!ok) return false;
    StructureFunctionExtractor ex(a.geo, *a.internal_eig);
    auto S = p.sode.symbol_set();
    PfaffianCheck pc = verify_pfaffian_solution(ex, *a.internal_sf, *a.cls.h2,
                                                parse_expr("sqrt(t)", S),
                                                {parse_expr("1", S)}, a.tester);
    ok &= expect(pc.verdict == Verdict::Zero, "residuals nonzero", detail);
    return ok;
}

bool row_free_particle(std::string& detail) {
    Problem p = load_golden("free_particle.vicar");
    Analysis a = run_pipeline(p);
    bool ok = expect(a.cls.case_label == "A", "case = " + a.cls.case_label, detail);
    ok &= expect(a.cls.verdict == OverallVerdict::OutOfScope,
                 std::string("verdict = ") + verdict_text(a.cls.verdict), detail);
    return ok;
}

bool row_case_c(std::string& detail) {
    Problem p = load_golden("case_c.vicar");
    Analysis a = run_pipeline(p);
    bool ok = expect(a.cls.case_label == "C-detected", "case = " + a.cls.case_label, detail);
    ok &= expect(a.cls.verdict == OverallVerdict::OutOfScope,
                 std::string("verdict = ") + verdict_text(a.cls.verdict), detail);
    return ok;
}

int cmd_selftest(const std::string& filter) {
    const SelftestRow rows[] = {
        {"example3_phi", row_example3_phi},
        {"example2_tau", row_example2_tau},
        {"example1_tau", row_example1_tau},
        {"example1_classification", row_example1_classification},
        {"example2_classification", row_example2_classification},
        {"example3_classification", row_example3_classification},
        {"example2_multiplier", row_example2_multiplier},
        {"example2_pfaffian", row_example2_pfaffian},
        {"free_particle", row_free_particle},
        {"case_c", row_case_c},
    };
    int ran = 0, failed = 0;
    for (auto& row : rows) {
        if (!filter.empty() && row.name.find(filter) == std::string::npos) continue;
        ++ran;
        std::string detail;
        bool ok = false;
        try {
            ok = row.fn(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << "  " << row.name;
        if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failed;
    }
    if (ran == 0) {
        std::cerr << "no selftest rows match filter `" << filter << "`\n";
        return 1;
    }
    std::cout << (ran - failed) << "/" << ran << " passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classify second-order ODE systems for variationality and check multipliers"};
    app.require_subcommand(1);

    std::string path, out, filter;
    std::optional<unsigned long long> seed;
    std::optional<int> samples;

    auto* analyze = app.add_subcommand("analyze", "run the full classification pipeline");
    analyze->add_option("file", path, "problem file")->required();
    analyze->add_option("--out", out, "write the JSON report here");
    analyze->add_option("--seed", seed, "override the sampling seed");
    analyze->add_option("--samples", samples, "override the sample count");

    auto* check = app.add_subcommand("check", "verify a supplied multiplier candidate");
    check->add_option("file", path, "problem file")->required();
    check->add_option("--seed", seed, "override the sampling seed");
    check->add_option("--samples", samples, "override the sample count");

    auto* selftest = app.add_subcommand("selftest", "run the bundled golden problems");
    selftest->add_option("--filter", filter, "only run rows whose name contains this");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(analyze)) return cmd_analyze(path, out, seed, samples);
    if (app.got_subcommand(check)) return cmd_check(path, seed, samples);
    return cmd_selftest(filter);
}
