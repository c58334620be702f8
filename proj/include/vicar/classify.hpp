#ifndef VICAR_CLASSIFY_HPP
#define VICAR_CLASSIFY_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vicar/eigenframe.hpp"

namespace vicar {

struct Condition {
    std::string id;           // C-A, C-DI1, C-51, C-52, C-56, C-510, C-511
    std::string description;  // human-readable description of the condition
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;    // first failing / unresolved entry, if any
};

struct Generality {
    int s1 = 0, s2 = 0, t = 0;
    std::string text;
};

enum class OverallVerdict { Variational, NotVariational, OutOfScope, Inconclusive };

inline const char* verdict_text(OverallVerdict v) {
    switch (v) {
        case OverallVerdict::Variational: return "Variational";
        case OverallVerdict::NotVariational: return "NotVariational";
        case OverallVerdict::OutOfScope: return "OutOfScope";
        case OverallVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct ClassificationReport {
    std::string case_label;  // A | B-q0 | B-q1 | BNII0 | BNII1 | B-NoSolution |
                             // C-detected | D-detected | Inconclusive
    int q = 0;               // non-integrable eigen co-distributions
    int rank_a1 = -1;        // rank of the step-1 coefficient matrix, when computed
    std::optional<Expr> h2;
    std::vector<Condition> conditions;
    Generality generality;
    OverallVerdict verdict = OverallVerdict::Inconclusive;
    std::vector<std::string> caveats;
    std::vector<int> relabel;  // internal index -> user eigen label (0-based)
    std::vector<Verdict> integrable;  // per user label; Zero = integrable
};

// A basis of labelled 2-forms in the eigen coframe for one Sigma-tilde step.
struct TwoFormModule {
    int step = 1;
    std::vector<std::string> labels;
    std::vector<CoframeForm> basis;
};

// ---------------------------------------------------------------------------

// Case detection per the diagonalisability of Phi.
inline std::string detect_case(const GeometryData& geo, const std::optional<EigenData>& eig,
                               const ZeroTester& tester, bool user_asserts_nondiag = false) {
    const int n = geo.n();
    bool all_zero = true, inconclusive = false;
    for (int a = 0; a < n && all_zero; ++a)
        for (int b = 0; b < n; ++b) {
            Expr e = a == b ? sub(geo.Phi(a, a), geo.Phi(0, 0)) : geo.Phi(a, b);
            Verdict v = tester.is_zero(e);
            if (v == Verdict::NonZero) {
                all_zero = false;
                break;
            }
            if (v == Verdict::Inconclusive) inconclusive = true;
        }
    if (all_zero) return inconclusive ? "Inconclusive" : "A";
    if (!eig) return user_asserts_nondiag ? "D-detected" : "Inconclusive";
    if (eig->any_repeated()) return "C-detected";
    if (eig->all_distinct()) return "B";
    return "Inconclusive";
}

// Prop-3.2 membership: omega = sum r_d omega^{dd} lies in Sigma^1 iff the
// cyclic curvature sums vanish for every distinct index triple.
inline Verdict sigma1_membership(const std::vector<Expr>& r, const StructureFunctions& sf,
                                 const ZeroTester& tester) {
    bool inconclusive = false;
    for (int a = 0; a < sf.n; ++a)
        for (int b = a + 1; b < sf.n; ++b)
            for (int c = b + 1; c < sf.n; ++c) {
                Expr s = add({mul({r[a], sf.curv[a][b][c]}), mul({r[b], sf.curv[b][c][a]}),
                              mul({r[c], sf.curv[c][a][b]})});
                Verdict v = tester.is_zero(s);
                if (v == Verdict::NonZero) return Verdict::NonZero;
                if (v == Verdict::Inconclusive) inconclusive = true;
            }
    return inconclusive ? Verdict::Inconclusive : Verdict::Zero;
}

// Cor-3.4 test: Sigma-tilde^1 generates a differential ideal iff
// tau^{aGamma}_b = 0 and tau^{aV}_{bc} = 0 for all distinct indices.
inline Condition sigma_tilde1_di_test(const StructureFunctions& sf, const ZeroTester& tester) {
    Condition cond{"C-DI1", "Sigma-tilde^1 differential ideal: tauGamma[a][b]=0, tauV[a][b][c]=0, distinct indices",
                   Verdict::Zero, ""};
    bool inconclusive = false;
    for (int a = 0; a < sf.n; ++a)
        for (int b = 0; b < sf.n; ++b) {
            if (a == b) continue;
            Verdict v = tester.is_zero(sf.tauGamma[a][b]);
            if (v == Verdict::NonZero) {
                cond.verdict = Verdict::NonZero;
                cond.witness = "tauGamma[" + std::to_string(a + 1) + "][" +
                               std::to_string(b + 1) + "] = " + print(canon(sf.tauGamma[a][b]));
                return cond;
            }
            if (v == Verdict::Inconclusive) inconclusive = true;
            for (int c = 0; c < sf.n; ++c) {
                if (c == a || c == b) continue;
                Verdict w = tester.is_zero(sf.tauV[a][b][c]);
                if (w == Verdict::NonZero) {
                    cond.verdict = Verdict::NonZero;
                    cond.witness = "tauV[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) +
                                   "][" + std::to_string(c + 1) + "] = " +
                                   print(canon(sf.tauV[a][b][c]));
                    return cond;
                }
                if (w == Verdict::Inconclusive) inconclusive = true;
            }
        }
    if (inconclusive) cond.verdict = Verdict::Inconclusive;
    return cond;
}

// Prop-3.6 check: every omega^a must survive in the final module, and the
// top wedge of the summed basis must be nonzero at a sample point.
inline Verdict degenerate_check(const TwoFormModule& module, int n, const ZeroTester& tester) {
    for (int a = 0; a < n; ++a) {
        bool present = false;
        for (auto& f : module.basis)
            if (tester.is_zero(f.at(1 + a, 1 + n + a)) == Verdict::NonZero) present = true;
        if (!present) return Verdict::NonZero;  // some omega^a is missing: non-regular
    }
    // maximal-rank feasibility of sum of basis forms, numerically
    auto pts = tester.sample_points();
    if (pts.empty()) return Verdict::Inconclusive;
    const int m = 2 * n + 1;
    std::vector<std::vector<double>> O(m, std::vector<double>(m, 0.0));
    try {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                double v = 0;
                for (auto& f : module.basis) v += eval_numeric(f.at(i, j), pts.front());
                O[i][j] = v;
                O[j][i] = -v;
            }
    } catch (const EvalDomainError&) {
        return Verdict::Inconclusive;
    }
    // wedge^n (sum) ^ dt is proportional to det of the non-dt block
    std::vector<std::vector<double>> B(2 * n, std::vector<double>(2 * n));
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) B[i][j] = O[i + 1][j + 1];
    double det = 1;
    for (int c = 0; c < 2 * n; ++c) {
        int piv = -1;
        double best = 1e-12;
        for (int r = c; r < 2 * n; ++r)
            if (std::abs(B[r][c]) > best) {
                best = std::abs(B[r][c]);
                piv = r;
            }
        if (piv < 0) return Verdict::NonZero;  // rank-deficient: degenerate
        if (piv != c) {
            std::swap(B[piv], B[c]);
            det = -det;
        }
        det *= B[c][c];
        for (int r = c + 1; r < 2 * n; ++r) {
            double f = B[r][c] / B[c][c];
            for (int j = c; j < 2 * n; ++j) B[r][j] -= f * B[c][j];
        }
    }
    return std::abs(det) > 1e-9 ? Verdict::Zero : Verdict::NonZero;
}

// Cartan characters for the BNII tableau.
inline Generality cartan_generality(int n, const std::string& case_label) {
    Generality g;
    g.s1 = n - 2;
    g.s2 = n - 2;
    g.t = 3 * (n - 2);
    if (g.t != g.s1 + 2 * g.s2)
        throw std::logic_error("involution identity t = s1 + 2 s2 violated");
    if (n == 2) {
        g.text = "no free functions at this level";
    } else if (n == 3) {
        g.text = "1 function of 2 variables";
    } else {
        g.text = std::to_string(n - 2) + " functions of 2 variables";
    }
    (void)case_label;
    return g;
}

// ---------------------------------------------------------------------------
// BNII pipeline

class Classifier {
public:
    Classifier(const GeometryData& geo, std::optional<EigenData> eig, const ZeroTester& tester,
               bool assert_nondiag = false)
        : geo_(&geo),
          tester_(&tester),
          user_eig_(std::move(eig)),
          assert_nondiag_(assert_nondiag),
          n_(geo.n()),
          m_(2 * geo.n() + 1) {}

    ClassificationReport run() {
        ClassificationReport rep;
        std::string label = detect_case(*geo_, user_eig_, *tester_, assert_nondiag_);
        if (label != "B") {
            rep.case_label = label;
            rep.verdict = label == "Inconclusive" ? OverallVerdict::Inconclusive
                                                  : OverallVerdict::OutOfScope;
            if (label == "A")
                rep.caveats.push_back(
                    "Case A (Phi a multiple of the identity): Sigma^0 already generates a "
                    "differential ideal; its analysis is outside this tool's scope");
            if (label == "C-detected")
                rep.caveats.push_back("repeated eigenvalues detected; Case C analysis is out of scope");
            if (label == "D-detected")
                rep.caveats.push_back("Phi not diagonalisable; Case D analysis is out of scope");
            return rep;
        }

        // integrability census on user labels
        StructureFunctionExtractor user_ex(*geo_, *user_eig_);
        StructureFunctions user_sf = user_ex.extract(*tester_);
        for (auto& w : user_sf.inconclusive)
            rep.caveats.push_back("inconclusive expansion cross-check: " + w);

        std::vector<int> noninteg, integ;
        bool census_inconclusive = false;
        rep.integrable.resize(n_);
        for (int a = 0; a < n_; ++a) {
            IntegrabilityResult ir = integrability_test(user_sf, a, *tester_);
            rep.integrable[a] = ir.verdict;
            if (ir.verdict == Verdict::NonZero)
                noninteg.push_back(a);
            else if (ir.verdict == Verdict::Zero)
                integ.push_back(a);
            else
                census_inconclusive = true;
        }
        if (census_inconclusive) {
            rep.case_label = "Inconclusive";
            rep.verdict = OverallVerdict::Inconclusive;
            rep.caveats.push_back("integrability census has inconclusive zero-tests");
            return rep;
        }
        rep.q = (int)noninteg.size();

        // reorder so non-integrable co-distributions carry labels 1..q
        rep.relabel = noninteg;
        rep.relabel.insert(rep.relabel.end(), integ.begin(), integ.end());
        user_sf_ = user_sf;
        bool identity = true;
        for (int i = 0; i < n_; ++i)
            if (rep.relabel[i] != i) identity = false;
        if (identity) {
            internal_eig_ = *user_eig_;
            sf_ = std::move(user_sf);
        } else {
            internal_eig_ = permuted_eigendata(rep.relabel);
            StructureFunctionExtractor ex(*geo_, *internal_eig_);
            sf_ = ex.extract(*tester_);
        }

        if (rep.q == 0) {
            rep.case_label = "B-q0";
            Condition di = sigma_tilde1_di_test(sf_, *tester_);
            rep.conditions.push_back(di);
            rep.verdict = OverallVerdict::OutOfScope;
            rep.caveats.push_back(
                "all eigen co-distributions integrable (separated case); existence analysis "
                "is handled by earlier results and is out of scope here");
            return rep;
        }
        if (rep.q == 1) {
            rep.case_label = "B-q1";
            Condition di = sigma_tilde1_di_test(sf_, *tester_);
            rep.conditions.push_back(di);
            if (di.verdict == Verdict::NonZero) {
                rep.verdict = OverallVerdict::NotVariational;
                rep.caveats.push_back(
                    "one non-integrable co-distribution and Sigma-tilde^1 is not a "
                    "differential ideal: no non-degenerate solution");
            } else if (di.verdict == Verdict::Zero) {
                rep.verdict = OverallVerdict::OutOfScope;
                rep.caveats.push_back(
                    "Sigma-tilde^1 is a differential ideal; the q=1 existence analysis is "
                    "out of scope here");
            } else {
                rep.verdict = OverallVerdict::Inconclusive;
            }
            return rep;
        }
        if (rep.q >= 3) {
            return run_general_q(rep);
        }
        return run_bnii(std::move(rep));
    }

    const StructureFunctions& structure_functions() const { return sf_; }
    const std::optional<StructureFunctions>& user_structure_functions() const { return user_sf_; }
    const std::optional<EigenData>& internal_eigendata() const { return internal_eig_; }

private:
    EigenData permuted_eigendata(const std::vector<int>& relabel) const {
        EigenData out;
        for (int a : relabel) {
            out.lambda.push_back(user_eig_->lambda[a]);
            out.X.push_back(user_eig_->X[a]);
        }
        std::vector<std::vector<Expr>> bt(n_, std::vector<Expr>(n_));
        for (int c = 0; c < n_; ++c)
            for (int a = 0; a < n_; ++a) bt[c][a] = out.X[a][c];
        out.phi = sym_inverse(bt);
        out.distinct.assign(n_, std::vector<Verdict>(n_, Verdict::Zero));
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                out.distinct[a][b] = user_eig_->distinct[relabel[a]][relabel[b]];
        return out;
    }

    struct Ratio {
        std::string name;
        Expr numerator, denominator;
    };

    // rows of the step-1 coefficient matrix A1 in the unknowns (r1, r2)
    std::vector<std::array<Expr, 2>> a1_rows() const {
        std::vector<std::array<Expr, 2>> rows;
        rows.push_back({sf_.tauGamma[0][1], sf_.tauGamma[1][0]});
        for (int al = 2; al < n_; ++al) {
            rows.push_back({sf_.tauGamma[0][al], zero()});
            rows.push_back({zero(), sf_.tauGamma[1][al]});
            rows.push_back({sub(sf_.tauV[0][1][al], sf_.tauV[0][al][1]), neg(sf_.tauV[1][al][0])});
            rows.push_back({sf_.tauV[0][1][al], neg(sf_.tauV[1][0][al])});
            rows.push_back({sub(sf_.tauH[0][1][al], sf_.tauH[0][al][1]), neg(sf_.tauH[1][al][0])});
            rows.push_back({sf_.tauH[0][1][al], neg(sf_.tauH[1][0][al])});
            rows.push_back({sf_.curv[0][1][al], neg(sf_.curv[1][0][al])});
        }
        return rows;
    }

    std::vector<Ratio> h2_ratios() const {
        std::vector<Ratio> rs;
        rs.push_back({"-tauGamma[1][2]/tauGamma[2][1]", neg(sf_.tauGamma[0][1]), sf_.tauGamma[1][0]});
        for (int al = 2; al < n_; ++al) {
            std::string a = std::to_string(al + 1);
            rs.push_back({"(tauV[1][2][" + a + "]-tauV[1][" + a + "][2])/tauV[2][" + a + "][1]",
                          sub(sf_.tauV[0][1][al], sf_.tauV[0][al][1]), sf_.tauV[1][al][0]});
            rs.push_back({"tauV[1][2][" + a + "]/tauV[2][1][" + a + "]", sf_.tauV[0][1][al],
                          sf_.tauV[1][0][al]});
            rs.push_back({"(tauH[1][2][" + a + "]-tauH[1][" + a + "][2])/tauH[2][" + a + "][1]",
                          sub(sf_.tauH[0][1][al], sf_.tauH[0][al][1]), sf_.tauH[1][al][0]});
            rs.push_back({"tauH[1][2][" + a + "]/tauH[2][1][" + a + "]", sf_.tauH[0][1][al],
                          sf_.tauH[1][0][al]});
            rs.push_back({"C[1][2][" + a + "]/C[2][1][" + a + "]", sf_.curv[0][1][al],
                          sf_.curv[1][0][al]});
        }
        return rs;
    }

    ClassificationReport run_bnii(ClassificationReport rep) {
        auto rows = a1_rows();
        bool any_nonzero = false, rank_inconclusive = false;
        for (auto& row : rows)
            for (auto& e : row) {
                Verdict v = tester_->is_zero(e);
                if (v == Verdict::NonZero) any_nonzero = true;
                if (v == Verdict::Inconclusive) rank_inconclusive = true;
            }
        bool any_minor_nonzero = false;
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = i + 1; j < rows.size(); ++j) {
                Expr minor = sub(mul({rows[i][0], rows[j][1]}), mul({rows[i][1], rows[j][0]}));
                Verdict v = tester_->is_zero(minor);
                if (v == Verdict::NonZero) any_minor_nonzero = true;
                if (v == Verdict::Inconclusive) rank_inconclusive = true;
            }

        if (any_minor_nonzero) {
            rep.rank_a1 = 2;
            rep.case_label = "B-NoSolution";
            rep.verdict = OverallVerdict::NotVariational;
            rep.caveats.push_back(
                "rank(A1) = 2 forces r1 = r2 = 0: no non-degenerate closed 2-form exists");
            return rep;
        }
        if (!any_nonzero) {
            if (rank_inconclusive) {
                rep.case_label = "Inconclusive";
                rep.verdict = OverallVerdict::Inconclusive;
                rep.caveats.push_back("rank of A1 could not be resolved");
                return rep;
            }
            rep.rank_a1 = 0;
            rep.case_label = "BNII0";
            Condition di = sigma_tilde1_di_test(sf_, *tester_);
            rep.conditions.push_back(di);
            rep.generality = cartan_generality(n_, rep.case_label);
            rep.verdict = OverallVerdict::OutOfScope;
            rep.caveats.push_back(
                "rank(A1) = 0: Sigma-tilde^1 generates a differential ideal; the remaining "
                "existence conditions are external to this analysis");
            return rep;
        }
        rep.rank_a1 = 1;
        rep.case_label = "BNII1";
        return run_bnii1(std::move(rep));
    }

    ClassificationReport run_bnii1(ClassificationReport rep) {
        StructureFunctionExtractor ex(*geo_, *internal_eig_);
        bool any_inconclusive = false;
        auto push = [&](Condition c) {
            if (c.verdict == Verdict::Inconclusive) any_inconclusive = true;
            rep.conditions.push_back(std::move(c));
        };

        // (5.3): tauGamma[1][alpha] = tauGamma[2][alpha] = 0
        {
            Condition c{"C-51", "tau^{1G}_alpha = tau^{2G}_alpha = 0", Verdict::Zero, ""};
            for (int al = 2; al < n_ && c.verdict != Verdict::NonZero; ++al)
                for (int i = 0; i < 2; ++i) {
                    Verdict v = tester_->is_zero(sf_.tauGamma[i][al]);
                    if (v == Verdict::NonZero) {
                        c.verdict = Verdict::NonZero;
                        c.witness = "tauGamma[" + std::to_string(i + 1) + "][" +
                                    std::to_string(al + 1) + "] = " +
                                    print(canon(sf_.tauGamma[i][al]));
                        break;
                    }
                    if (v == Verdict::Inconclusive) c.verdict = Verdict::Inconclusive;
                }
            push(c);
        }

        // (5.4): well-defined nonzero ratios agree; h2 is their common value
        Expr h2;
        {
            Condition c{"C-52", "defined ratios of (5.4) agree and fix h2", Verdict::Zero, ""};
            std::vector<std::pair<std::string, Expr>> defined;
            for (auto& r : h2_ratios()) {
                Verdict vn = tester_->is_zero(r.numerator);
                Verdict vd = tester_->is_zero(r.denominator);
                if (vn == Verdict::Inconclusive || vd == Verdict::Inconclusive) {
                    c.verdict = Verdict::Inconclusive;
                    c.witness = "ratio " + r.name + " unresolved";
                    continue;
                }
                if (vn == Verdict::Zero && vd == Verdict::Zero) continue;
                if (vn == Verdict::Zero || vd == Verdict::Zero) {
                    c.verdict = Verdict::NonZero;
                    c.witness = "ratio " + r.name + " has exactly one vanishing side";
                    break;
                }
                defined.push_back({r.name, canon(div(r.numerator, r.denominator))});
            }
            if (c.verdict != Verdict::NonZero) {
                if (defined.empty()) {
                    c.verdict = Verdict::Inconclusive;
                    c.witness = "no defined ratio although rank(A1) = 1";
                } else {
                    h2 = defined.front().second;
                    for (size_t i = 1; i < defined.size(); ++i) {
                        Verdict v = tester_->is_zero(sub(h2, defined[i].second));
                        if (v == Verdict::NonZero) {
                            c.verdict = Verdict::NonZero;
                            c.witness = "ratios " + defined.front().first + " and " +
                                        defined[i].first + " disagree";
                            break;
                        }
                        if (v == Verdict::Inconclusive && c.verdict == Verdict::Zero)
                            c.verdict = Verdict::Inconclusive;
                    }
                }
            }
            push(c);
            if (!h2) {
                rep.verdict = OverallVerdict::Inconclusive;
                return rep;
            }
            rep.h2 = h2;
        }

        // (5.6): dh2 + xi^1_2 + h2 (xi^2_2 - xi^1_1) = 0 mod phi^{2V}, phi^{2H}
        {
            CoframeForm dh2 = ex.to_eigen(ex.frames().differential(h2));
            CoframeForm lhs = dh2 + sf_.xi_off(0, 1) +
                              (sf_.xi_diag(1) - sf_.xi_diag(0)).scaled(h2);
            Condition c = check_one_form_mod(lhs, "C-56",
                                             "dh2 + xi^1_2 + h2(xi^2_2 - xi^1_1) = 0 mod "
                                             "phi^{2V}, phi^{2H}",
                                             {1 + 1, 1 + n_ + 1});
            push(c);
        }

        // (5.10): d(xi^1_1 + h2 xi^2_1) = 0
        CoframeForm xi_t11 = sf_.xi_diag(0) + sf_.xi_off(1, 0).scaled(h2);
        {
            CoframeForm d = ex.d_eigen(xi_t11);
            Condition c{"C-510", "d(xi^1_1 + h2 xi^2_1) = 0", Verdict::Zero, ""};
            for (int i = 0; i < m_ && c.verdict != Verdict::NonZero; ++i)
                for (int j = i + 1; j < m_; ++j) {
                    Verdict v = tester_->is_zero(d.at(i, j));
                    if (v == Verdict::NonZero) {
                        c.verdict = Verdict::NonZero;
                        c.witness = "component (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") = " + print(canon(d.at(i, j)));
                        break;
                    }
                    if (v == Verdict::Inconclusive) c.verdict = Verdict::Inconclusive;
                }
            push(c);
        }

        // (5.11): (xi^a_a - xi-tilde^1_1) ^ xi-tilde^1_a + d xi-tilde^1_a = 0
        // mod phi^{aV}, phi^{aH}, for each integrable label a
        {
            Condition c{"C-511", "torsion vanishes mod phi^{aV}, phi^{aH} for each integrable label",
                        Verdict::Zero, ""};
            for (int al = 2; al < n_ && c.verdict != Verdict::NonZero; ++al) {
                CoframeForm xi_t1a = sf_.xi_off(0, al) + sf_.xi_off(1, al).scaled(h2);
                CoframeForm lhs = CoframeForm::wedge11(sf_.xi_diag(al) - xi_t11, xi_t1a) +
                                  ex.d_eigen(xi_t1a);
                for (int i = 0; i < m_ && c.verdict != Verdict::NonZero; ++i)
                    for (int j = i + 1; j < m_; ++j) {
                        if (i == 1 + al || i == 1 + n_ + al || j == 1 + al || j == 1 + n_ + al)
                            continue;
                        Verdict v = tester_->is_zero(lhs.at(i, j));
                        if (v == Verdict::NonZero) {
                            c.verdict = Verdict::NonZero;
                            c.witness = "alpha = " + std::to_string(al + 1) + ", component (" +
                                        std::to_string(i) + "," + std::to_string(j) + ") = " +
                                        print(canon(lhs.at(i, j)));
                            break;
                        }
                        if (v == Verdict::Inconclusive) c.verdict = Verdict::Inconclusive;
                    }
            }
            push(c);
        }

        bool all_zero = true;
        std::string failing;
        for (auto& c : rep.conditions)
            if (c.verdict == Verdict::NonZero) {
                all_zero = false;
                failing = c.id;
            } else if (c.verdict != Verdict::Zero) {
                all_zero = false;
            }
        if (!failing.empty()) {
            rep.verdict = OverallVerdict::NotVariational;
        } else if (any_inconclusive || !all_zero) {
            rep.verdict = OverallVerdict::Inconclusive;
        } else {
            // final module Sigma-tilde^2 must retain every omega^a
            TwoFormModule mod;
            mod.step = 2;
            mod.labels.push_back("omega~1");
            mod.basis.push_back(omega_form(0) + omega_form(1).scaled(h2));
            for (int al = 2; al < n_; ++al) {
                mod.labels.push_back("omega" + std::to_string(al + 1));
                mod.basis.push_back(omega_form(al));
            }
            Verdict deg = degenerate_check(mod, n_, *tester_);
            if (deg == Verdict::NonZero) {
                rep.verdict = OverallVerdict::NotVariational;
                rep.caveats.push_back("final module fails the regularity check");
            } else if (deg == Verdict::Inconclusive) {
                rep.verdict = OverallVerdict::Inconclusive;
            } else {
                rep.verdict = OverallVerdict::Variational;
                rep.generality = cartan_generality(n_, rep.case_label);
            }
        }
        return rep;
    }

    // omega^a = phi^{aV} ^ phi^{aH} in eigen-coframe components
    CoframeForm omega_form(int a) const {
        CoframeForm w(2, m_);
        w.set(1 + a, 1 + n_ + a, one());
        return w;
    }

    Condition check_one_form_mod(const CoframeForm& w, const std::string& id,
                                 const std::string& tag, std::vector<int> mod_indices) const {
        Condition c{id, tag, Verdict::Zero, ""};
        for (int i = 0; i < m_; ++i) {
            if (std::find(mod_indices.begin(), mod_indices.end(), i) != mod_indices.end())
                continue;
            Verdict v = tester_->is_zero(w.at(i));
            if (v == Verdict::NonZero) {
                c.verdict = Verdict::NonZero;
                c.witness = "component " + std::to_string(i) + " = " + print(canon(w.at(i)));
                return c;
            }
            if (v == Verdict::Inconclusive) c.verdict = Verdict::Inconclusive;
        }
        return c;
    }

    // q >= 3: run the step-1 rank analysis of the full system in r_1..r_n;
    // iteration beyond step 1 is reported, not analysed.
    ClassificationReport run_general_q(ClassificationReport rep) {
        rep.case_label = "B-q" + std::to_string(rep.q);
        Condition di = sigma_tilde1_di_test(sf_, *tester_);
        rep.conditions.push_back(di);
        if (di.verdict == Verdict::Zero) {
            rep.verdict = OverallVerdict::OutOfScope;
            rep.caveats.push_back(
                "Sigma-tilde^1 generates a differential ideal; existence conditions for q > 2 "
                "are out of scope");
            return rep;
        }
        // generic numeric rank of the full step-1 system
        int rank = numeric_system_rank();
        if (rank >= n_) {
            rep.verdict = OverallVerdict::NotVariational;
            rep.caveats.push_back(
                "the step-1 system admits only r = 0: no non-degenerate solution (full rank " +
                std::to_string(rank) + ")");
        } else {
            rep.verdict = OverallVerdict::Inconclusive;
            rep.caveats.push_back(
                "Sigma-tilde iteration beyond step 1 for q = " + std::to_string(rep.q) +
                " non-integrable co-distributions is not analysed by this tool");
        }
        return rep;
    }

    int numeric_system_rank() const {
        std::vector<std::vector<Expr>> rows;
        auto row = [&](std::initializer_list<std::pair<int, Expr>> entries) {
            std::vector<Expr> r(n_, zero());
            for (auto& [i, e] : entries) r[i] = add({r[i], e});
            rows.push_back(std::move(r));
        };
        for (int a = 0; a < n_; ++a)
            for (int b = a + 1; b < n_; ++b)
                row({{a, sf_.tauGamma[a][b]}, {b, sf_.tauGamma[b][a]}});
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) {
                    if (a == b || a == c || b == c) continue;
                    row({{a, sub(sf_.tauV[a][b][c], sf_.tauV[a][c][b])},
                         {b, neg(sf_.tauV[b][c][a])},
                         {c, sf_.tauV[c][b][a]}});
                    row({{a, sub(sf_.tauH[a][b][c], sf_.tauH[a][c][b])},
                         {b, neg(sf_.tauH[b][c][a])},
                         {c, sf_.tauH[c][b][a]}});
                    row({{a, sf_.curv[a][c][b]}, {b, sf_.curv[b][a][c]}, {c, sf_.curv[c][b][a]}});
                }
        int best = 0;
        for (auto& p : tester_->sample_points()) {
            std::vector<std::vector<double>> M;
            try {
                for (auto& r : rows) {
                    std::vector<double> num;
                    for (auto& e : r) num.push_back(eval_numeric(e, p));
                    M.push_back(std::move(num));
                }
            } catch (const EvalDomainError&) {
                continue;
            }
            int rank = 0;
            int rowi = 0;
            for (int col = 0; col < n_ && rowi < (int)M.size(); ++col) {
                int piv = -1;
                double bestv = 1e-9;
                for (int r = rowi; r < (int)M.size(); ++r)
                    if (std::abs(M[r][col]) > bestv) {
                        bestv = std::abs(M[r][col]);
                        piv = r;
                    }
                if (piv < 0) continue;
                std::swap(M[piv], M[rowi]);
                for (int r = 0; r < (int)M.size(); ++r) {
                    if (r == rowi) continue;
                    double f = M[r][col] / M[rowi][col];
                    for (int j = 0; j < n_; ++j) M[r][j] -= f * M[rowi][j];
                }
                ++rowi;
                ++rank;
            }
            best = std::max(best, rank);
        }
        return best;
    }

    const GeometryData* geo_;
    const ZeroTester* tester_;
    std::optional<EigenData> user_eig_;
    std::optional<EigenData> internal_eig_;
    std::optional<StructureFunctions> user_sf_;
    bool assert_nondiag_ = false;
    StructureFunctions sf_;
    int n_, m_;
};

}  // namespace vicar

#endif
