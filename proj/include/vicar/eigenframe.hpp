#ifndef VICAR_EIGENFRAME_HPP
#define VICAR_EIGENFRAME_HPP

#include <optional>
#include <string>
#include <vector>

#include "vicar/coframe.hpp"
#include "vicar/sode.hpp"

namespace vicar {

class EigenError : public std::runtime_error {
public:
    enum class Code { VerificationFailed, AutoSolveUnavailable, SingularEigenvectorMatrix };
    EigenError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
    Code code;
};

// Eigenvalues, eigenvector components X_a^c and eigenform components phi^a_c
// of the Jacobi endomorphism, with the pairwise-distinctness verdicts.
struct EigenData {
    std::vector<Expr> lambda;            // lambda_a
    std::vector<std::vector<Expr>> X;    // X[a][c]
    std::vector<std::vector<Expr>> phi;  // phi[a][c], rows inverse to X
    std::vector<std::vector<Verdict>> distinct;  // is_zero(lambda_a - lambda_b)

    bool all_distinct() const {
        for (size_t a = 0; a < lambda.size(); ++a)
            for (size_t b = a + 1; b < lambda.size(); ++b)
                if (distinct[a][b] != Verdict::NonZero) return false;
        return true;
    }
    bool any_repeated() const {
        for (size_t a = 0; a < lambda.size(); ++a)
            for (size_t b = a + 1; b < lambda.size(); ++b)
                if (distinct[a][b] == Verdict::Zero) return true;
        return false;
    }
};

// ---------------------------------------------------------------------------
// small symbolic linear algebra helpers

inline Expr sym_det(const std::vector<std::vector<Expr>>& m) {
    const size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return sub(mul({m[0][0], m[1][1]}), mul({m[0][1], m[1][0]}));
    std::vector<Expr> terms;
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Expr>> minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<Expr> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        Expr t = mul({m[0][j], sym_det(minor)});
        terms.push_back(j % 2 == 0 ? t : neg(t));
    }
    return add(std::move(terms));
}

// Inverse via the adjugate. Throws when the determinant is structurally zero;
// genuinely singular-but-unsimplifiable determinants surface later through
// numeric checks.
inline std::vector<std::vector<Expr>> sym_inverse(const std::vector<std::vector<Expr>>& m) {
    const size_t n = m.size();
    Expr det = sym_det(m);
    if (is_zero_node(det))
        throw EigenError(EigenError::Code::SingularEigenvectorMatrix,
                         "matrix has vanishing determinant");
    Expr inv_det = pow(det, Rational(-1));
    std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n, zero()));
    if (n == 1) {
        out[0][0] = inv_det;
        return out;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<std::vector<Expr>> minor;
            for (size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Expr> row;
                for (size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            Expr cof = sym_det(minor);
            if ((i + j) % 2 == 1) cof = neg(cof);
            out[i][j] = mul({cof, inv_det});
        }
    return out;
}

// ---------------------------------------------------------------------------

// Verify supplied eigendata against Phi, or attempt an automatic solve for
// n <= 3 (zero-root detection plus the quadratic formula). Eigenvector
// scaling is the caller's choice and is never altered.
inline EigenData resolve_eigendata(const GeometryData& geo, const ZeroTester& tester,
                                   std::optional<EigenData> supplied = std::nullopt) {
    const int n = geo.n();
    EigenData eig;

    if (supplied) {
        eig = std::move(*supplied);
        if ((int)eig.lambda.size() != n || (int)eig.X.size() != n)
            throw EigenError(EigenError::Code::VerificationFailed,
                             "eigendata arrays do not match dimension");
        for (int a = 0; a < n; ++a)
            for (int e = 0; e < n; ++e) {
                std::vector<Expr> terms;
                for (int c = 0; c < n; ++c)
                    terms.push_back(mul({geo.Phi(e, c), eig.X[a][c]}));
                Expr residual = sub(add(std::move(terms)), mul({eig.lambda[a], eig.X[a][e]}));
                ZeroResult zr = tester.test(residual);
                if (zr.verdict != Verdict::Zero)
                    throw EigenError(
                        EigenError::Code::VerificationFailed,
                        "Phi X = lambda X fails for eigenvector " + std::to_string(a + 1) +
                            ", component " + std::to_string(e + 1) + ": residual " +
                            print(canon(residual)) + " tests " + verdict_name(zr.verdict));
            }
    } else {
        // automatic eigen-solution, best effort for n <= 3
        if (n > 3)
            throw EigenError(EigenError::Code::AutoSolveUnavailable,
                             "automatic eigen-solution supports n <= 3; supply eigendata");
        if (n == 1) {
            eig.lambda = {geo.Phi(0, 0)};
            eig.X = {{one()}};
        } else {
            // characteristic polynomial coefficients of Phi
            std::vector<std::vector<Expr>> phi_m(n, std::vector<Expr>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) phi_m[i][j] = geo.Phi(i, j);
            Expr trace = zero();
            for (int i = 0; i < n; ++i) trace = add({trace, phi_m[i][i]});
            Expr det = sym_det(phi_m);
            std::vector<Expr> roots;
            auto quadratic_roots = [&](const Expr& s, const Expr& p) {
                // roots of L^2 - s L + p
                Expr disc = sub(mul({s, s}), mul({num(4), p}));
                Expr rt = sqrt_(disc);
                roots.push_back(mul({num(Rational(1, 2)), add({s, rt})}));
                roots.push_back(mul({num(Rational(1, 2)), sub(s, rt)}));
            };
            if (n == 2) {
                quadratic_roots(trace, det);
            } else {
                // n == 3: only the zero-root case is in reach symbolically
                if (tester.is_zero(det) != Verdict::Zero)
                    throw EigenError(EigenError::Code::AutoSolveUnavailable,
                                     "cannot factor the cubic characteristic polynomial; "
                                     "supply eigendata");
                // remaining quadratic L^2 - tr L + c2, c2 = sum of principal 2x2 minors
                std::vector<Expr> minors;
                for (int i = 0; i < 3; ++i)
                    for (int j = i + 1; j < 3; ++j)
                        minors.push_back(sub(mul({phi_m[i][i], phi_m[j][j]}),
                                             mul({phi_m[i][j], phi_m[j][i]})));
                quadratic_roots(trace, add(std::move(minors)));
                roots.push_back(zero());
            }
            eig.lambda = roots;
            // eigenvectors from the null space of Phi - lambda I
            for (int a = 0; a < n; ++a) {
                std::vector<std::vector<Expr>> A(n, std::vector<Expr>(n));
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        A[i][j] = i == j ? sub(phi_m[i][j], eig.lambda[a]) : phi_m[i][j];
                std::vector<Expr> v;
                if (n == 2) {
                    // (A01, -A00) or (A11, -A10), whichever is nonzero
                    v = {A[0][1], neg(A[0][0])};
                    if (tester.is_zero(v[0]) == Verdict::Zero &&
                        tester.is_zero(v[1]) == Verdict::Zero)
                        v = {A[1][1], neg(A[1][0])};
                } else {
                    // cross product of two rows of A spans the null space
                    auto cross = [&](int r1, int r2) -> std::vector<Expr> {
                        return {sub(mul({A[r1][1], A[r2][2]}), mul({A[r1][2], A[r2][1]})),
                                sub(mul({A[r1][2], A[r2][0]}), mul({A[r1][0], A[r2][2]})),
                                sub(mul({A[r1][0], A[r2][1]}), mul({A[r1][1], A[r2][0]}))};
                    };
                    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
                    for (auto& pr : pairs) {
                        v = cross(pr[0], pr[1]);
                        bool nonzero = false;
                        for (auto& c : v)
                            if (tester.is_zero(c) == Verdict::NonZero) nonzero = true;
                        if (nonzero) break;
                    }
                }
                bool any = false;
                for (auto& c : v)
                    if (!is_zero_node(canon(c))) any = true;
                if (!any)
                    throw EigenError(EigenError::Code::AutoSolveUnavailable,
                                     "could not build an eigenvector for eigenvalue " +
                                         print(canon(eig.lambda[a])) + "; supply eigendata");
                eig.X.push_back(std::move(v));
            }
        }
    }

    // eigenform rows: inverse-transpose of the eigenvector matrix
    std::vector<std::vector<Expr>> bt(n, std::vector<Expr>(n));
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a) bt[c][a] = eig.X[a][c];
    eig.phi = sym_inverse(bt);

    eig.distinct.assign(n, std::vector<Verdict>(n, Verdict::Zero));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            eig.distinct[a][b] =
                a == b ? Verdict::Zero : tester.is_zero(sub(eig.lambda[a], eig.lambda[b]));
    return eig;
}

// ---------------------------------------------------------------------------

class ExpansionMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structure functions read off the eigen-coframe expansions of d phi^{aV}
// and d phi^{aH}, plus the curvature contractions, A-combinations and the
// xi 1-forms used by the classification.
struct StructureFunctions {
    int n = 0;
    int m = 0;  // 2n+1
    std::vector<std::vector<Expr>> tauGamma;          // tauGamma[a][b]
    std::vector<std::vector<std::vector<Expr>>> tauV; // tauV[a][b][c] = tau^{aV}_{bc}
    std::vector<std::vector<std::vector<Expr>>> tauH; // tauH[a][b][c] = tau^{aH}_{bc}
    std::vector<std::vector<std::vector<Expr>>> curv; // curv[a][b][c] = phi^{aV}(R(X_b^H,X_c^H))
    std::vector<CoframeForm> dphiV;                   // eigen-coframe 2-forms
    std::vector<CoframeForm> dphiH;
    std::vector<std::string> inconclusive;            // cross-checks that did not resolve

    Expr AV(int a, int b, int c) const {
        return sub(tauV[a][b][c], mul({num(2), tauV[a][c][b]}));
    }
    Expr AH(int a, int b, int c) const {
        return sub(tauH[a][b][c], mul({num(2), tauH[a][c][b]}));
    }

    // xi^a_a, including the -2 tau^{aGamma}_a dt part carried by the
    // diagonal expansion of d omega^a.
    CoframeForm xi_diag(int a) const {
        CoframeForm xi(1, m);
        xi.set(0, mul({num(-2), tauGamma[a][a]}));
        for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            xi.set(1 + b, AV(a, a, b));
            xi.set(1 + n + b, AH(a, a, b));
        }
        return xi;
    }

    // xi^a_b = tau^{aV}_{bb} phi^{aV} + tau^{aH}_{bb} phi^{aH}, a != b
    CoframeForm xi_off(int a, int b) const {
        CoframeForm xi(1, m);
        xi.set(1 + a, tauV[a][b][b]);
        xi.set(1 + n + a, tauH[a][b][b]);
        return xi;
    }
};

// Change-of-basis matrices between the natural and eigen frames.
// T maps eigen frame fields to natural ones, S the reverse.
inline std::vector<std::vector<Expr>> eigen_to_natural_frame(const EigenData& eig, int n) {
    const int m = 2 * n + 1;
    std::vector<std::vector<Expr>> T(m, std::vector<Expr>(m, zero()));
    T[0][0] = one();
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            T[1 + n + c][1 + b] = eig.X[b][c];  // X_b^V = X_b^c V_c
            T[1 + c][1 + n + b] = eig.X[b][c];  // X_b^H = X_b^c H_c
        }
    return T;
}

inline std::vector<std::vector<Expr>> natural_to_eigen_frame(const EigenData& eig, int n) {
    const int m = 2 * n + 1;
    std::vector<std::vector<Expr>> S(m, std::vector<Expr>(m, zero()));
    S[0][0] = one();
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a) {
            S[1 + a][1 + n + c] = eig.phi[a][c];  // V_c = phi^a_c X_a^V
            S[1 + n + a][1 + c] = eig.phi[a][c];  // H_c = phi^a_c X_a^H
        }
    return S;
}

class StructureFunctionExtractor {
public:
    StructureFunctionExtractor(const GeometryData& geo, const EigenData& eig)
        : geo_(&geo), eig_(&eig), frames_(geo), n_(geo.n()), m_(2 * geo.n() + 1) {}

    // phi^{aV} and phi^{aH} as natural-coframe 1-forms
    CoframeForm phiV(int a) const {
        CoframeForm w(1, m_);
        for (int c = 0; c < n_; ++c) w.set(1 + n_ + c, eig_->phi[a][c]);
        return w;
    }
    CoframeForm phiH(int a) const {
        CoframeForm w(1, m_);
        for (int c = 0; c < n_; ++c) w.set(1 + c, eig_->phi[a][c]);
        return w;
    }

    CoframeForm to_eigen(const CoframeForm& w) const {
        return transform_frame(w, eigen_to_natural_frame(*eig_, n_));
    }
    CoframeForm to_natural(const CoframeForm& w) const {
        return transform_frame(w, natural_to_eigen_frame(*eig_, n_));
    }

    // exterior derivative of a form given in eigen-coframe components
    CoframeForm d_eigen(const CoframeForm& w) const {
        return to_eigen(frames_.exterior_derivative(to_natural(w)));
    }

    const FrameCalculus& frames() const { return frames_; }

    StructureFunctions extract(const ZeroTester& tester) const {
        StructureFunctions sf;
        sf.n = n_;
        sf.m = m_;
        sf.tauGamma.assign(n_, std::vector<Expr>(n_, zero()));
        sf.tauV.assign(n_, std::vector<std::vector<Expr>>(n_, std::vector<Expr>(n_, zero())));
        sf.tauH = sf.tauV;
        sf.curv = sf.tauV;

        std::vector<CoframeForm> dV, dH;
        for (int a = 0; a < n_; ++a) {
            dV.push_back(to_eigen(frames_.exterior_derivative(phiV(a))));
            dH.push_back(to_eigen(frames_.exterior_derivative(phiH(a))));
        }

        auto check = [&](const Expr& residual, const std::string& what) {
            ZeroResult zr = tester.test(residual);
            if (zr.verdict == Verdict::NonZero)
                throw ExpansionMismatch("expansion cross-check failed: " + what +
                                        " residual " + print(canon(residual)));
            if (zr.verdict == Verdict::Inconclusive) sf.inconclusive.push_back(what);
        };

        for (int a = 0; a < n_; ++a) {
            const CoframeForm& DV = dV[a];
            const CoframeForm& DH = dH[a];
            for (int b = 0; b < n_; ++b) {
                // dt ^ phi^{bV} coefficient of d phi^{aV} is -tau^{aGamma}_b
                sf.tauGamma[a][b] = canon(neg(DV.at(0, 1 + b)));
                // ... and the dt ^ phi^{bH} coefficient of d phi^{aH} must agree
                check(add({DH.at(0, 1 + n_ + b), sf.tauGamma[a][b]}),
                      "tauGamma[" + idx2(a, b) + "] between dphiV and dphiH");
                // dt ^ phi^{bH} coefficient of d phi^{aV} is -lambda_a delta_ab
                Expr expect = b == a ? neg(eig_->lambda[a]) : zero();
                check(sub(DV.at(0, 1 + n_ + b), expect),
                      "dt^phiH coefficient of dphiV[" + idx2(a, b) + "]");
                // dt ^ phi^{bV} coefficient of d phi^{aH} is delta_ab
                check(sub(DH.at(0, 1 + b), b == a ? one() : zero()),
                      "dt^phiV coefficient of dphiH[" + idx2(a, b) + "]");
            }
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) {
                    // mixed components determine the full tau^{aH} and tau^{aV}
                    sf.tauH[a][c][b] = canon(DV.at(1 + b, 1 + n_ + c));
                    sf.tauV[a][b][c] = canon(neg(DH.at(1 + b, 1 + n_ + c)));
                }
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                    sf.curv[a][b][c] = canon(neg(DV.at(1 + n_ + b, 1 + n_ + c)));
        }

        // cross-consistency: antisymmetric parts seen in the V^V and H^H blocks
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = b + 1; c < n_; ++c) {
                    Expr vv = dV[a].at(1 + b, 1 + c);
                    check(sub(vv, sub(sf.tauV[a][c][b], sf.tauV[a][b][c])),
                          "tauV antisymmetric part [" + idx3(a, b, c) + "]");
                    Expr hh = dH[a].at(1 + n_ + b, 1 + n_ + c);
                    check(sub(hh, sub(sf.tauH[a][c][b], sf.tauH[a][b][c])),
                          "tauH antisymmetric part [" + idx3(a, b, c) + "]");
                }

        sf.dphiV = std::move(dV);
        sf.dphiH = std::move(dH);
        return sf;
    }

    // curvature contraction phi^{aV}(R(X_b^H, X_c^H)) via the curvature
    // tensor; an independent route to StructureFunctions::curv.
    Expr curvature_contraction(int a, int b, int c) const {
        std::vector<Expr> terms;
        for (int d = 0; d < n_; ++d)
            for (int e = 0; e < n_; ++e)
                for (int f = 0; f < n_; ++f)
                    terms.push_back(mul({eig_->phi[a][d], eig_->X[b][e], eig_->X[c][f],
                                         geo_->R(d, e, f)}));
        return canon(add(std::move(terms)));
    }

private:
    static std::string idx2(int a, int b) {
        return std::to_string(a + 1) + "," + std::to_string(b + 1);
    }
    static std::string idx3(int a, int b, int c) {
        return idx2(a, b) + "," + std::to_string(c + 1);
    }

    const GeometryData* geo_;
    const EigenData* eig_;
    FrameCalculus frames_;
    int n_, m_;
};

// Frobenius integrability of the eigen co-distribution D_a
struct IntegrabilityResult {
    Verdict verdict = Verdict::Inconclusive;  // Zero = integrable
    std::vector<std::string> witnesses;
};

inline IntegrabilityResult integrability_test(const StructureFunctions& sf, int a,
                                              const ZeroTester& tester) {
    IntegrabilityResult res;
    bool inconclusive = false;
    auto probe = [&](const Expr& e, const std::string& name) {
        Verdict v = tester.is_zero(e);
        if (v == Verdict::NonZero) res.witnesses.push_back(name + " = " + print(canon(e)));
        if (v == Verdict::Inconclusive) inconclusive = true;
    };
    for (int b = 0; b < sf.n; ++b) {
        if (b == a) continue;
        probe(sf.tauGamma[a][b], "tauGamma[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "]");
        for (int c = 0; c < sf.n; ++c) {
            if (c == a) continue;
            probe(sf.tauV[a][b][c], "tauV[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) +
                                        "][" + std::to_string(c + 1) + "]");
            probe(sf.tauH[a][b][c], "tauH[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) +
                                        "][" + std::to_string(c + 1) + "]");
            probe(sf.curv[a][b][c], "C[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) +
                                        "][" + std::to_string(c + 1) + "]");
        }
    }
    if (!res.witnesses.empty())
        res.verdict = Verdict::NonZero;  // non-integrable
    else
        res.verdict = inconclusive ? Verdict::Inconclusive : Verdict::Zero;
    return res;
}

}  // namespace vicar

#endif
