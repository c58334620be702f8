#ifndef VICAR_HELMHOLTZ_HPP
#define VICAR_HELMHOLTZ_HPP

#include <string>
#include <vector>

#include "vicar/eigenframe.hpp"

namespace vicar {

// Candidate multiplier matrix g_ab in the problem coordinates.
using Multiplier = std::vector<std::vector<Expr>>;

struct HelmholtzCheck {
    struct Item {
        std::string name;
        Verdict verdict = Verdict::Zero;
        std::string witness;
    };
    std::vector<Item> items;
    bool passed() const {
        for (auto& i : items)
            if (i.verdict != Verdict::Zero) return false;
        return true;
    }
    bool failed() const {
        for (auto& i : items)
            if (i.verdict == Verdict::NonZero) return true;
        return false;
    }
};

// The four multiplier conditions plus non-degeneracy:
//   (i)   g_ab = g_ba
//   (ii)  Gamma(g_ab) = g_ac Gamma^c_b + g_bc Gamma^c_a
//   (iii) g_ac Phi^c_b = g_bc Phi^c_a
//   (iv)  dg_ab/du^c = dg_ac/du^b
//   (v)   det g != 0 on the sampling box
inline HelmholtzCheck check_helmholtz(const GeometryData& geo, const Multiplier& g,
                                      const ZeroTester& tester) {
    const int n = geo.n();
    const Sode& s = geo.sode();
    HelmholtzCheck out;

    auto run = [&](const std::string& name, auto&& residuals) {
        HelmholtzCheck::Item item{name, Verdict::Zero, ""};
        for (auto& [label, e] : residuals) {
            Verdict v = tester.is_zero(e);
            if (v == Verdict::NonZero) {
                item.verdict = Verdict::NonZero;
                item.witness = label + " = " + print(canon(e));
                break;
            }
            if (v == Verdict::Inconclusive) item.verdict = Verdict::Inconclusive;
        }
        out.items.push_back(std::move(item));
    };

    auto ij = [](int a, int b) {
        return "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
    };

    {
        std::vector<std::pair<std::string, Expr>> rs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                rs.push_back({"g" + ij(a, b) + " - g" + ij(b, a), sub(g[a][b], g[b][a])});
        run("symmetry", rs);
    }
    {
        std::vector<std::pair<std::string, Expr>> rs;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                std::vector<Expr> terms{geo.frame_derivative(g[a][b], FrameKind::Gamma)};
                for (int c = 0; c < n; ++c) {
                    terms.push_back(neg(mul({g[a][c], geo.Gamma(c, b)})));
                    terms.push_back(neg(mul({g[b][c], geo.Gamma(c, a)})));
                }
                rs.push_back({"covariant-constancy" + ij(a, b), add(std::move(terms))});
            }
        run("covariant constancy along the flow", rs);
    }
    {
        std::vector<std::pair<std::string, Expr>> rs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                std::vector<Expr> terms;
                for (int c = 0; c < n; ++c) {
                    terms.push_back(mul({g[a][c], geo.Phi(c, b)}));
                    terms.push_back(neg(mul({g[b][c], geo.Phi(c, a)})));
                }
                rs.push_back({"gPhi-symmetry" + ij(a, b), add(std::move(terms))});
            }
        run("self-adjointness of g Phi", rs);
    }
    {
        std::vector<std::pair<std::string, Expr>> rs;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = b + 1; c < n; ++c)
                    rs.push_back({"dg" + ij(a, b) + "/du^" + std::to_string(c + 1) + " - dg" +
                                      ij(a, c) + "/du^" + std::to_string(b + 1),
                                  sub(differentiate(g[a][b], s.vels[c]),
                                      differentiate(g[a][c], s.vels[b]))});
        run("velocity-gradient symmetry", rs);
    }
    {
        std::vector<std::vector<Expr>> gm(n, std::vector<Expr>(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) gm[a][b] = g[a][b];
        Expr det = sym_det(gm);
        HelmholtzCheck::Item item{"non-degeneracy", Verdict::Zero, ""};
        Verdict v = tester.is_zero(det);
        if (v == Verdict::NonZero) {
            item.verdict = Verdict::Zero;  // nonzero determinant is a pass here
        } else if (v == Verdict::Zero) {
            item.verdict = Verdict::NonZero;
            item.witness = "det g = " + print(canon(det));
        } else {
            item.verdict = Verdict::Inconclusive;
            item.witness = "det g unresolved";
        }
        out.items.push_back(std::move(item));
    }
    return out;
}

// Build the coordinate multiplier from eigenbasis coefficients:
// g_cd = sum_{a,b} r_ab phi^a_c phi^b_d.
inline Multiplier r_to_g(const EigenData& eig, const std::vector<std::vector<Expr>>& r) {
    const int n = (int)eig.lambda.size();
    Multiplier g(n, std::vector<Expr>(n, zero()));
    for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
            std::vector<Expr> terms;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (is_zero_node(r[a][b])) continue;
                    terms.push_back(mul({r[a][b], eig.phi[a][c], eig.phi[b][d]}));
                }
            g[c][d] = canon(add(std::move(terms)));
        }
    return g;
}

inline Multiplier r_to_g(const EigenData& eig, const std::vector<Expr>& r_diag) {
    const int n = (int)eig.lambda.size();
    std::vector<std::vector<Expr>> r(n, std::vector<Expr>(n, zero()));
    for (int a = 0; a < n; ++a) r[a][a] = r_diag[a];
    return r_to_g(eig, r);
}

struct ClosedFormCheck {
    Verdict closed = Verdict::Inconclusive;        // d Omega = 0
    Verdict maximal_rank = Verdict::Inconclusive;  // Zero = full rank attained
    std::string witness;
};

// Assemble Omega = g_ab psi^a ^ theta^b in the natural coframe and test
// closedness plus maximal rank at the sample points.
inline ClosedFormCheck check_closed_form(const GeometryData& geo, const Multiplier& g,
                                         const ZeroTester& tester) {
    const int n = geo.n();
    const int m = 2 * n + 1;
    ClosedFormCheck out;

    CoframeForm omega(2, m);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            // psi^a ^ theta^b contributes at the (theta_b, psi_a) slot with a sign
            Expr cur = omega.at(1 + b, 1 + n + a);
            omega.set(1 + b, 1 + n + a, add({cur, neg(g[a][b])}));
        }

    FrameCalculus frames(geo);
    CoframeForm dOmega = frames.exterior_derivative(omega);
    out.closed = Verdict::Zero;
    for (int i = 0; i < m && out.closed != Verdict::NonZero; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = j + 1; k < m; ++k) {
                Verdict v = tester.is_zero(dOmega.at(i, j, k));
                if (v == Verdict::NonZero) {
                    out.closed = Verdict::NonZero;
                    out.witness = "dOmega(" + std::to_string(i) + "," + std::to_string(j) + "," +
                                  std::to_string(k) + ") = " + print(canon(dOmega.at(i, j, k)));
                    break;
                }
                if (v == Verdict::Inconclusive) out.closed = Verdict::Inconclusive;
            }

    // maximal rank <=> det g != 0
    std::vector<std::vector<Expr>> gm(n, std::vector<Expr>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) gm[a][b] = g[a][b];
    Verdict v = tester.is_zero(sym_det(gm));
    if (v == Verdict::NonZero)
        out.maximal_rank = Verdict::Zero;
    else if (v == Verdict::Zero)
        out.maximal_rank = Verdict::NonZero;
    else
        out.maximal_rank = Verdict::Inconclusive;
    return out;
}

struct PfaffianCheck {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> witnesses;
    // read-off inhomogeneous coefficients for the alpha equations
    std::vector<Expr> P, Q;  // indexed alpha-2
};

// Verify a candidate solution of the final Pfaffian system:
//   d r~1 + r~1 xi~^1_1 = 0                                    (exact)
//   d r_alpha + r~1 xi~^1_alpha + r_alpha xi^alpha_alpha = 0
//       (mod phi^{alphaV}, phi^{alphaH}; the remainder defines P, Q)
// All forms are in internal (relabelled) eigen-coframe components.
inline PfaffianCheck verify_pfaffian_solution(const StructureFunctionExtractor& ex,
                                              const StructureFunctions& sf, const Expr& h2,
                                              const Expr& r1t, const std::vector<Expr>& r_alpha,
                                              const ZeroTester& tester) {
    const int n = sf.n;
    const int m = sf.m;
    PfaffianCheck out;
    bool inconclusive = false;
    auto probe = [&](const Expr& e, const std::string& what) {
        Verdict v = tester.is_zero(e);
        if (v == Verdict::NonZero) out.witnesses.push_back(what + " = " + print(canon(e)));
        if (v == Verdict::Inconclusive) inconclusive = true;
    };

    CoframeForm xi_t11 = sf.xi_diag(0) + sf.xi_off(1, 0).scaled(h2);
    CoframeForm eq1 = ex.to_eigen(ex.frames().differential(r1t)) + xi_t11.scaled(r1t);
    for (int i = 0; i < m; ++i)
        probe(eq1.at(i), "first equation, component " + std::to_string(i));

    for (int al = 2; al < n; ++al) {
        const Expr& ra = r_alpha[al - 2];
        CoframeForm xi_t1a = sf.xi_off(0, al) + sf.xi_off(1, al).scaled(h2);
        CoframeForm eq = ex.to_eigen(ex.frames().differential(ra)) + xi_t1a.scaled(r1t) +
                         sf.xi_diag(al).scaled(ra);
        for (int i = 0; i < m; ++i) {
            if (i == 1 + al || i == 1 + n + al) continue;
            probe(eq.at(i), "equation for label " + std::to_string(al + 1) + ", component " +
                                std::to_string(i));
        }
        out.P.push_back(canon(neg(eq.at(1 + al))));
        out.Q.push_back(canon(neg(eq.at(1 + n + al))));
    }

    if (!out.witnesses.empty())
        out.verdict = Verdict::NonZero;
    else
        out.verdict = inconclusive ? Verdict::Inconclusive : Verdict::Zero;
    return out;
}

}  // namespace vicar

#endif
