#ifndef VICAR_SODE_HPP
#define VICAR_SODE_HPP

#include <set>
#include <string>
#include <vector>

#include "vicar/expr.hpp"
#include "vicar/zero_test.hpp"

namespace vicar {

// A system of n second-order ODEs in normal form, d2x^a/dt2 = F^a(t, x, u),
// together with the sampling box used for numeric zero-testing.
struct Sode {
    int n = 0;
    std::vector<std::string> coords;  // x^a names
    std::vector<std::string> vels;    // u^a names
    std::vector<Expr> F;
    DomainBox box;
    std::vector<Expr> guards;  // expressions assumed positive on the box
    unsigned long long seed = 0;
    int samples = 16;

    std::set<std::string> symbol_set() const {
        std::set<std::string> s{"t"};
        s.insert(coords.begin(), coords.end());
        s.insert(vels.begin(), vels.end());
        return s;
    }

    ZeroTester tester() const { return ZeroTester(box, seed, samples); }
};

enum class FrameKind { Gamma, H, V };

// Connection coefficients, Jacobi endomorphism and curvature of a SODE.
// All index accessors are 0-based.
class GeometryData {
public:
    explicit GeometryData(Sode sode) : sode_(std::move(sode)) {
        const int n = sode_.n;
        gamma_.assign(n, std::vector<Expr>(n, zero()));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                gamma_[a][b] = mul({num(Rational(-1, 2)),
                                    differentiate(sode_.F[a], sode_.vels[b])});

        phi_.assign(n, std::vector<Expr>(n, zero()));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                std::vector<Expr> gg;
                for (int c = 0; c < n; ++c)
                    gg.push_back(mul({gamma_[c][b], gamma_[a][c]}));
                phi_[a][b] = add({neg(differentiate(sode_.F[a], sode_.coords[b])),
                                  neg(add(std::move(gg))),
                                  neg(gamma_derivative(a, b))});
            }

        r_.assign(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n, zero())));
        for (int d = 0; d < n; ++d)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Expr t1 = differentiate(differentiate(sode_.F[d], sode_.coords[a]),
                                            sode_.vels[b]);
                    Expr t2 = differentiate(differentiate(sode_.F[d], sode_.coords[b]),
                                            sode_.vels[a]);
                    std::vector<Expr> inner;
                    for (int c = 0; c < n; ++c) {
                        Expr dfc_a = differentiate(sode_.F[c], sode_.vels[a]);
                        Expr dfc_b = differentiate(sode_.F[c], sode_.vels[b]);
                        Expr d2_cb = differentiate(differentiate(sode_.F[d], sode_.vels[c]),
                                                   sode_.vels[b]);
                        Expr d2_ca = differentiate(differentiate(sode_.F[d], sode_.vels[c]),
                                                   sode_.vels[a]);
                        inner.push_back(sub(mul({dfc_a, d2_cb}), mul({dfc_b, d2_ca})));
                    }
                    r_[d][a][b] = mul({num(Rational(1, 2)),
                                       add({sub(t1, t2),
                                            mul({num(Rational(1, 2)), add(std::move(inner))})})});
                }
    }

    const Sode& sode() const { return sode_; }
    int n() const { return sode_.n; }

    const Expr& Gamma(int a, int b) const { return gamma_[a][b]; }
    const Expr& Phi(int a, int b) const { return phi_[a][b]; }
    const Expr& R(int d, int a, int b) const { return r_[d][a][b]; }

    // Directional derivative of f along Gamma, H_a or V_a.
    Expr frame_derivative(const Expr& f, FrameKind which, int idx = 0) const {
        const int n = sode_.n;
        if (which != FrameKind::Gamma && (idx < 0 || idx >= n))
            throw std::out_of_range("frame index out of range");
        switch (which) {
            case FrameKind::Gamma: {
                std::vector<Expr> terms{differentiate(f, "t")};
                for (int a = 0; a < n; ++a) {
                    terms.push_back(mul({sym(sode_.vels[a]), differentiate(f, sode_.coords[a])}));
                    terms.push_back(mul({sode_.F[a], differentiate(f, sode_.vels[a])}));
                }
                return add(std::move(terms));
            }
            case FrameKind::H: {
                std::vector<Expr> terms{differentiate(f, sode_.coords[idx])};
                for (int b = 0; b < n; ++b)
                    terms.push_back(neg(mul({gamma_[b][idx], differentiate(f, sode_.vels[b])})));
                return add(std::move(terms));
            }
            case FrameKind::V:
                return differentiate(f, sode_.vels[idx]);
        }
        return zero();
    }

    // Frame index convention shared with the coframe machinery:
    // 0 -> Gamma, 1..n -> H_a, n+1..2n -> V_a.
    Expr frame_derivative(const Expr& f, int frame_index) const {
        const int n = sode_.n;
        if (frame_index == 0) return frame_derivative(f, FrameKind::Gamma);
        if (frame_index <= n) return frame_derivative(f, FrameKind::H, frame_index - 1);
        return frame_derivative(f, FrameKind::V, frame_index - n - 1);
    }

private:
    Expr gamma_derivative(int a, int b) const {
        // Gamma(Gamma^a_b) without using gamma_ from within the constructor loop
        const Expr g = gamma_[a][b];
        std::vector<Expr> terms{differentiate(g, "t")};
        for (int c = 0; c < sode_.n; ++c) {
            terms.push_back(mul({sym(sode_.vels[c]), differentiate(g, sode_.coords[c])}));
            terms.push_back(mul({sode_.F[c], differentiate(g, sode_.vels[c])}));
        }
        return add(std::move(terms));
    }

    Sode sode_;
    std::vector<std::vector<Expr>> gamma_;
    std::vector<std::vector<Expr>> phi_;
    std::vector<std::vector<std::vector<Expr>>> r_;
};

}  // namespace vicar

#endif
