#ifndef VICAR_COFRAME_HPP
#define VICAR_COFRAME_HPP

#include <array>
#include <vector>

#include "vicar/sode.hpp"

namespace vicar {

// Differential forms expressed on an anholonomic coframe with 2n+1 basis
// covectors. Two bases are used throughout:
//   natural coframe: 0 -> dt, 1..n -> theta^a, n+1..2n -> psi^a
//   eigen coframe:   0 -> dt, 1..n -> phi^{aV}, n+1..2n -> phi^{aH}
// Components of degree-k forms are stored for strictly increasing index
// tuples only; the accessors apply the antisymmetry sign.
class CoframeForm {
public:
    CoframeForm(int degree, int m)
        : degree_(degree), m_(m), comp_(tuple_count(degree, m), zero()) {}

    int degree() const { return degree_; }
    int dim() const { return m_; }

    // degree 1
    const Expr& at(int i) const { return comp_[i]; }
    void set(int i, Expr e) { comp_[i] = std::move(e); }

    // degree 2
    Expr at(int i, int j) const {
        if (i == j) return zero();
        if (i < j) return comp_[rank2(i, j)];
        return neg(comp_[rank2(j, i)]);
    }
    void set(int i, int j, Expr e) {
        if (i < j)
            comp_[rank2(i, j)] = std::move(e);
        else
            comp_[rank2(j, i)] = neg(e);
    }

    // degree 3
    Expr at(int i, int j, int k) const {
        int idx[3] = {i, j, k};
        int sign = sort3(idx);
        if (sign == 0) return zero();
        Expr v = comp_[rank3(idx[0], idx[1], idx[2])];
        return sign > 0 ? v : neg(v);
    }
    void set(int i, int j, int k, Expr e) {
        int idx[3] = {i, j, k};
        int sign = sort3(idx);
        if (sign == 0) throw std::invalid_argument("repeated index in 3-form component");
        comp_[rank3(idx[0], idx[1], idx[2])] = sign > 0 ? std::move(e) : neg(e);
    }

    const std::vector<Expr>& raw() const { return comp_; }

    CoframeForm canonical() const {
        CoframeForm out = *this;
        for (auto& c : out.comp_) c = canon(c);
        return out;
    }

    friend CoframeForm operator+(const CoframeForm& a, const CoframeForm& b) {
        CoframeForm out(a.degree_, a.m_);
        for (size_t i = 0; i < out.comp_.size(); ++i)
            out.comp_[i] = add({a.comp_[i], b.comp_[i]});
        return out;
    }
    friend CoframeForm operator-(const CoframeForm& a, const CoframeForm& b) {
        CoframeForm out(a.degree_, a.m_);
        for (size_t i = 0; i < out.comp_.size(); ++i)
            out.comp_[i] = sub(a.comp_[i], b.comp_[i]);
        return out;
    }
    CoframeForm scaled(const Expr& f) const {
        CoframeForm out(degree_, m_);
        for (size_t i = 0; i < comp_.size(); ++i) out.comp_[i] = mul({f, comp_[i]});
        return out;
    }

    // wedge of two 1-forms
    static CoframeForm wedge11(const CoframeForm& a, const CoframeForm& b) {
        CoframeForm out(2, a.m_);
        for (int i = 0; i < a.m_; ++i)
            for (int j = i + 1; j < a.m_; ++j)
                out.set(i, j, sub(mul({a.at(i), b.at(j)}), mul({a.at(j), b.at(i)})));
        return out;
    }

    // wedge of a 1-form with a 2-form
    static CoframeForm wedge12(const CoframeForm& a, const CoframeForm& b) {
        CoframeForm out(3, a.m_);
        for (int i = 0; i < a.m_; ++i)
            for (int j = i + 1; j < a.m_; ++j)
                for (int k = j + 1; k < a.m_; ++k)
                    out.set(i, j, k,
                            add({mul({a.at(i), b.at(j, k)}), neg(mul({a.at(j), b.at(i, k)})),
                                 mul({a.at(k), b.at(i, j)})}));
        return out;
    }

    static int tuple_count(int degree, int m) {
        switch (degree) {
            case 1: return m;
            case 2: return m * (m - 1) / 2;
            case 3: return m * (m - 1) * (m - 2) / 6;
        }
        throw std::invalid_argument("unsupported form degree");
    }

private:
    int rank2(int i, int j) const {
        // pairs (i,j), i<j, ordered lexicographically
        return i * m_ - i * (i + 1) / 2 + (j - i - 1);
    }
    int rank3(int i, int j, int k) const {
        int r = 0;
        for (int a = 0; a < i; ++a) r += (m_ - 1 - a) * (m_ - 2 - a) / 2;
        int jj = j - i - 1, kk = k - i - 1, mm = m_ - i - 1;
        return r + jj * mm - jj * (jj + 1) / 2 + (kk - jj - 1);
    }
    static int sort3(int idx[3]) {
        int sign = 1;
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < 2; ++i)
                if (idx[i] > idx[i + 1]) {
                    std::swap(idx[i], idx[i + 1]);
                    sign = -sign;
                }
        if (idx[0] == idx[1] || idx[1] == idx[2]) return 0;
        return sign;
    }

    int degree_;
    int m_;
    std::vector<Expr> comp_;
};

// Frame fields of the natural basis {Gamma, H_a, V_a}, their pairwise
// brackets, and the exterior derivative on coframe components. Brackets are
// computed from first principles as coordinate vector fields; the 2.1-style
// commutator table is a test of this machinery, not an input.
class FrameCalculus {
public:
    explicit FrameCalculus(const GeometryData& geo) : geo_(&geo), m_(2 * geo.n() + 1) {
        const Sode& s = geo.sode();
        const int n = s.n;
        // coordinate components: slot 0 = d/dt, 1..n = d/dx^a, n+1..2n = d/du^a
        fields_.assign(m_, std::vector<Expr>(m_, zero()));
        fields_[0][0] = one();
        for (int a = 0; a < n; ++a) {
            fields_[0][1 + a] = sym(s.vels[a]);
            fields_[0][1 + n + a] = s.F[a];
        }
        for (int a = 0; a < n; ++a) {
            fields_[1 + a][1 + a] = one();
            for (int b = 0; b < n; ++b) fields_[1 + a][1 + n + b] = neg(geo.Gamma(b, a));
        }
        for (int a = 0; a < n; ++a) fields_[1 + n + a][1 + n + a] = one();

        coord_names_.push_back("t");
        for (auto& c : s.coords) coord_names_.push_back(c);
        for (auto& v : s.vels) coord_names_.push_back(v);

        brackets_.assign(m_, std::vector<std::vector<Expr>>(m_));
        for (int i = 0; i < m_; ++i)
            for (int j = i + 1; j < m_; ++j) {
                std::vector<Expr> br(m_, zero());
                for (int k = 0; k < m_; ++k) {
                    std::vector<Expr> terms;
                    for (int l = 0; l < m_; ++l) {
                        terms.push_back(mul({fields_[i][l],
                                             differentiate(fields_[j][k], coord_names_[l])}));
                        terms.push_back(neg(mul(
                            {fields_[j][l], differentiate(fields_[i][k], coord_names_[l])})));
                    }
                    br[k] = add(std::move(terms));
                }
                brackets_[i][j] = to_frame(br);
            }
    }

    int dim() const { return m_; }

    // frame components of [E_i, E_j] for i < j
    const std::vector<Expr>& bracket(int i, int j) const { return brackets_[i][j]; }

    // express a coordinate vector field in the natural frame
    std::vector<Expr> to_frame(const std::vector<Expr>& w) const {
        const Sode& s = geo_->sode();
        const int n = s.n;
        std::vector<Expr> c(m_, zero());
        c[0] = w[0];
        for (int a = 0; a < n; ++a)
            c[1 + a] = sub(w[1 + a], mul({sym(s.vels[a]), w[0]}));
        for (int a = 0; a < n; ++a) {
            std::vector<Expr> terms{w[1 + n + a], neg(mul({s.F[a], w[0]}))};
            for (int b = 0; b < n; ++b)
                terms.push_back(mul({geo_->Gamma(a, b), c[1 + b]}));
            c[1 + n + a] = add(std::move(terms));
        }
        return c;
    }

    // d of a 1-form given in natural coframe components:
    //   d w (E_i, E_j) = E_i(w_j) - E_j(w_i) - w([E_i, E_j])
    CoframeForm exterior_derivative(const CoframeForm& w) const {
        if (w.degree() == 1) {
            CoframeForm out(2, m_);
            for (int i = 0; i < m_; ++i)
                for (int j = i + 1; j < m_; ++j) {
                    std::vector<Expr> terms{geo_->frame_derivative(w.at(j), i),
                                            neg(geo_->frame_derivative(w.at(i), j))};
                    for (int k = 0; k < m_; ++k)
                        terms.push_back(neg(mul({brackets_[i][j][k], w.at(k)})));
                    out.set(i, j, add(std::move(terms)));
                }
            return out;
        }
        if (w.degree() == 2) {
            CoframeForm out(3, m_);
            for (int i = 0; i < m_; ++i)
                for (int j = i + 1; j < m_; ++j)
                    for (int k = j + 1; k < m_; ++k) {
                        std::vector<Expr> terms{
                            geo_->frame_derivative(w.at(j, k), i),
                            neg(geo_->frame_derivative(w.at(i, k), j)),
                            geo_->frame_derivative(w.at(i, j), k)};
                        for (int l = 0; l < m_; ++l) {
                            terms.push_back(neg(mul({brackets_[i][j][l], w.at(l, k)})));
                            terms.push_back(mul({brackets_[i][k][l], w.at(l, j)}));
                            terms.push_back(neg(mul({brackets_[j][k][l], w.at(l, i)})));
                        }
                        out.set(i, j, k, add(std::move(terms)));
                    }
            return out;
        }
        throw std::invalid_argument("exterior derivative only for degree 1 and 2");
    }

    // d f as a natural-coframe 1-form
    CoframeForm differential(const Expr& f) const {
        CoframeForm out(1, m_);
        for (int i = 0; i < m_; ++i) out.set(i, geo_->frame_derivative(f, i));
        return out;
    }

private:
    const GeometryData* geo_;
    int m_;
    std::vector<std::string> coord_names_;
    std::vector<std::vector<Expr>> fields_;
    std::vector<std::vector<std::vector<Expr>>> brackets_;
};

// Rewrites a form's components from one frame basis to another. T maps new
// frame fields to old ones: E'_j = sum_i T[i][j] E_i. Components transform by
// evaluating the form on the transformed frame tuple.
inline CoframeForm transform_frame(const CoframeForm& w,
                                   const std::vector<std::vector<Expr>>& T) {
    const int m = w.dim();
    CoframeForm out(w.degree(), m);
    if (w.degree() == 1) {
        for (int i = 0; i < m; ++i) {
            std::vector<Expr> terms;
            for (int k = 0; k < m; ++k)
                if (!is_zero_node(T[k][i])) terms.push_back(mul({T[k][i], w.at(k)}));
            out.set(i, add(std::move(terms)));
        }
        return out;
    }
    if (w.degree() == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                std::vector<Expr> terms;
                for (int p = 0; p < m; ++p)
                    for (int q = p + 1; q < m; ++q) {
                        Expr det = sub(mul({T[p][i], T[q][j]}), mul({T[p][j], T[q][i]}));
                        if (is_zero_node(det)) continue;
                        terms.push_back(mul({w.at(p, q), det}));
                    }
                out.set(i, j, add(std::move(terms)));
            }
        return out;
    }
    if (w.degree() == 3) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k) {
                    std::vector<Expr> terms;
                    for (int p = 0; p < m; ++p)
                        for (int q = p + 1; q < m; ++q)
                            for (int r = q + 1; r < m; ++r) {
                                // 3x3 minor of T on rows (p,q,r), columns (i,j,k)
                                Expr det = add(
                                    {mul({T[p][i], sub(mul({T[q][j], T[r][k]}),
                                                       mul({T[q][k], T[r][j]}))}),
                                     neg(mul({T[p][j], sub(mul({T[q][i], T[r][k]}),
                                                           mul({T[q][k], T[r][i]}))})),
                                     mul({T[p][k], sub(mul({T[q][i], T[r][j]}),
                                                       mul({T[q][j], T[r][i]}))})});
                                if (is_zero_node(det)) continue;
                                terms.push_back(mul({w.at(p, q, r), det}));
                            }
                    out.set(i, j, k, add(std::move(terms)));
                }
        return out;
    }
    throw std::invalid_argument("unsupported form degree");
}

}  // namespace vicar

#endif
