#ifndef VICAR_EXPR_HPP
#define VICAR_EXPR_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vicar/rational.hpp"

namespace vicar {

// Immutable symbolic expression tree over coordinates and parameters.
//
// Canonical form maintained by the builder functions below:
//   - sums contain no nested sums, like terms are collected, at most one
//     leading rational constant;
//   - products contain no nested products, a single rational coefficient,
//     factors with equal bases merged by adding exponents, and products are
//     distributed over sums (expressions are kept expanded);
//   - exponents are exact rationals; sqrt(e) is stored as e^(1/2);
//   - zero and one have unique representations;
//   - terms and factors are stored in a fixed total order, so structural
//     equality of canonical forms is well defined.

enum class Kind { Num, Sym, Add, Mul, Pow, Fun };
enum class Fn { Exp, Ln, Sin, Cos };

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
public:
    Kind kind;
    Rational num;           // Kind::Num
    std::string sym;        // Kind::Sym
    std::vector<Expr> ops;  // Add/Mul operands; Pow base and Fun argument at ops[0]
    Rational expo;          // Kind::Pow
    Fn fn = Fn::Exp;        // Kind::Fun
};

inline const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Exp: return "exp";
        case Fn::Ln: return "ln";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Structural comparison (total order used for canonical sorting)

inline int cmp(const Expr& a, const Expr& b);

inline int cmp_rat(const Rational& a, const Rational& b) {
    if (a == b) return 0;
    return a < b ? -1 : 1;
}

inline int kind_rank(Kind k) {
    switch (k) {
        case Kind::Num: return 0;
        case Kind::Sym: return 1;
        case Kind::Fun: return 2;
        case Kind::Pow: return 3;
        case Kind::Add: return 4;
        case Kind::Mul: return 5;
    }
    return 6;
}

inline int cmp(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return 0;
    int ra = kind_rank(a->kind), rb = kind_rank(b->kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a->kind) {
        case Kind::Num:
            return cmp_rat(a->num, b->num);
        case Kind::Sym:
            return a->sym.compare(b->sym) < 0 ? -1 : (a->sym == b->sym ? 0 : 1);
        case Kind::Fun: {
            if (a->fn != b->fn) return (int)a->fn < (int)b->fn ? -1 : 1;
            return cmp(a->ops[0], b->ops[0]);
        }
        case Kind::Pow: {
            int c = cmp(a->ops[0], b->ops[0]);
            if (c != 0) return c;
            return cmp_rat(a->expo, b->expo);
        }
        case Kind::Add:
        case Kind::Mul: {
            size_t n = std::min(a->ops.size(), b->ops.size());
            for (size_t i = 0; i < n; ++i) {
                int c = cmp(a->ops[i], b->ops[i]);
                if (c != 0) return c;
            }
            if (a->ops.size() != b->ops.size())
                return a->ops.size() < b->ops.size() ? -1 : 1;
            return 0;
        }
    }
    return 0;
}

inline bool struct_eq(const Expr& a, const Expr& b) { return cmp(a, b) == 0; }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return cmp(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Builders

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& e);
Expr fun(Fn f, const Expr& arg);

inline Expr num(const Rational& r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Num;
    n->num = r;
    return n;
}
inline Expr num(long long v) { return num(Rational(v)); }

inline const Expr& zero() {
    static const Expr z = num(0);
    return z;
}
inline const Expr& one() {
    static const Expr o = num(1);
    return o;
}

inline Expr sym(const std::string& name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Sym;
    n->sym = name;
    return n;
}

inline bool is_num(const Expr& e) { return e->kind == Kind::Num; }
inline bool is_zero_node(const Expr& e) { return is_num(e) && e->num.is_zero(); }
inline bool is_one_node(const Expr& e) { return is_num(e) && e->num.is_one(); }

// Split a canonical term into (rational coefficient, remaining factor key).
inline std::pair<Rational, Expr> coeff_split(const Expr& e) {
    if (is_num(e)) return {e->num, one()};
    if (e->kind == Kind::Mul && is_num(e->ops[0])) {
        Rational c = e->ops[0]->num;
        if (e->ops.size() == 2) return {c, e->ops[1]};
        auto n = std::make_shared<ExprNode>();
        n->kind = Kind::Mul;
        n->ops.assign(e->ops.begin() + 1, e->ops.end());
        return {c, Expr(n)};
    }
    return {Rational(1), e};
}

// Split a canonical factor into (base, rational exponent).
inline std::pair<Expr, Rational> base_split(const Expr& e) {
    if (e->kind == Kind::Pow) return {e->ops[0], e->expo};
    return {e, Rational(1)};
}

namespace detail {

// Raw product node from a coefficient and sorted non-numeric factors.
inline Expr make_mul_raw(const Rational& coeff, std::vector<Expr> factors) {
    if (coeff.is_zero()) return zero();
    if (factors.empty()) return num(coeff);
    if (coeff.is_one() && factors.size() == 1) return factors[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Mul;
    if (!coeff.is_one()) n->ops.push_back(num(coeff));
    for (auto& f : factors) n->ops.push_back(std::move(f));
    if (n->ops.size() == 1) return n->ops[0];
    return n;
}

// Try to fold q^(p/r) into an exact rational. Returns nullptr when inexact.
inline Expr fold_num_pow(const Rational& base, const Rational& e) {
    if (base.is_zero()) {
        if (e.num() > 0) return zero();
        return nullptr;  // 0^0 and 0^negative stay symbolic; eval reports them
    }
    if (e.is_integer()) return num(base.ipow(e.num()));
    if (base.num() < 0) return nullptr;
    long long r = e.den();
    long long rn = integer_kth_root(base.num(), r);
    long long rd = integer_kth_root(base.den(), r);
    auto powr = [&](long long v) {
        __int128 p = 1;
        for (long long i = 0; i < r; ++i) p *= v;
        return p;
    };
    if (powr(rn) != base.num() || powr(rd) != base.den()) return nullptr;
    return num(Rational(rn, rd).ipow(e.num()));
}

}  // namespace detail

inline Expr pow(const Expr& base, const Rational& e) {
    if (e.is_zero()) return one();
    if (e.is_one()) return base;
    if (is_num(base)) {
        if (Expr folded = detail::fold_num_pow(base->num, e)) return folded;
        // unreduced numeric power, e.g. 2^(1/2)
        auto n = std::make_shared<ExprNode>();
        n->kind = Kind::Pow;
        n->ops = {base};
        n->expo = e;
        return n;
    }
    if (base->kind == Kind::Pow && e.is_integer()) {
        return pow(base->ops[0], base->expo * e);
    }
    if (base->kind == Kind::Mul) {
        if (e.is_integer()) {
            std::vector<Expr> fs;
            fs.reserve(base->ops.size());
            for (auto& f : base->ops) fs.push_back(pow(f, e));
            return mul(std::move(fs));
        }
        // pull a positive rational coefficient out of a fractional power
        auto [c, rest] = coeff_split(base);
        if (!c.is_one() && !c.is_negative()) {
            return mul({pow(num(c), e), pow(rest, e)});
        }
    }
    if (base->kind == Kind::Add) {
        if (e.is_integer()) {
            // sign-normalise the base so that X^k and (-X)^k collide
            auto [lead_c, lead_k] = coeff_split(base->ops[0]);
            (void)lead_k;
            if (lead_c.is_negative()) {
                std::vector<Expr> neg;
                neg.reserve(base->ops.size());
                for (auto& t : base->ops) neg.push_back(mul({num(-1), t}));
                Expr flipped = add(std::move(neg));
                Expr p = pow(flipped, e);
                return (e.num() % 2 == 0) ? p : mul({num(-1), p});
            }
            if (e.num() > 1 && e.num() <= 6) {
                Expr acc = base;
                for (long long i = 1; i < e.num(); ++i) acc = mul({acc, base});
                return acc;
            }
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->ops = {base};
    n->expo = e;
    return n;
}

inline Expr mul(std::vector<Expr> factors) {
    Rational coeff(1);
    std::map<Expr, Rational, ExprLess> bases;
    std::vector<Expr> add_factors;

    std::vector<Expr> work(std::move(factors));
    while (!work.empty()) {
        Expr f = std::move(work.back());
        work.pop_back();
        switch (f->kind) {
            case Kind::Num:
                coeff = coeff * f->num;
                if (coeff.is_zero()) return zero();
                break;
            case Kind::Mul:
                for (auto& g : f->ops) work.push_back(g);
                break;
            case Kind::Add:
                add_factors.push_back(std::move(f));
                break;
            default: {
                auto [b, ex] = base_split(f);
                bases[b] = bases[b] + ex;
                break;
            }
        }
    }

    std::vector<Expr> flat;
    bool reprocess = false;
    for (auto& [b, ex] : bases) {
        if (ex.is_zero()) continue;
        Expr p = pow(b, ex);
        // exponent merging can produce a numeric, a sum (e.g. X^(1/2)*X^(1/2)
        // with X a sum) or another product; route those back through
        if (p->kind == Kind::Num) {
            coeff = coeff * p->num;
            if (coeff.is_zero()) return zero();
        } else if (p->kind == Kind::Add) {
            add_factors.push_back(p);
        } else if (p->kind == Kind::Mul) {
            flat.push_back(p);
            reprocess = true;
        } else {
            flat.push_back(p);
        }
    }
    if (reprocess) {
        std::vector<Expr> again;
        again.reserve(flat.size() + add_factors.size() + 1);
        again.push_back(num(coeff));
        for (auto& f : flat) again.push_back(f);
        for (auto& f : add_factors) again.push_back(f);
        return mul(std::move(again));
    }

    if (add_factors.empty()) {
        std::sort(flat.begin(), flat.end(), ExprLess{});
        return detail::make_mul_raw(coeff, std::move(flat));
    }

    // distribute over sums: keep expressions expanded
    std::sort(flat.begin(), flat.end(), ExprLess{});
    Expr acc = detail::make_mul_raw(coeff, std::move(flat));
    for (auto& s : add_factors) {
        std::vector<Expr> terms;
        terms.reserve(s->ops.size());
        for (auto& t : s->ops) terms.push_back(mul({acc, t}));
        acc = add(std::move(terms));
        if (is_zero_node(acc)) return acc;
    }
    return acc;
}

inline Expr add(std::vector<Expr> terms) {
    Rational constant(0);
    std::map<Expr, Rational, ExprLess> coeffs;

    std::vector<Expr> work(std::move(terms));
    while (!work.empty()) {
        Expr t = std::move(work.back());
        work.pop_back();
        if (t->kind == Kind::Add) {
            for (auto& u : t->ops) work.push_back(u);
        } else if (t->kind == Kind::Num) {
            constant = constant + t->num;
        } else {
            auto [c, key] = coeff_split(t);
            if (is_one_node(key)) {
                constant = constant + c;
            } else {
                coeffs[key] = coeffs[key] + c;
            }
        }
    }

    std::vector<Expr> out;
    if (!constant.is_zero()) out.push_back(num(constant));
    for (auto& [key, c] : coeffs) {
        if (c.is_zero()) continue;
        if (c.is_one()) {
            out.push_back(key);
        } else if (key->kind == Kind::Mul) {
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::Mul;
            n->ops.push_back(num(c));
            for (auto& f : key->ops) n->ops.push_back(f);
            out.push_back(Expr(n));
        } else {
            out.push_back(detail::make_mul_raw(c, {key}));
        }
    }
    if (out.empty()) return zero();
    if (out.size() == 1) return out[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Add;
    n->ops = std::move(out);
    return n;
}

inline Expr fun(Fn f, const Expr& arg) {
    if (f == Fn::Exp && is_zero_node(arg)) return one();
    if (f == Fn::Ln && is_one_node(arg)) return zero();
    if (f == Fn::Sin && is_zero_node(arg)) return zero();
    if (f == Fn::Cos && is_zero_node(arg)) return one();
    if (f == Fn::Exp && arg->kind == Kind::Fun && arg->fn == Fn::Ln) return arg->ops[0];
    if (f == Fn::Ln && arg->kind == Kind::Fun && arg->fn == Fn::Exp) return arg->ops[0];
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Fun;
    n->fn = f;
    n->ops = {arg};
    return n;
}

// Convenience combinators
inline Expr neg(const Expr& e) { return mul({num(-1), e}); }
inline Expr sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
inline Expr div(const Expr& a, const Expr& b) { return mul({a, pow(b, Rational(-1))}); }
inline Expr sqrt_(const Expr& e) { return pow(e, Rational(1, 2)); }

// Re-canonicalise an arbitrary (already canonical-shaped) tree bottom-up.
inline Expr canon(const Expr& e) {
    switch (e->kind) {
        case Kind::Num:
        case Kind::Sym:
            return e;
        case Kind::Add: {
            std::vector<Expr> ts;
            ts.reserve(e->ops.size());
            for (auto& t : e->ops) ts.push_back(canon(t));
            return add(std::move(ts));
        }
        case Kind::Mul: {
            std::vector<Expr> fs;
            fs.reserve(e->ops.size());
            for (auto& f : e->ops) fs.push_back(canon(f));
            return mul(std::move(fs));
        }
        case Kind::Pow:
            return pow(canon(e->ops[0]), e->expo);
        case Kind::Fun:
            return fun(e->fn, canon(e->ops[0]));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Calculus

inline Expr differentiate(const Expr& e, const std::string& s) {
    switch (e->kind) {
        case Kind::Num:
            return zero();
        case Kind::Sym:
            return e->sym == s ? one() : zero();
        case Kind::Add: {
            std::vector<Expr> ds;
            ds.reserve(e->ops.size());
            for (auto& t : e->ops) ds.push_back(differentiate(t, s));
            return add(std::move(ds));
        }
        case Kind::Mul: {
            std::vector<Expr> terms;
            for (size_t i = 0; i < e->ops.size(); ++i) {
                std::vector<Expr> fs;
                for (size_t j = 0; j < e->ops.size(); ++j)
                    fs.push_back(j == i ? differentiate(e->ops[j], s) : e->ops[j]);
                terms.push_back(mul(std::move(fs)));
            }
            return add(std::move(terms));
        }
        case Kind::Pow: {
            Expr db = differentiate(e->ops[0], s);
            if (is_zero_node(db)) return zero();
            return mul({num(e->expo), pow(e->ops[0], e->expo - Rational(1)), db});
        }
        case Kind::Fun: {
            Expr da = differentiate(e->ops[0], s);
            if (is_zero_node(da)) return zero();
            Expr outer;
            switch (e->fn) {
                case Fn::Exp: outer = e; break;
                case Fn::Ln: outer = pow(e->ops[0], Rational(-1)); break;
                case Fn::Sin: outer = fun(Fn::Cos, e->ops[0]); break;
                case Fn::Cos: outer = neg(fun(Fn::Sin, e->ops[0])); break;
            }
            return mul({outer, da});
        }
    }
    return zero();
}

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    switch (e->kind) {
        case Kind::Num:
            return e;
        case Kind::Sym: {
            auto it = bindings.find(e->sym);
            return it == bindings.end() ? e : it->second;
        }
        case Kind::Add: {
            std::vector<Expr> ts;
            for (auto& t : e->ops) ts.push_back(substitute(t, bindings));
            return add(std::move(ts));
        }
        case Kind::Mul: {
            std::vector<Expr> fs;
            for (auto& f : e->ops) fs.push_back(substitute(f, bindings));
            return mul(std::move(fs));
        }
        case Kind::Pow:
            return pow(substitute(e->ops[0], bindings), e->expo);
        case Kind::Fun:
            return fun(e->fn, substitute(e->ops[0], bindings));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Numeric evaluation

class EvalDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluates e at the given point. When magnitude_out is non-null it receives
// max |v| over all subexpression values, used for relative zero tolerances.
inline double eval_numeric(const Expr& e, const std::map<std::string, double>& point,
                           double* magnitude_out = nullptr) {
    double v = 0;
    auto track = [&](double x) {
        if (magnitude_out && std::abs(x) > *magnitude_out) *magnitude_out = std::abs(x);
        return x;
    };
    switch (e->kind) {
        case Kind::Num:
            v = e->num.to_double();
            break;
        case Kind::Sym: {
            auto it = point.find(e->sym);
            if (it == point.end())
                throw EvalDomainError("no value for symbol '" + e->sym + "'");
            v = it->second;
            break;
        }
        case Kind::Add: {
            for (auto& t : e->ops) v += eval_numeric(t, point, magnitude_out);
            break;
        }
        case Kind::Mul: {
            v = 1;
            for (auto& f : e->ops) v *= eval_numeric(f, point, magnitude_out);
            break;
        }
        case Kind::Pow: {
            double b = eval_numeric(e->ops[0], point, magnitude_out);
            const Rational& ex = e->expo;
            if (b == 0 && ex.num() < 0)
                throw EvalDomainError("division by zero at sample point");
            if (b < 0 && !ex.is_integer())
                throw EvalDomainError("negative radicand at sample point");
            v = std::pow(b, ex.to_double());
            break;
        }
        case Kind::Fun: {
            double a = eval_numeric(e->ops[0], point, magnitude_out);
            switch (e->fn) {
                case Fn::Exp: v = std::exp(a); break;
                case Fn::Ln:
                    if (a <= 0) throw EvalDomainError("log of non-positive value");
                    v = std::log(a);
                    break;
                case Fn::Sin: v = std::sin(a); break;
                case Fn::Cos: v = std::cos(a); break;
            }
            break;
        }
    }
    if (!std::isfinite(v)) throw EvalDomainError("non-finite value at sample point");
    return track(v);
}

// ---------------------------------------------------------------------------
// Printing (round-trips through the parser)

inline std::string print(const Expr& e);

namespace detail {

inline std::string print_pow_exponent(const Rational& r) {
    if (r.is_integer() && !r.is_negative()) return "^" + r.str();
    return "^(" + r.str() + ")";
}

inline std::string print_factor(const Expr& e) {
    if (e->kind == Kind::Add || e->kind == Kind::Mul ||
        (e->kind == Kind::Num && (e->num.is_negative() || !e->num.is_integer())))
        return "(" + print(e) + ")";
    return print(e);
}

}  // namespace detail

inline std::string print(const Expr& e) {
    switch (e->kind) {
        case Kind::Num:
            return e->num.str();
        case Kind::Sym:
            return e->sym;
        case Kind::Fun:
            return std::string(fn_name(e->fn)) + "(" + print(e->ops[0]) + ")";
        case Kind::Pow:
            return detail::print_factor(e->ops[0]) + detail::print_pow_exponent(e->expo);
        case Kind::Mul: {
            auto [c, rest] = coeff_split(e);
            std::string out;
            Rational cc = c;
            if (cc.is_negative()) {
                out += "-";
                cc = -cc;
            }
            bool printed = false;
            if (!cc.is_one() || rest->kind == Kind::Num) {
                out += cc.is_integer() ? cc.str() : "(" + cc.str() + ")";
                printed = true;
            }
            if (rest->kind == Kind::Mul) {
                for (auto& f : rest->ops) {
                    if (printed) out += "*";
                    out += detail::print_factor(f);
                    printed = true;
                }
            } else if (!is_one_node(rest)) {
                if (printed) out += "*";
                out += detail::print_factor(rest);
            }
            return out;
        }
        case Kind::Add: {
            std::string out;
            bool first = true;
            for (const Expr& t : e->ops) {
                auto [c, rest] = coeff_split(t);
                if (!first && c.is_negative()) {
                    out += " - ";
                    std::vector<Expr> fs;
                    if (rest->kind == Kind::Mul)
                        fs.assign(rest->ops.begin(), rest->ops.end());
                    else if (!is_one_node(rest))
                        fs.push_back(rest);
                    out += print(detail::make_mul_raw(-c, std::move(fs)));
                } else {
                    if (!first) out += " + ";
                    out += print(t);
                }
                first = false;
            }
            return out;
        }
    }
    return "?";
}

}  // namespace vicar

#endif
