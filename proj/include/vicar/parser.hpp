#ifndef VICAR_PARSER_HPP
#define VICAR_PARSER_HPP

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>

#include "vicar/expr.hpp"

namespace vicar {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    size_t position;
};

// Recursive-descent parser for the expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] base ('^' rational)?
//   base   := number | identifier | '(' expr ')' | func '(' expr ')'
//   func   := sqrt | exp | ln | sin | cos
//   number := integer | integer '/' integer
// Identifiers must be declared up front; floating-point literals are
// rejected (constants are exact rationals).
class Parser {
public:
    Parser(const std::string& src, const std::set<std::string>& symbols)
        : src_(src), symbols_(symbols) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                e = add({e, parse_term()});
            } else if (accept('-')) {
                e = sub(e, parse_term());
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                e = mul({e, parse_factor()});
            } else if (accept('/')) {
                e = div(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        skip_ws();
        if (accept('-')) return neg(parse_factor());
        Expr b = parse_base();
        skip_ws();
        if (accept('^')) return pow(b, parse_exponent());
        return b;
    }

    Rational parse_exponent() {
        skip_ws();
        bool parens = accept('(');
        skip_ws();
        bool negative = accept('-');
        Rational r = parse_rational();
        if (negative) r = -r;
        if (parens) {
            skip_ws();
            expect(')');
        }
        return r;
    }

    Expr parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (std::isdigit((unsigned char)c)) return num(parse_rational());
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            skip_ws();
            expect(')');
            return e;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = pos_;
            std::string name = parse_identifier();
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '(') {
                ++pos_;
                Expr arg = parse_expr();
                skip_ws();
                expect(')');
                if (name == "sqrt") return sqrt_(arg);
                if (name == "exp") return fun(Fn::Exp, arg);
                if (name == "ln") return fun(Fn::Ln, arg);
                if (name == "sin") return fun(Fn::Sin, arg);
                if (name == "cos") return fun(Fn::Cos, arg);
                throw ParseError("unknown function '" + name + "'", start);
            }
            if (!symbols_.count(name))
                throw ParseError("unknown identifier '" + name + "'", start);
            return sym(name);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Rational parse_rational() {
        long long n = parse_integer();
        size_t save = pos_;
        skip_ws();
        if (accept('/')) {
            skip_ws();
            if (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_]))
                return Rational(n, parse_integer());
            pos_ = save;  // it was a division by a non-literal, not a rational
        } else {
            pos_ = save;
        }
        return Rational(n);
    }

    long long parse_integer() {
        skip_ws();
        size_t start = pos_;
        if (pos_ >= src_.size() || !std::isdigit((unsigned char)src_[pos_]))
            throw ParseError("expected integer", pos_);
        long long v = 0;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
            v = v * 10 + (src_[pos_] - '0');
            if (v < 0) throw ParseError("integer literal too large", start);
            ++pos_;
        }
        if (pos_ < src_.size() && src_[pos_] == '.')
            throw ParseError("floating-point literals are not allowed; write a rational like 1/2", pos_);
        return v;
    }

    std::string parse_identifier() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
            ++pos_;
        return src_.substr(start, pos_ - start);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    }
    bool accept(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    std::string src_;
    std::set<std::string> symbols_;
    size_t pos_ = 0;
};

inline Expr parse_expr(const std::string& src, const std::set<std::string>& symbols) {
    return Parser(src, symbols).parse();
}

}  // namespace vicar

#endif
