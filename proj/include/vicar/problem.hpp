#ifndef VICAR_PROBLEM_HPP
#define VICAR_PROBLEM_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vicar/eigenframe.hpp"
#include "vicar/parser.hpp"
#include "vicar/sode.hpp"

namespace vicar {

class ProblemError : public std::runtime_error {
public:
    ProblemError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg) {}
};

// Plain key-value problem file. One `key = value` pair per line, `#` starts a
// comment, comma-separated lists for arrays; expressions never contain commas.
//
//   name    = example2
//   n       = 3
//   coords  = x, y, z
//   vels    = u, v, w
//   F       = z*t, 0, x
//   box.t   = 1, 4
//   guard   = t
//   seed    = 0
//   samples = 16
//   eigen.lambda = sqrt(t), -sqrt(t), 0
//   eigen.X.1    = -sqrt(t), 0, 1
//   multiplier.g.1 = 0, 0, -1/2
//   cartan.r       = sqrt(t), -sqrt(t), 1
//   pfaffian.r1t   = sqrt(t)
//   pfaffian.r.3   = 1
struct Problem {
    std::string name;
    Sode sode;
    std::optional<EigenData> eigen;  // lambda and X only; phi filled on resolve
    std::optional<std::vector<std::vector<Expr>>> multiplier;
    std::optional<std::vector<Expr>> cartan_r;  // diagonal r, user eigen labels
    std::optional<Expr> pfaffian_r1t;
    std::map<int, Expr> pfaffian_r;  // user label (0-based) -> candidate
    bool assert_nondiagonalizable = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

}  // namespace detail

inline Problem parse_problem(std::istream& in) {
    using detail::split_list;
    using detail::trim;

    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::vector<std::pair<std::string, int>> guards;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ProblemError("expected `key = value`", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ProblemError("empty key", lineno);
        if (key == "guard") {
            guards.push_back({val, lineno});
            continue;
        }
        if (kv.count(key)) throw ProblemError("duplicate key `" + key + "`", lineno);
        kv[key] = {val, lineno};
    }

    auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        auto v = it->second;
        kv.erase(it);
        return v;
    };
    auto require = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw ProblemError("missing required key `" + key + "`");
        return *v;
    };

    Problem p;
    if (auto v = take("name")) p.name = v->first;

    {
        auto [val, ln] = require("n");
        try {
            p.sode.n = std::stoi(val);
        } catch (...) {
            throw ProblemError("n must be an integer", ln);
        }
        if (p.sode.n < 1) throw ProblemError("n must be >= 1", ln);
    }
    const int n = p.sode.n;

    auto name_list = [&](const std::string& key) {
        auto [val, ln] = require(key);
        auto items = split_list(val);
        if ((int)items.size() != n)
            throw ProblemError(key + " must list exactly " + std::to_string(n) + " names", ln);
        for (auto& s : items)
            if (s.empty() || s == "t")
                throw ProblemError("invalid name in " + key + ": `" + s + "`", ln);
        return items;
    };
    p.sode.coords = name_list("coords");
    p.sode.vels = name_list("vels");
    auto symbols = p.sode.symbol_set();
    if ((int)symbols.size() != 2 * n + 1)
        throw ProblemError("coordinate and velocity names must be pairwise distinct");

    auto parse_in_context = [&](const std::string& src, int ln) -> Expr {
        try {
            return parse_expr(src, symbols);
        } catch (const ParseError& e) {
            throw ProblemError("in `" + src + "`: " + e.what(), ln);
        }
    };
    auto expr_list = [&](const std::string& key) {
        auto [val, ln] = require(key);
        auto items = split_list(val);
        if ((int)items.size() != n)
            throw ProblemError(key + " must list exactly " + std::to_string(n) + " expressions",
                               ln);
        std::vector<Expr> out;
        for (auto& s : items) out.push_back(parse_in_context(s, ln));
        return out;
    };
    p.sode.F = expr_list("F");

    for (auto& s : symbols) {
        auto v = take("box." + s);
        if (!v) throw ProblemError("missing sampling interval `box." + s + "`");
        auto ends = split_list(v->first);
        double lo, hi;
        try {
            if (ends.size() != 2) throw 0;
            lo = std::stod(ends[0]);
            hi = std::stod(ends[1]);
        } catch (...) {
            throw ProblemError("box." + s + " must be `lo, hi`", v->second);
        }
        if (!(lo < hi)) throw ProblemError("box." + s + " needs lo < hi", v->second);
        p.sode.box.set(s, lo, hi);
    }

    for (auto& [src, ln] : guards) p.sode.guards.push_back(parse_in_context(src, ln));

    if (auto v = take("seed")) {
        try {
            p.sode.seed = std::stoull(v->first);
        } catch (...) {
            throw ProblemError("seed must be a non-negative integer", v->second);
        }
    }
    if (auto v = take("samples")) {
        try {
            p.sode.samples = std::stoi(v->first);
        } catch (...) {
            throw ProblemError("samples must be an integer", v->second);
        }
        if (p.sode.samples < 1) throw ProblemError("samples must be >= 1", v->second);
    }
    if (auto v = take("assert_nondiagonalizable"))
        p.assert_nondiagonalizable = v->first == "true" || v->first == "1";

    if (kv.count("eigen.lambda")) {
        EigenData eig;
        eig.lambda = expr_list("eigen.lambda");
        for (int a = 0; a < n; ++a)
            eig.X.push_back(expr_list("eigen.X." + std::to_string(a + 1)));
        p.eigen = std::move(eig);
    }

    if (kv.count("multiplier.g.1")) {
        std::vector<std::vector<Expr>> g;
        for (int a = 0; a < n; ++a)
            g.push_back(expr_list("multiplier.g." + std::to_string(a + 1)));
        p.multiplier = std::move(g);
    }

    if (kv.count("cartan.r")) p.cartan_r = expr_list("cartan.r");
    if (auto v = take("pfaffian.r1t")) p.pfaffian_r1t = parse_in_context(v->first, v->second);
    for (int a = 0; a < n; ++a)
        if (auto v = take("pfaffian.r." + std::to_string(a + 1)))
            p.pfaffian_r[a] = parse_in_context(v->first, v->second);

    if (!kv.empty())
        throw ProblemError("unknown key `" + kv.begin()->first + "`", kv.begin()->second.second);

    // guards must actually hold on the box, otherwise sampling is unsound
    ZeroTester tester = p.sode.tester();
    for (auto& g : p.sode.guards)
        for (auto& pt : tester.sample_points()) {
            try {
                if (eval_numeric(g, pt) <= 0)
                    throw ProblemError("guard `" + print(g) + "` is not positive on the box");
            } catch (const EvalDomainError&) {
                throw ProblemError("guard `" + print(g) + "` is undefined on the box");
            }
        }
    return p;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open `" + path + "`");
    return parse_problem(in);
}

}  // namespace vicar

#endif
