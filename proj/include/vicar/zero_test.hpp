#ifndef VICAR_ZERO_TEST_HPP
#define VICAR_ZERO_TEST_HPP

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vicar/expr.hpp"

namespace vicar {

// Closed sampling box, one finite interval per symbol.
struct DomainBox {
    struct Interval {
        double lo, hi;
    };
    // insertion order is kept so that sampling is reproducible
    std::vector<std::pair<std::string, Interval>> intervals;

    void set(const std::string& name, double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("box interval needs lo < hi for " + name);
        for (auto& [n, iv] : intervals) {
            if (n == name) {
                iv = {lo, hi};
                return;
            }
        }
        intervals.push_back({name, {lo, hi}});
    }

    bool has(const std::string& name) const {
        for (auto& [n, iv] : intervals)
            if (n == name) return true;
        return false;
    }
};

enum class Verdict { Zero, NonZero, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Zero: return "Zero";
        case Verdict::NonZero: return "NonZero";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct ZeroResult {
    Verdict verdict = Verdict::Inconclusive;
    std::string path;     // "structural", "rewrite" or "numeric"
    double max_abs = 0;   // largest |e| seen over the sample points
    std::map<std::string, double> witness_point;  // point achieving max_abs
};

// Randomised zero-equivalence tester. Structural check first, then a
// re-canonicalisation pass, then numeric probing at N seeded points of the
// box with tolerance atol = 1e-9 * (1 + max |subterm|) per point. Verdicts:
// all |e| < atol -> Zero, some |e| > 10*atol -> NonZero, else Inconclusive.
class ZeroTester {
public:
    ZeroTester(DomainBox box, unsigned long long seed = 0, int samples = 16)
        : box_(std::move(box)), seed_(seed), samples_(samples) {}

    const DomainBox& box() const { return box_; }
    unsigned long long seed() const { return seed_; }
    int samples() const { return samples_; }

    std::vector<std::map<std::string, double>> sample_points() const {
        std::mt19937_64 rng(seed_);
        std::vector<std::map<std::string, double>> pts;
        pts.reserve(samples_);
        for (int i = 0; i < samples_; ++i) {
            std::map<std::string, double> p;
            for (auto& [name, iv] : box_.intervals) {
                std::uniform_real_distribution<double> dist(iv.lo, iv.hi);
                p[name] = dist(rng);
            }
            pts.push_back(std::move(p));
        }
        return pts;
    }

    ZeroResult test(const Expr& e) const {
        ZeroResult res;
        if (is_zero_node(e)) {
            res.verdict = Verdict::Zero;
            res.path = "structural";
            return res;
        }
        Expr again = canon(e);
        if (is_zero_node(again)) {
            res.verdict = Verdict::Zero;
            res.path = "rewrite";
            return res;
        }

        res.path = "numeric";
        bool all_small = true;
        int evaluated = 0;
        for (auto& p : sample_points()) {
            double mag = 0, v;
            try {
                v = eval_numeric(again, p, &mag);
            } catch (const EvalDomainError&) {
                continue;  // point outside the expression's domain, skip it
            }
            ++evaluated;
            double atol = 1e-9 * (1 + mag);
            double av = v < 0 ? -v : v;
            if (av > res.max_abs) {
                res.max_abs = av;
                res.witness_point = p;
            }
            if (av > 10 * atol) {
                res.verdict = Verdict::NonZero;
                return res;
            }
            if (av >= atol) all_small = false;
        }
        if (evaluated == 0) {
            res.verdict = Verdict::Inconclusive;
            return res;
        }
        res.verdict = all_small ? Verdict::Zero : Verdict::Inconclusive;
        return res;
    }

    Verdict is_zero(const Expr& e) const { return test(e).verdict; }

private:
    DomainBox box_;
    unsigned long long seed_;
    int samples_;
};

}  // namespace vicar

#endif
