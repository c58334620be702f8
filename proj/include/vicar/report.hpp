#ifndef VICAR_REPORT_HPP
#define VICAR_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "vicar/classify.hpp"
#include "vicar/helmholtz.hpp"
#include "vicar/problem.hpp"

namespace vicar {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string pexpr(const Expr& e) { return print(canon(e)); }

inline Json expr_matrix(const std::vector<std::vector<Expr>>& m) {
    Json out = Json::array();
    for (auto& row : m) {
        Json r = Json::array();
        for (auto& e : row) r.push_back(pexpr(e));
        out.push_back(std::move(r));
    }
    return out;
}

inline Json expr_tensor3(const std::vector<std::vector<std::vector<Expr>>>& t) {
    Json out = Json::array();
    for (auto& m : t) out.push_back(expr_matrix(m));
    return out;
}

}  // namespace detail

inline Json geometry_report(const GeometryData& geo) {
    const int n = geo.n();
    std::vector<std::vector<Expr>> G(n, std::vector<Expr>(n)), P(n, std::vector<Expr>(n));
    std::vector<std::vector<std::vector<Expr>>> R(
        n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            G[a][b] = geo.Gamma(a, b);
            P[a][b] = geo.Phi(a, b);
            for (int d = 0; d < n; ++d) R[d][a][b] = geo.R(d, a, b);
        }
    Json out;
    out["Gamma"] = detail::expr_matrix(G);
    out["Phi"] = detail::expr_matrix(P);
    out["R"] = detail::expr_tensor3(R);
    return out;
}

inline Json eigen_report(const EigenData& eig) {
    Json out;
    Json lam = Json::array();
    for (auto& l : eig.lambda) lam.push_back(detail::pexpr(l));
    out["lambda"] = std::move(lam);
    out["X"] = detail::expr_matrix(eig.X);
    out["phi"] = detail::expr_matrix(eig.phi);
    return out;
}

inline Json structure_report(const StructureFunctions& sf) {
    Json out;
    out["tauGamma"] = detail::expr_matrix(sf.tauGamma);
    out["tauV"] = detail::expr_tensor3(sf.tauV);
    out["tauH"] = detail::expr_tensor3(sf.tauH);
    out["C"] = detail::expr_tensor3(sf.curv);
    out["unresolved_checks"] = sf.inconclusive;
    return out;
}

inline Json classification_report(const ClassificationReport& rep) {
    Json out;
    out["case"] = rep.case_label;
    out["q"] = rep.q;
    if (rep.rank_a1 >= 0)
        out["rank_a1"] = rep.rank_a1;
    else
        out["rank_a1"] = nullptr;
    if (rep.h2)
        out["h2"] = detail::pexpr(*rep.h2);
    else
        out["h2"] = nullptr;
    Json conds = Json::array();
    for (auto& c : rep.conditions) {
        Json jc;
        jc["id"] = c.id;
        jc["description"] = c.description;
        jc["verdict"] = verdict_name(c.verdict);
        jc["witness"] = c.witness;
        conds.push_back(std::move(jc));
    }
    out["conditions"] = std::move(conds);
    if (!rep.generality.text.empty()) {
        out["generality"] = {{"s1", rep.generality.s1},
                             {"s2", rep.generality.s2},
                             {"t", rep.generality.t},
                             {"text", rep.generality.text}};
    } else {
        out["generality"] = nullptr;
    }
    out["verdict"] = verdict_text(rep.verdict);
    out["caveats"] = rep.caveats;
    Json relabel = Json::array();
    for (int i : rep.relabel) relabel.push_back(i + 1);
    out["relabel"] = std::move(relabel);
    Json integ = Json::array();
    for (auto v : rep.integrable) integ.push_back(verdict_name(v));
    out["integrable"] = std::move(integ);
    return out;
}

inline Json helmholtz_report(const HelmholtzCheck& hc) {
    Json out = Json::array();
    for (auto& item : hc.items) {
        Json ji;
        ji["name"] = item.name;
        ji["verdict"] = verdict_name(item.verdict);
        ji["witness"] = item.witness;
        out.push_back(std::move(ji));
    }
    return out;
}

inline Json closed_form_report(const ClosedFormCheck& cc) {
    Json out;
    out["closed"] = verdict_name(cc.closed);
    out["maximal_rank"] = verdict_name(cc.maximal_rank);
    out["witness"] = cc.witness;
    return out;
}

inline Json pfaffian_report(const PfaffianCheck& pc) {
    Json out;
    out["verdict"] = verdict_name(pc.verdict);
    out["witnesses"] = pc.witnesses;
    Json P = Json::array(), Q = Json::array();
    for (auto& e : pc.P) P.push_back(detail::pexpr(e));
    for (auto& e : pc.Q) Q.push_back(detail::pexpr(e));
    out["P"] = std::move(P);
    out["Q"] = std::move(Q);
    return out;
}

inline Json report_skeleton(const Problem& problem) {
    Json out;
    out["tool"] = {{"name", "vicar"}, {"version", kToolVersion}};
    out["problem"] = {{"name", problem.name}, {"n", problem.sode.n}};
    out["seed"] = problem.sode.seed;
    out["samples"] = problem.sode.samples;
    out["geometry"] = nullptr;
    out["eigen"] = nullptr;
    out["structure_functions"] = nullptr;
    out["classification"] = nullptr;
    out["helmholtz"] = nullptr;
    out["caveats"] = Json::array();
    return out;
}

}  // namespace vicar

#endif
