#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "allocopt/binomial.hpp"
#include "allocopt/memory_limited.hpp"
#include "allocopt/multi_object.hpp"
#include "allocopt/oracle.hpp"
#include "allocopt/relaxation.hpp"

// JSON views of the solver types. Every emitted double is rounded to 12
// significant digits so reruns are byte-identical across platforms.

namespace allocopt {

inline double round_sig12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

namespace detail {

inline nlohmann::json rounded(double x) { return round_sig12(x); }

inline nlohmann::json rounded(const std::vector<double>& xs) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : xs) arr.push_back(round_sig12(x));
    return arr;
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const SystemParams& p) {
    j = {{"num_nodes", p.num_nodes},
         {"access_prob", detail::rounded(p.access_prob)},
         {"budget", detail::rounded(p.budget)}};
}

inline void to_json(nlohmann::json& j, const Allocation& a) {
    j = detail::rounded(a.amounts);
}

inline void to_json(nlohmann::json& j, const SuccessEstimate& e) {
    j = {{"value", detail::rounded(e.value)},
         {"method", to_string(e.method)},
         {"ci_halfwidth", detail::rounded(e.ci_halfwidth)},
         {"trials", e.trials}};
}

inline void to_json(nlohmann::json& j, const SolveOutcome& o) {
    j = {{"case", to_string(o.case_label)},
         {"n_star", o.n_star},
         {"tie_set", o.tie_set},
         {"allocation", o.allocation},
         {"success_prob", detail::rounded(o.success_prob)},
         {"family", to_string(o.family)}};
}

inline void to_json(nlohmann::json& j, const ConstantProfileOutcome& o) {
    to_json(j, static_cast<const SolveOutcome&>(o));
    j["p0"] = o.p0 ? nlohmann::json(detail::rounded(*o.p0)) : nlohmann::json(nullptr);
    j["p0_method"] = o.p0 ? to_string(o.p0_method) : "";
    j["candidate_set_M"] = o.candidate_set_M;
    j["L0"] = o.L0;
    j["n_min"] = o.n_min;
}

inline void to_json(nlohmann::json& j, const ArbitraryProfileOutcome& o) {
    to_json(j, static_cast<const SolveOutcome&>(o));
    j["n_min"] = o.n_min;
    j["L0"] = o.L0;
    j["n_max"] = o.n_max;
    j["L_max"] = o.L_max;
    j["cond_flmin"] = o.cond_flmin;
    j["cond_anmax"] = o.cond_anmax;
    j["delegated_unlimited"] = o.delegated_unlimited;
    j["constant_profile"] = o.constant_profile;
}

inline void to_json(nlohmann::json& j, const DisparityReport::Mismatch& m) {
    j = {{"p", detail::rounded(m.p)},
         {"T", detail::rounded(m.T)},
         {"n_p1", m.n_p1},
         {"n_p2", m.n_p2}};
}

inline void to_json(nlohmann::json& j, const DisparityReport& r) {
    j = {{"alpha", detail::rounded(r.alpha)},
         {"beta", detail::rounded(r.beta)},
         {"grid_points_total", r.grid_points_total},
         {"grid_points_pT_gt_1", r.grid_points_pT_gt_1},
         {"mismatches", r.mismatches}};
}

inline void to_json(nlohmann::json& j, const GridSearchResult& r) {
    j = {{"best_alloc", r.best_alloc},
         {"best_score", detail::rounded(r.best_score)},
         {"evaluated", r.evaluated},
         {"runner_up_gap", detail::rounded(r.runner_up_gap)}};
}

inline void to_json(nlohmann::json& j, const ConjectureReport& r) {
    j = {{"solver", r.solver},
         {"grid", r.grid},
         {"gap_abs", detail::rounded(r.gap_abs)},
         {"gap_rel", detail::rounded(r.gap_rel)}};
}

inline void to_json(nlohmann::json& j, const ObjectResult& r) {
    j = {{"allocation", r.allocation},
         {"success", detail::rounded(r.success)},
         {"case", to_string(r.case_label)},
         {"family", to_string(r.family)},
         {"n_star", r.n_star},
         {"sub_unit", r.sub_unit}};
}

inline void to_json(nlohmann::json& j, const TwoObjectOutcome& o) {
    j = {{"object1", o.object1},
         {"object2", o.object2},
         {"first_solved", o.first_solved},
         {"weighted_success", detail::rounded(o.weighted_success)}};
}

inline void to_json(nlohmann::json& j, const TwoObjectExhaustive& e) {
    nlohmann::json scores = nlohmann::json::array();
    for (double s : e.strategy_scores)
        scores.push_back(std::isnan(s) ? nlohmann::json(nullptr)
                                       : nlohmann::json(round_sig12(s)));
    j = {{"strategy_scores", scores},
         {"greedy_score", detail::rounded(e.greedy_score)},
         {"oracle_score", detail::rounded(e.oracle_score)},
         {"gap", detail::rounded(e.gap)},
         {"joint_best1", detail::rounded(e.joint_best1)},
         {"joint_best2", detail::rounded(e.joint_best2)},
         {"pairs_evaluated", e.pairs_evaluated}};
}

}  // namespace allocopt
