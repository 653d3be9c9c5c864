#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "allocopt/binomial.hpp"
#include "allocopt/errors.hpp"
#include "allocopt/numeric.hpp"
#include "allocopt/parallel.hpp"

// Gaussian relaxation of the symmetric-allocation objective and the
// closed-form case solver built on it, plus the exact argmax it approximates
// and the grid scan that measures how often the two agree.

namespace allocopt {

enum class SolveCase {
    case1,
    case2,
    case3,
    case4,
    case5,
    case1a,
    case1b,
    tie_set,
    infeasible,
};

inline const char* to_string(SolveCase c) {
    switch (c) {
        case SolveCase::case1: return "Case1";
        case SolveCase::case2: return "Case2";
        case SolveCase::case3: return "Case3";
        case SolveCase::case4: return "Case4";
        case SolveCase::case5: return "Case5";
        case SolveCase::case1a: return "Case1a";
        case SolveCase::case1b: return "Case1b";
        case SolveCase::tie_set: return "TieSet";
        case SolveCase::infeasible: return "Infeasible";
    }
    return "?";
}

enum class AllocFamily { symmetric, quasi_symmetric, flmin, anmax, explicit_values };

inline const char* to_string(AllocFamily f) {
    switch (f) {
        case AllocFamily::symmetric: return "symmetric";
        case AllocFamily::quasi_symmetric: return "quasi-symmetric";
        case AllocFamily::flmin: return "flmin";
        case AllocFamily::anmax: return "anmax";
        case AllocFamily::explicit_values: return "explicit";
    }
    return "?";
}

struct SolveOutcome {
    SolveCase case_label = SolveCase::infeasible;
    long n_star = 0;            // representative support size (smallest on ties)
    std::vector<long> tie_set;  // populated only when the optimum is a set
    Allocation allocation;      // materialized representative
    double success_prob = 0.0;  // exact or closed-form score of `allocation`
    AllocFamily family = AllocFamily::symmetric;
};

struct CandidateSet {
    long L = 0;                // floor(N / T)
    std::vector<long> values;  // {floor(kT) : 1 <= k <= L} U {N}, ascending
};

// Upper tail of the standard normal.
inline double q_function(double x) { return 0.5 * std::erfc(x * 0.7071067811865476); }

// Gaussian relaxation of symmetric_success at real-valued support n.
inline double relaxed_objective(double n, const SystemParams& params) {
    params.validate();
    const double p = params.access_prob;
    if (!(p > 0.0 && p < 1.0))
        throw degenerate_error("relaxed_objective: requires 0 < p < 1");
    if (!(n > 0.0)) throw domain_error("relaxed_objective: n must be positive");
    const double need = double(ceil_snapped(n / params.budget));
    const double mu = n * p;
    const double sigma = std::sqrt(n * p * (1.0 - p));
    return q_function((need - mu) / sigma);
}

// Support sizes worth considering: floor(kT) for k = 1..floor(N/T), plus N.
// Below one unit of budget no allocation can ever cover the object.
inline CandidateSet candidate_set(const SystemParams& params) {
    params.validate();
    if (definitely_greater(1.0, params.budget))
        throw infeasible_error("candidate_set: budget below one object");
    CandidateSet out;
    out.L = floor_snapped(double(params.num_nodes) / params.budget);
    for (long k = 1; k <= out.L; ++k) {
        const long v = floor_snapped(double(k) * params.budget);
        if (v >= 1) out.values.push_back(v);
    }
    out.values.push_back(params.num_nodes);
    std::sort(out.values.begin(), out.values.end());
    out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
    return out;
}

// Symmetric allocation with support n on the first n of N nodes.
inline Allocation make_symmetric_alloc(long N, long n, double T) {
    if (n < 1 || n > N) throw domain_error("make_symmetric_alloc: need 1 <= n <= N");
    Allocation a;
    a.amounts.assign(std::size_t(N), 0.0);
    for (long i = 0; i < n; ++i) a.amounts[std::size_t(i)] = T / double(n);
    return a;
}

namespace detail {

// Case classification of the relaxed problem for p with pT > 1.
inline SolveCase classify_above_one(const SystemParams& params, long L) {
    const double N = double(params.num_nodes);
    const double p = params.access_prob;
    if (L < 1) return SolveCase::case4;  // budget exceeds N: every node can hold a unit
    const double lt = double(L) * params.budget;
    const double d1 = N - std::sqrt(lt);
    const double d2 = N * std::sqrt(lt) - std::sqrt(params.budget);
    if (!(d1 > 0.0) || !(d2 > 0.0)) return SolveCase::case4;
    const double lower = double(L + 1) / N;
    const double upper = double(L + 1) / d1 + 1.0 / d2;
    if (p < lower) return SolveCase::case3;
    if (p <= upper) return SolveCase::case4;  // closed on both ends; boundary goes to Case 4
    return SolveCase::case5;
}

}  // namespace detail

// Closed-form solver for the relaxed problem. The pT = 1 band (within the
// snap tolerance) yields the tie set of all candidates except N.
inline SolveOutcome solve_p2(const SystemParams& params) {
    params.validate();
    const double p = params.access_prob;
    if (!(p > 0.0 && p < 1.0)) throw degenerate_error("solve_p2: requires 0 < p < 1");
    const CandidateSet cand = candidate_set(params);
    const long N = params.num_nodes;
    const double pT = p * params.budget;

    SolveOutcome out;
    out.family = AllocFamily::symmetric;
    if (nearly_equal(pT, 1.0)) {
        out.case_label = SolveCase::case2;
        for (long v : cand.values)
            if (v != N) out.tie_set.push_back(v);
        if (out.tie_set.empty()) out.tie_set.push_back(N);
        out.n_star = out.tie_set.front();
    } else if (pT < 1.0) {
        out.case_label = SolveCase::case1;
        out.n_star = std::min(floor_snapped(params.budget), N);
    } else {
        out.case_label = detail::classify_above_one(params, cand.L);
        const long spread = cand.L >= 1 ? floor_snapped(double(cand.L) * params.budget) : N;
        out.n_star = out.case_label == SolveCase::case4 ? N : spread;
    }
    out.allocation = make_symmetric_alloc(N, out.n_star, params.budget);
    out.success_prob = symmetric_success(out.n_star, params);
    return out;
}

enum class SearchMode { candidate_set, full_range };

// Exact argmax of the symmetric objective, either over the candidate set or
// over every support size. Ties resolve to the smallest n.
inline SolveOutcome solve_p1(const SystemParams& params, SearchMode mode) {
    params.validate();
    if (!(params.access_prob > 0.0 && params.access_prob < 1.0))
        throw degenerate_error("solve_p1: requires 0 < p < 1");
    std::vector<long> ns;
    if (mode == SearchMode::candidate_set) {
        ns = candidate_set(params).values;
    } else {
        if (definitely_greater(1.0, params.budget))
            throw infeasible_error("solve_p1: budget below one object");
        ns.resize(std::size_t(params.num_nodes));
        std::iota(ns.begin(), ns.end(), 1L);
    }
    long best_n = ns.front();
    double best = -1.0;
    for (long n : ns) {
        const double v = symmetric_success(n, params);
        if (v > best) {
            best = v;
            best_n = n;
        }
    }
    SolveOutcome out;
    // Label with the regime classification of the relaxed solver for context.
    const double pT = params.access_prob * params.budget;
    if (nearly_equal(pT, 1.0))
        out.case_label = SolveCase::case2;
    else if (pT < 1.0)
        out.case_label = SolveCase::case1;
    else
        out.case_label = detail::classify_above_one(params, candidate_set(params).L);
    out.n_star = best_n;
    out.allocation = make_symmetric_alloc(params.num_nodes, best_n, params.budget);
    out.success_prob = best;
    out.family = AllocFamily::symmetric;
    return out;
}

struct DisparityReport {
    double alpha = 0.0;  // agreement over the whole grid
    double beta = 0.0;   // agreement restricted to pT > 1
    std::uint64_t grid_points_total = 0;
    std::uint64_t grid_points_pT_gt_1 = 0;
    struct Mismatch {
        double p = 0.0;
        double T = 0.0;
        long n_p1 = 0;
        long n_p2 = 0;  // representative (smallest of a tie set)
    };
    std::vector<Mismatch> mismatches;
};

// Whether the exact argmax lies in a solver outcome's solution set (the tie
// set when one is populated, the single n* otherwise).
inline bool solutions_agree(long n_p1, const SolveOutcome& p2) {
    if (!p2.tie_set.empty())
        return std::find(p2.tie_set.begin(), p2.tie_set.end(), n_p1) != p2.tie_set.end();
    return n_p1 == p2.n_star;
}

// Solution set of the relaxed problem over the candidate supports, as a
// numeric tie set: every candidate whose relaxed objective is within tol of
// the best. Grid agreement needs value ties honored, not just the analytic
// representative; exact float equality on a grid is meaningless, so the same
// absolute tolerance used for the pT = 1 band detection is the default here.
// Inside that band the analytic tie set of solve_p2 is returned instead, so
// both solvers share one convention there.
inline std::vector<long> relaxed_solution_set(const SystemParams& params, double tol = 1e-9) {
    params.validate();
    if (!(params.access_prob > 0.0 && params.access_prob < 1.0))
        throw degenerate_error("relaxed_solution_set: requires 0 < p < 1");
    const CandidateSet cand = candidate_set(params);
    if (nearly_equal(params.access_prob * params.budget, 1.0)) {
        std::vector<long> tie;
        for (long v : cand.values)
            if (v != params.num_nodes) tie.push_back(v);
        if (tie.empty()) tie.push_back(params.num_nodes);
        return tie;
    }
    std::vector<double> q(cand.values.size());
    double best = -1.0;
    for (std::size_t i = 0; i < cand.values.size(); ++i) {
        q[i] = relaxed_objective(double(cand.values[i]), params);
        best = std::max(best, q[i]);
    }
    std::vector<long> out;
    for (std::size_t i = 0; i < cand.values.size(); ++i)
        if (q[i] >= best - tol) out.push_back(cand.values[i]);
    return out;
}

// Grid scan of exact-vs-relaxed agreement. p runs over multiples of p_step in
// (0, 1); T over multiples of t_step in [1, N]. A point agrees when the exact
// candidate-restricted argmax lies in relaxed_solution_set. Rows are evaluated
// independently (optionally in parallel) and folded in a fixed order, so the
// report does not depend on the thread count.
inline DisparityReport disparity_scan(long num_nodes, double p_step, double t_step,
                                      unsigned threads = 1) {
    if (num_nodes < 1) throw domain_error("disparity_scan: num_nodes must be >= 1");
    if (!(p_step > 0.0 && p_step < 1.0)) throw domain_error("disparity_scan: bad p_step");
    if (!(t_step > 0.0)) throw domain_error("disparity_scan: bad t_step");

    std::vector<double> ps;
    for (long k = 1; k <= floor_snapped((1.0 - p_step) / p_step); ++k)
        ps.push_back(double(k) * p_step);
    std::vector<double> ts;
    for (long k = std::max(1L, ceil_snapped(1.0 / t_step));
         k <= floor_snapped(double(num_nodes) / t_step); ++k)
        ts.push_back(double(k) * t_step);

    struct Row {
        std::uint64_t total = 0, above = 0, agree = 0, agree_above = 0;
        std::vector<DisparityReport::Mismatch> mismatches;
    };
    std::vector<Row> rows(ts.size());

    parallel_for(ts.size(), threads, [&](std::size_t ti) {
        Row& row = rows[ti];
        const double T = ts[ti];
        for (double p : ps) {
            SystemParams params{num_nodes, p, T};
            const SolveOutcome p1 = solve_p1(params, SearchMode::candidate_set);
            const std::vector<long> p2_set = relaxed_solution_set(params);
            const bool above = definitely_greater(p * T, 1.0);
            const bool agree =
                std::find(p2_set.begin(), p2_set.end(), p1.n_star) != p2_set.end();
            ++row.total;
            if (above) ++row.above;
            if (agree) {
                ++row.agree;
                if (above) ++row.agree_above;
            } else {
                row.mismatches.push_back({p, T, p1.n_star, p2_set.front()});
            }
        }
    });

    DisparityReport report;
    std::uint64_t agree = 0, agree_above = 0;
    for (const Row& row : rows) {
        report.grid_points_total += row.total;
        report.grid_points_pT_gt_1 += row.above;
        agree += row.agree;
        agree_above += row.agree_above;
        report.mismatches.insert(report.mismatches.end(), row.mismatches.begin(),
                                 row.mismatches.end());
    }
    report.alpha = report.grid_points_total ? double(agree) / double(report.grid_points_total) : 0.0;
    report.beta = report.grid_points_pT_gt_1
                      ? double(agree_above) / double(report.grid_points_pT_gt_1)
                      : 0.0;
    return report;
}

struct CurvePoint {
    long n = 0;
    double p1_objective = 0.0;
    double p2_objective = 0.0;
};

// Exact and relaxed objective values for every support size.
inline std::vector<CurvePoint> objective_curve(const SystemParams& params) {
    params.validate();
    std::vector<CurvePoint> out;
    out.reserve(std::size_t(params.num_nodes));
    for (long n = 1; n <= params.num_nodes; ++n)
        out.push_back({n, symmetric_success(n, params), relaxed_objective(double(n), params)});
    return out;
}

}  // namespace allocopt
