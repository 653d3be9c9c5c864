#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "allocopt/binomial.hpp"
#include "allocopt/errors.hpp"
#include "allocopt/memory_limited.hpp"
#include "allocopt/numeric.hpp"

// Brute-force reference optimizers over a discretized budget. Small instances
// only; these exist to check the case solvers, not to replace them.

namespace allocopt {

struct GridSearchResult {
    Allocation best_alloc;
    double best_score = 0.0;
    std::uint64_t evaluated = 0;    // feasible grid points scored
    double runner_up_gap = 0.0;     // best minus second-best score, 0 if fewer than 2
    // Filled only when collect_points was requested: (units per node, score).
    std::vector<std::pair<std::vector<int>, double>> scored;
};

namespace detail {

// Compositions of g units over N slots in colexicographic order: the last
// slot moves slowest, the first slot absorbs the remainder.
template <typename Fn>
inline void for_each_composition(long N, int g, Fn&& fn) {
    // Iterative odometer over slots 1..N-1; slot 0 absorbs the remainder.
    std::vector<int> units(std::size_t(N), 0);
    for (;;) {
        int fixed = 0;
        for (long i = 1; i < N; ++i) fixed += units[std::size_t(i)];
        units[0] = g - fixed;
        fn(units);
        long i = 1;
        for (; i < N; ++i) {
            int above = 0;
            for (long k = i + 1; k < N; ++k) above += units[std::size_t(k)];
            if (units[std::size_t(i)] < g - above) {
                ++units[std::size_t(i)];
                for (long k = 1; k < i; ++k) units[std::size_t(k)] = 0;
                break;
            }
            units[std::size_t(i)] = 0;
        }
        if (i == N) break;
    }
}

}  // namespace detail

// Exhaustive search over allocations whose amounts are multiples of T / g,
// restricted to the caps when a profile is given (in the caller's node
// order). Ties break toward smaller support, then the earlier point in
// colexicographic order.
inline GridSearchResult grid_search_alloc(const SystemParams& params,
                                          const std::vector<double>* caps,
                                          int granularity,
                                          bool collect_points = false) {
    params.validate();
    if (params.num_nodes > 6) throw size_error("grid_search_alloc: num_nodes must be <= 6");
    if (granularity < 1 || granularity > 12)
        throw size_error("grid_search_alloc: granularity must be in [1, 12]");
    if (caps && long(caps->size()) != params.num_nodes)
        throw domain_error("grid_search_alloc: caps size != num_nodes");
    const long N = params.num_nodes;
    const double unit = params.budget / double(granularity);
    std::vector<int> max_units(std::size_t(N), granularity);
    if (caps) {
        for (long i = 0; i < N; ++i) {
            if (!((*caps)[std::size_t(i)] > 0.0))
                throw domain_error("grid_search_alloc: caps must be positive");
            const long m = floor_snapped((*caps)[std::size_t(i)] / unit);
            max_units[std::size_t(i)] = int(std::min<long>(granularity, std::max(0L, m)));
        }
    }

    GridSearchResult result;
    double second = 0.0;
    long best_support = 0;
    bool any = false;
    detail::for_each_composition(N, granularity, [&](const std::vector<int>& units) {
        for (long i = 0; i < N; ++i)
            if (units[std::size_t(i)] > max_units[std::size_t(i)]) return;
        Allocation a;
        a.amounts.reserve(std::size_t(N));
        for (int u : units) a.amounts.push_back(double(u) * unit);
        const double s = exact_success(a, params.access_prob);
        ++result.evaluated;
        if (collect_points) result.scored.emplace_back(units, s);
        const long support = a.support();
        if (!any) {
            any = true;
            result.best_alloc = std::move(a);
            result.best_score = s;
            best_support = support;
            return;
        }
        if (s > result.best_score) {
            second = result.best_score;
            result.best_alloc = std::move(a);
            result.best_score = s;
            best_support = support;
        } else {
            if (s > second) second = s;
            if (s == result.best_score && support < best_support) {
                result.best_alloc = std::move(a);
                best_support = support;
            }
        }
    });
    if (!any) throw infeasible_error("grid_search_alloc: no feasible grid point under the caps");
    result.runner_up_gap = result.evaluated >= 2 ? result.best_score - second : 0.0;
    return result;
}

// Exact symmetric argmax over every support size 1..N, smallest n on ties.
// Exists to check that restricting the search to the candidate set loses
// nothing; callers wanting the outcome object use solve_p1 directly.
inline long argmax_p1_full(const SystemParams& params) {
    return solve_p1(params, SearchMode::full_range).n_star;
}

struct ConjectureReport {
    ArbitraryProfileOutcome solver;
    GridSearchResult grid;
    double gap_abs = 0.0;  // grid best minus solver success; positive means the solver lost
    double gap_rel = 0.0;
};

// Side-by-side of the profile dispatcher and the grid oracle on one
// instance. The gap is reported, never asserted away.
inline ConjectureReport conjecture_report(const SystemParams& params,
                                          const std::vector<double>& caps,
                                          int granularity,
                                          bool collect_points = false) {
    ConjectureReport r;
    r.solver = solve_arbitrary_profile(params, MemoryProfile::from_caps(caps));
    r.grid = grid_search_alloc(params, &caps, granularity, collect_points);
    r.gap_abs = r.grid.best_score - r.solver.success_prob;
    r.gap_rel = r.grid.best_score > 0.0 ? r.gap_abs / r.grid.best_score : 0.0;
    return r;
}

}  // namespace allocopt
