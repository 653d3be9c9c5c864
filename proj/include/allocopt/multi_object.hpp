#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "allocopt/binomial.hpp"
#include "allocopt/errors.hpp"
#include "allocopt/memory_limited.hpp"
#include "allocopt/numeric.hpp"
#include "allocopt/oracle.hpp"

// Two stored objects competing for the same capped nodes: the sequential
// (greedy) allocator, the weighted symmetric objective, and a small joint
// grid oracle to measure what sequential solving gives away.

namespace allocopt {

struct TwoObjectSpec {
    double budget1 = 0;   // T1
    double budget2 = 0;   // T2
    double demand1 = 0;   // probability the request is for object 1
    double demand2 = 0;
    double access_prob = 0;

    void validate() const {
        if (!(budget1 > 0.0) || !(budget2 > 0.0))
            throw domain_error("two-object spec: budgets must be positive");
        if (!(demand1 >= 0.0) || !(demand2 >= 0.0))
            throw domain_error("two-object spec: demands must be nonnegative");
        if (std::abs(demand1 + demand2 - 1.0) > 1e-12)
            throw domain_error("two-object spec: demands must sum to 1");
        if (!(access_prob >= 0.0 && access_prob <= 1.0))
            throw domain_error("two-object spec: access probability must be in [0, 1]");
    }
};

// Demand-weighted relaxed objective when each object sits on a symmetric
// allocation of the given support size.
inline double p4_objective(long n1, long n2, const TwoObjectSpec& spec) {
    spec.validate();
    if (n1 < 1 || n2 < 1) throw domain_error("p4_objective: supports must be >= 1");
    const double p = spec.access_prob;
    if (!(p > 0.0 && p < 1.0))
        throw degenerate_error("p4_objective: requires 0 < p < 1");
    auto term = [p](long n, double T) {
        const double mu = double(n) * p;
        const double sigma = std::sqrt(double(n) * p * (1.0 - p));
        const double k = double(ceil_snapped(double(n) / T));
        return q_function((k - mu) / sigma);
    };
    return spec.demand1 * term(n1, spec.budget1) + spec.demand2 * term(n2, spec.budget2);
}

struct ObjectResult {
    Allocation allocation;  // caller's node order
    double success = 0.0;
    SolveCase case_label = SolveCase::infeasible;
    AllocFamily family = AllocFamily::explicit_values;
    long n_star = 0;
    bool sub_unit = false;  // budget below one object: stored full-load, unrecoverable
};

struct TwoObjectOutcome {
    ObjectResult object1;
    ObjectResult object2;
    int first_solved = 1;
    double weighted_success = 0.0;
};

namespace detail {

// Single-object solve on a residual profile. A budget below one object can
// never be recovered, but the bits still get stored: pack them full-load and
// report the honest zero.
inline ObjectResult solve_object(const std::vector<double>& caps, double T, double p) {
    const MemoryProfile profile = MemoryProfile::from_caps(caps);
    if (definitely_greater(T, profile.total()))
        throw infeasible_error("two-object: budget exceeds remaining capacity");
    ObjectResult r;
    if (definitely_greater(1.0, T)) {
        r.allocation = flmin_alloc(profile, T);
        r.success = 0.0;
        r.case_label = SolveCase::infeasible;
        r.family = AllocFamily::flmin;
        r.n_star = n_min_profile(profile, T);
        r.sub_unit = true;
        return r;
    }
    const ArbitraryProfileOutcome out =
        solve_arbitrary_profile({long(caps.size()), p, T}, profile);
    r.allocation = out.allocation;
    r.success = out.success_prob;
    r.case_label = out.case_label;
    r.family = out.family;
    r.n_star = out.n_star;
    return r;
}

}  // namespace detail

// Sequential allocator with a forced order: solve the first object on the
// full profile, the second on whatever capacity remains.
inline TwoObjectOutcome allocate_two_objects_ordered(const std::vector<double>& caps,
                                                     const TwoObjectSpec& spec,
                                                     int first) {
    spec.validate();
    if (first != 1 && first != 2)
        throw domain_error("allocate_two_objects_ordered: first must be 1 or 2");
    const long N = long(caps.size());
    const double T_first = first == 1 ? spec.budget1 : spec.budget2;
    const double T_second = first == 1 ? spec.budget2 : spec.budget1;

    ObjectResult a = detail::solve_object(caps, T_first, spec.access_prob);

    std::vector<double> residual_caps;
    std::vector<long> residual_index;
    for (long i = 0; i < N; ++i) {
        const double r = caps[std::size_t(i)] - a.allocation.amounts[std::size_t(i)];
        if (r > snap_tol) {
            residual_caps.push_back(r);
            residual_index.push_back(i);
        }
    }
    if (residual_caps.empty())
        throw infeasible_error("two-object: no capacity left for the second object");
    ObjectResult b_sub =
        detail::solve_object(residual_caps, T_second, spec.access_prob);
    ObjectResult b;
    b.allocation.amounts.assign(std::size_t(N), 0.0);
    for (std::size_t j = 0; j < residual_index.size(); ++j)
        b.allocation.amounts[std::size_t(residual_index[j])] = b_sub.allocation.amounts[j];
    b.success = b_sub.success;
    b.case_label = b_sub.case_label;
    b.family = b_sub.family;
    b.n_star = b_sub.n_star;
    b.sub_unit = b_sub.sub_unit;

    TwoObjectOutcome out;
    out.first_solved = first;
    out.object1 = first == 1 ? std::move(a) : std::move(b);
    out.object2 = first == 1 ? std::move(b) : std::move(a);
    out.weighted_success =
        spec.demand1 * out.object1.success + spec.demand2 * out.object2.success;
    return out;
}

// Sequential allocator in demand order: the more-requested object picks
// first; a tie goes to object 1.
inline TwoObjectOutcome allocate_two_objects(const std::vector<double>& caps,
                                             const TwoObjectSpec& spec) {
    spec.validate();
    return allocate_two_objects_ordered(caps, spec, spec.demand1 >= spec.demand2 ? 1 : 2);
}

struct TwoObjectExhaustive {
    // Order: greedy object 1 first, greedy object 2 first, joint grid best.
    // A greedy order that dead-ends is reported as NaN.
    std::array<double, 3> strategy_scores{};
    double greedy_score = 0.0;  // the demand-ordered strategy
    double oracle_score = 0.0;  // best of everything computed here
    double gap = 0.0;           // oracle minus greedy, nonnegative by construction
    std::vector<double> joint_best1;
    std::vector<double> joint_best2;
    std::uint64_t pairs_evaluated = 0;
};

// Joint grid oracle: both objects discretized to multiples of their own
// budget over g, every cap-respecting pair scored. The greedy strategies are
// thrown in so the oracle never loses to them.
inline TwoObjectExhaustive exhaustive_two_object(const std::vector<double>& caps,
                                                 const TwoObjectSpec& spec,
                                                 int granularity) {
    spec.validate();
    const long N = long(caps.size());
    if (N < 1) throw domain_error("exhaustive_two_object: needs at least one node");
    if (N > 6) throw size_error("exhaustive_two_object: num_nodes must be <= 6");
    if (granularity < 1 || granularity > 8)
        throw size_error("exhaustive_two_object: granularity must be in [1, 8]");
    for (double c : caps)
        if (!(c > 0.0)) throw domain_error("exhaustive_two_object: caps must be positive");

    TwoObjectExhaustive r;
    const int preferred = spec.demand1 >= spec.demand2 ? 1 : 2;
    const TwoObjectOutcome greedy = allocate_two_objects_ordered(caps, spec, preferred);
    r.greedy_score = greedy.weighted_success;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.strategy_scores[std::size_t(preferred - 1)] = r.greedy_score;
    try {
        r.strategy_scores[std::size_t(2 - preferred)] =
            allocate_two_objects_ordered(caps, spec, 3 - preferred).weighted_success;
    } catch (const infeasible_error&) {
        r.strategy_scores[std::size_t(2 - preferred)] = nan;
    }

    const double unit1 = spec.budget1 / double(granularity);
    const double unit2 = spec.budget2 / double(granularity);
    auto feasible_points = [&](double unit) {
        std::vector<std::pair<std::vector<int>, double>> pts;
        std::vector<int> max_units(std::size_t(N), 0);
        for (long i = 0; i < N; ++i)
            max_units[std::size_t(i)] = int(std::min<long>(
                granularity, std::max(0L, floor_snapped(caps[std::size_t(i)] / unit))));
        detail::for_each_composition(N, granularity, [&](const std::vector<int>& units) {
            for (long i = 0; i < N; ++i)
                if (units[std::size_t(i)] > max_units[std::size_t(i)]) return;
            Allocation a;
            a.amounts.reserve(std::size_t(N));
            for (int u : units) a.amounts.push_back(double(u) * unit);
            pts.emplace_back(units, exact_success(a, spec.access_prob));
        });
        return pts;
    };
    const auto pts1 = feasible_points(unit1);
    const auto pts2 = feasible_points(unit2);

    bool any = false;
    double best = 0.0;
    const std::vector<int>* arg1 = nullptr;
    const std::vector<int>* arg2 = nullptr;
    for (const auto& [u1, s1] : pts1) {
        for (const auto& [u2, s2] : pts2) {
            bool ok = true;
            for (long i = 0; i < N && ok; ++i)
                ok = double(u1[std::size_t(i)]) * unit1 + double(u2[std::size_t(i)]) * unit2 <=
                     caps[std::size_t(i)] + snap_tol;
            if (!ok) continue;
            ++r.pairs_evaluated;
            const double s = spec.demand1 * s1 + spec.demand2 * s2;
            if (!any || s > best) {
                any = true;
                best = s;
                arg1 = &u1;
                arg2 = &u2;
            }
        }
    }
    if (!any)
        throw infeasible_error("exhaustive_two_object: no cap-respecting pair on the grid");
    r.strategy_scores[2] = best;
    r.joint_best1.reserve(std::size_t(N));
    r.joint_best2.reserve(std::size_t(N));
    for (long i = 0; i < N; ++i) {
        r.joint_best1.push_back(double((*arg1)[std::size_t(i)]) * unit1);
        r.joint_best2.push_back(double((*arg2)[std::size_t(i)]) * unit2);
    }
    r.oracle_score = r.greedy_score;
    for (double s : r.strategy_scores)
        if (!std::isnan(s) && s > r.oracle_score) r.oracle_score = s;
    r.gap = r.oracle_score - r.greedy_score;
    return r;
}

}  // namespace allocopt
