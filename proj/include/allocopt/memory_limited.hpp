#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "allocopt/binomial.hpp"
#include "allocopt/errors.hpp"
#include "allocopt/numeric.hpp"
#include "allocopt/relaxation.hpp"

// Solvers under per-node memory caps: the constant-cap case solver with its
// quasi-symmetric/symmetric crossover p0, and the arbitrary-profile
// dispatcher built on the full-load and all-node spreading families.

namespace allocopt {

// Per-node capacities, sorted ascending internally. Outputs are always mapped
// back to the caller's node order via source_index.
struct MemoryProfile {
    std::vector<double> caps;         // ascending; ties keep source order
    std::vector<long> source_index;   // caps[i] belongs to input node source_index[i]

    static MemoryProfile from_caps(const std::vector<double>& raw) {
        if (raw.empty()) throw domain_error("profile: needs at least one cap");
        for (double c : raw)
            if (!(c > 0.0)) throw domain_error("profile: caps must be positive");
        MemoryProfile p;
        p.source_index.resize(raw.size());
        std::iota(p.source_index.begin(), p.source_index.end(), 0L);
        // Ascending caps, ties in source order: walking from the top then
        // fills higher-indexed nodes first, so the residual of a full-load
        // allocation lands on the earliest tied node.
        std::stable_sort(p.source_index.begin(), p.source_index.end(),
                         [&raw](long a, long b) {
                             return raw[std::size_t(a)] < raw[std::size_t(b)];
                         });
        p.caps.reserve(raw.size());
        for (long i : p.source_index) p.caps.push_back(raw[std::size_t(i)]);
        return p;
    }

    long size() const { return long(caps.size()); }

    double total() const {
        KahanSum k;
        for (double c : caps) k.add(c);
        return k.sum;
    }

    double min_cap() const { return caps.front(); }

    bool is_constant() const {
        return nearly_equal(caps.front(), caps.back());
    }

    // Capacity-weighted mean sum(M^2)/sum(M); recomputed, never cached.
    double m_stat() const {
        KahanSum num, den;
        for (double c : caps) {
            num.add(c * c);
            den.add(c);
        }
        return num.sum / den.sum;
    }
};

struct QuasiSymmetricSpec {
    long n = 0;     // support size
    double M = 0;   // n - 1 nodes hold M
    double R = 0;   // one node holds the residual, 0 < R <= M
};

// Quasi-symmetric allocation on the first n of N nodes: n - 1 full nodes
// followed by the residual node.
inline Allocation make_quasi_symmetric_alloc(long N, const QuasiSymmetricSpec& spec) {
    if (spec.n < 1 || spec.n > N) throw domain_error("quasi alloc: need 1 <= n <= N");
    Allocation a;
    a.amounts.assign(std::size_t(N), 0.0);
    for (long i = 0; i + 1 < spec.n; ++i) a.amounts[std::size_t(i)] = spec.M;
    a.amounts[std::size_t(spec.n - 1)] = spec.R;
    return a;
}

// Fewest constant-cap nodes that hold the budget.
inline long n_min_const(double T, double M) {
    if (!(T > 0.0) || !(M > 0.0)) throw domain_error("n_min_const: T and M must be positive");
    return std::max(1L, ceil_snapped(T / M));
}

// Smallest L with n_min <= floor(L * T); such L always exists for T >= 1.
// Whether it exceeds floor(N / T) is for the caller to judge.
inline long smallest_l0(long n_min, double T) {
    if (n_min < 1) throw domain_error("smallest_l0: n_min must be >= 1");
    if (definitely_greater(1.0, T)) throw infeasible_error("smallest_l0: budget below one object");
    for (long L = 1;; ++L)
        if (floor_snapped(double(L) * T) >= n_min) return L;
}

namespace detail {

// Crossover residual: quasi-symmetric success at n_min minus symmetric
// success at floor(L0 * T), both closed forms.
inline double p0_residual(double T, double M, double p) {
    const long n_min = n_min_const(T, M);
    const long L0 = smallest_l0(n_min, T);
    const long ns = floor_snapped(double(L0) * T);
    const double R = std::min(M, T - M * double(n_min - 1));
    const double qs = quasi_symmetric_success(n_min, M, R, p);
    const double sym = binom_tail(ns, p, std::min(L0, ns + 1));
    return qs - sym;
}

}  // namespace detail

// Crossover access probability below which the quasi-symmetric minimal
// allocation beats symmetric spreading at floor(L0 * T). Bracketed bisection
// on (0, 1/T); the residual at the returned point is below 1e-10.
inline double p0_solve(double T, double M) {
    if (definitely_greater(1.0, T)) throw infeasible_error("p0_solve: budget below one object");
    if (!(M > 0.0)) throw domain_error("p0_solve: M must be positive");
    if (n_min_const(T, M) < 2) throw domain_error("p0_solve: memory does not bind (T <= M)");
    double hi = 1.0 / T;
    if (!(detail::p0_residual(T, M, hi) < 0.0))
        throw no_root_error("p0_solve: no sign change on (0, 1/T)");
    double lo = 1e-3 / T;
    while (lo > 1e-13 && !(detail::p0_residual(T, M, lo) > 0.0)) lo /= 10.0;
    if (!(detail::p0_residual(T, M, lo) > 0.0))
        throw no_root_error("p0_solve: no sign change on (0, 1/T)");
    for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double r = detail::p0_residual(T, M, mid);
        if (r > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Closed-form approximation of the crossover point. Reported as-is; the
// bisection root is what the solvers dispatch on.
inline double p0_approx(double T, double M) {
    if (definitely_greater(1.0, T)) throw infeasible_error("p0_approx: budget below one object");
    if (!(M > 0.0)) throw domain_error("p0_approx: M must be positive");
    const long n_min = n_min_const(T, M);
    if (n_min < 2) throw domain_error("p0_approx: memory does not bind (T <= M)");
    const long L0 = smallest_l0(n_min, T);
    const double ns = double(floor_snapped(double(L0) * T));
    const double R = T - M * double(n_min - 1);
    const double k_without = double(ceil_snapped(1.0 / M));
    const double k_with = double(std::max(ceil_snapped((1.0 - R) / M), 0L));
    const double num = k_without - double(L0) * std::sqrt(double(n_min - 1) / ns);
    const double den =
        double(n_min - 1) - std::sqrt(double(n_min - 1) * ns) + k_without - k_with;
    if (std::abs(den) < 1e-12) throw degenerate_error("p0_approx: denominator vanishes");
    return num / den;
}

enum class P0Method { exact_root, closed_approx };

inline const char* to_string(P0Method m) {
    return m == P0Method::exact_root ? "exact-root" : "closed-approx";
}

struct ConstantProfileOutcome : SolveOutcome {
    std::optional<double> p0;  // set when the pT < 1 dispatch evaluated it
    P0Method p0_method = P0Method::exact_root;
    std::vector<long> candidate_set_M;
    long L0 = 0;
    long n_min = 0;
};

// Case solver for N nodes of constant cap M. Non-binding memory delegates to
// the unconstrained solver; an over-capacity budget is infeasible.
inline ConstantProfileOutcome solve_constant_profile(const SystemParams& params, double M) {
    params.validate();
    if (!(M > 0.0)) throw domain_error("solve_constant_profile: M must be positive");
    if (!(params.access_prob > 0.0 && params.access_prob < 1.0))
        throw degenerate_error("solve_constant_profile: requires 0 < p < 1");
    const long N = params.num_nodes;
    const double T = params.budget;
    const double p = params.access_prob;

    const long n_min = n_min_const(T, M);
    if (n_min > N)
        throw infeasible_error("solve_constant_profile: budget exceeds total capacity");
    if (definitely_greater(1.0, T))
        throw infeasible_error("solve_constant_profile: budget below one object");

    ConstantProfileOutcome out;
    out.n_min = n_min;
    if (n_min <= 1) {  // memory never binds
        static_cast<SolveOutcome&>(out) = solve_p2(params);
        out.L0 = 1;
        out.candidate_set_M = candidate_set(params).values;
        return out;
    }

    const long L = floor_snapped(double(N) / T);
    const long L0 = smallest_l0(n_min, T);
    const long ns0 = floor_snapped(double(L0) * T);
    const double R = std::min(M, T - M * double(n_min - 1));
    out.L0 = L0;
    for (long k = L0; k <= L; ++k) {
        const long v = floor_snapped(double(k) * T);
        if (v >= 1) out.candidate_set_M.push_back(v);
    }
    out.candidate_set_M.push_back(N);
    std::sort(out.candidate_set_M.begin(), out.candidate_set_M.end());
    out.candidate_set_M.erase(std::unique(out.candidate_set_M.begin(), out.candidate_set_M.end()),
                              out.candidate_set_M.end());

    const double pT = p * T;
    auto symmetric_at = [&](long n, SolveCase label) {
        out.case_label = label;
        out.n_star = n;
        out.allocation = make_symmetric_alloc(N, n, T);
        out.success_prob = symmetric_success(n, params);
        out.family = AllocFamily::symmetric;
    };

    if (nearly_equal(pT, 1.0)) {
        for (long v : out.candidate_set_M)
            if (v != N) out.tie_set.push_back(v);
        if (out.tie_set.empty()) out.tie_set.push_back(N);
        symmetric_at(out.tie_set.front(), SolveCase::case2);
        return out;
    }
    if (pT < 1.0) {
        bool quasi_wins;
        try {
            const double p0 = p0_solve(T, M);
            out.p0 = p0;
            out.p0_method = P0Method::exact_root;
            quasi_wins = p <= p0;
        } catch (const no_root_error&) {
            // No crossover on (0, 1/T): one family dominates throughout.
            quasi_wins = detail::p0_residual(T, M, p) > 0.0;
        }
        if (quasi_wins) {
            out.case_label = SolveCase::case1a;
            out.n_star = n_min;
            out.allocation = make_quasi_symmetric_alloc(N, {n_min, M, R});
            out.success_prob = quasi_symmetric_success(n_min, M, R, p);
            out.family = AllocFamily::quasi_symmetric;
        } else {
            // Minimal symmetric spreading; if floor(L0*T) outruns the
            // candidate range (L0 > L) the only symmetric choice left is N.
            symmetric_at(L0 <= L ? ns0 : N, SolveCase::case1b);
        }
        return out;
    }
    const SolveCase label = detail::classify_above_one(params, L);
    if (label == SolveCase::case4) {
        symmetric_at(N, label);
    } else {
        symmetric_at(L0 <= L ? floor_snapped(double(L) * T) : N, label);
    }
    return out;
}

// Fewest nodes of an arbitrary profile that hold the budget.
inline long n_min_profile(const MemoryProfile& profile, double T) {
    if (!(T > 0.0)) throw domain_error("n_min_profile: budget must be positive");
    KahanSum acc;
    for (long i = profile.size(); i-- > 0;) {
        acc.add(profile.caps[std::size_t(i)]);
        if (acc.sum >= T - snap_tol) return profile.size() - i;
    }
    throw infeasible_error("n_min_profile: budget exceeds total capacity");
}

// Full-load minimal-spreading allocation: fill the n_min - 1 largest caps,
// put the remainder on the next node down. Output in the caller's node order.
inline Allocation flmin_alloc(const MemoryProfile& profile, double T) {
    const long n_min = n_min_profile(profile, T);
    Allocation a;
    a.amounts.assign(std::size_t(profile.size()), 0.0);
    double remaining = T;
    for (long rank = 0; rank < n_min; ++rank) {
        const std::size_t i = std::size_t(profile.size() - 1 - rank);
        const double take = rank + 1 < n_min ? profile.caps[i] : remaining;
        if (definitely_greater(take, profile.caps[i]))
            throw infeasible_error("flmin_alloc: residual exceeds the next cap");
        a.amounts[std::size_t(profile.source_index[i])] = take;
        remaining -= take;
    }
    return a;
}

// Full-load minimal spreading is preferred when the capacity-weighted mean
// exceeds the per-node share T / n_min.
inline bool condition_flmin(const MemoryProfile& profile, double T) {
    const long n_min = n_min_profile(profile, T);
    return profile.m_stat() > T / double(n_min);
}

// Largest usable spreading: the largest n (over real cap indices) with
// T / n > M_{N-n}. A constant profile can use every node (M_0 = 0
// convention); so can a profile where no real index satisfies the bound.
inline long n_max_profile(const MemoryProfile& profile, double T) {
    if (!(T > 0.0)) throw domain_error("n_max_profile: budget must be positive");
    const long N = profile.size();
    if (profile.is_constant()) return N;
    for (long n = N - 1; n >= 1; --n) {
        if (definitely_greater(T / double(n), profile.caps[std::size_t(N - n - 1)])) return n;
    }
    return N;
}

struct WaterFill {
    Allocation allocation;  // caller's node order
    double level = 0.0;
    long saturated = 0;     // caps fully used, counted from the smallest
};

// Unique level lambda with sum_i min(M_i, lambda) = T; nodes below the level
// saturate, the rest sit at the level.
inline WaterFill water_fill(const MemoryProfile& profile, double T) {
    if (!(T > 0.0)) throw domain_error("water_fill: budget must be positive");
    if (definitely_greater(T, profile.total()))
        throw infeasible_error("water_fill: budget exceeds total capacity");
    const long N = profile.size();
    double prefix = 0.0;
    for (long j = 0; j < N; ++j) {
        const double level = (T - prefix) / double(N - j);
        if (level <= profile.caps[std::size_t(j)] + snap_tol) {
            WaterFill w;
            w.level = level;
            w.saturated = j;
            w.allocation.amounts.assign(std::size_t(N), 0.0);
            for (long i = 0; i < N; ++i)
                w.allocation.amounts[std::size_t(profile.source_index[std::size_t(i)])] =
                    std::min(profile.caps[std::size_t(i)], level);
            return w;
        }
        prefix += profile.caps[std::size_t(j)];
    }
    // T == total capacity: every node saturates.
    WaterFill w;
    w.level = profile.caps.back();
    w.saturated = N;
    w.allocation.amounts.assign(std::size_t(N), 0.0);
    for (long i = 0; i < N; ++i)
        w.allocation.amounts[std::size_t(profile.source_index[std::size_t(i)])] =
            profile.caps[std::size_t(i)];
    return w;
}

// All-node maximal-spreading allocation, realized as the water-filling that
// meets every cap.
inline Allocation anmax_alloc(const MemoryProfile& profile, double T) {
    return water_fill(profile, T).allocation;
}

// All-node spreading is preferred when the weighted mean of the saturated
// block beats its actual capacity total; vacuously true when nothing
// saturates (n_max = N).
inline bool condition_anmax(const MemoryProfile& profile, double T) {
    const long n_max = n_max_profile(profile, T);
    const long N = profile.size();
    if (n_max >= N) return true;
    KahanSum bottom;
    for (long i = 0; i < N - n_max; ++i) bottom.add(profile.caps[std::size_t(i)]);
    return profile.m_stat() * double(N - n_max) > bottom.sum;
}

struct ArbitraryProfileOutcome : SolveOutcome {
    long n_min = 0;
    long L0 = 0;
    long n_max = 0;
    long L_max = 0;
    bool cond_flmin = false;
    bool cond_anmax = false;
    bool delegated_unlimited = false;  // caps never bind; unconstrained solve
    bool constant_profile = false;     // handled by the constant-cap solver
};

namespace detail {

// Symmetric allocation on the n largest caps, mapped to the caller's order.
// Equal caps are taken in ascending source order.
inline Allocation symmetric_on_profile(const MemoryProfile& profile, long n, double T) {
    const long N = profile.size();
    if (n < 1 || n > N) throw domain_error("symmetric_on_profile: need 1 <= n <= N");
    const double share = T / double(n);
    if (definitely_greater(share, profile.caps[std::size_t(N - n)]))
        throw infeasible_error("symmetric support infeasible under caps");
    Allocation a;
    a.amounts.assign(std::size_t(N), 0.0);
    for (long i = N - n; i < N; ++i)
        a.amounts[std::size_t(profile.source_index[std::size_t(i)])] = share;
    return a;
}

inline double exact_or_throw(const Allocation& alloc, double p) {
    return exact_success(alloc, p);  // size_error surfaces for support > 25
}

}  // namespace detail

// Dispatcher for an arbitrary capacity profile. Constant profiles go through
// the constant-cap case solver; non-binding budgets go through the
// unconstrained solver; otherwise the full-load / symmetric / all-node
// families are picked by the weighted-mean conditions.
inline ArbitraryProfileOutcome solve_arbitrary_profile(const SystemParams& params,
                                                       const MemoryProfile& profile) {
    params.validate();
    if (profile.size() != params.num_nodes)
        throw domain_error("solve_arbitrary_profile: profile size != num_nodes");
    if (!(params.access_prob > 0.0 && params.access_prob < 1.0))
        throw degenerate_error("solve_arbitrary_profile: requires 0 < p < 1");
    const double T = params.budget;
    const double p = params.access_prob;
    const long N = params.num_nodes;

    if (definitely_greater(T, profile.total()))
        throw infeasible_error("solve_arbitrary_profile: budget exceeds total capacity");

    ArbitraryProfileOutcome out;
    if (!definitely_greater(T, profile.min_cap())) {
        static_cast<SolveOutcome&>(out) = solve_p2(params);
        out.delegated_unlimited = true;
        out.n_min = 1;
        out.n_max = N;
        out.L0 = 1;
        out.L_max = 0;
        for (long L = 1; floor_snapped(double(L) * T) <= N; ++L) out.L_max = L;
        return out;
    }
    if (profile.is_constant()) {
        const ConstantProfileOutcome c = solve_constant_profile(params, profile.caps.front());
        static_cast<SolveOutcome&>(out) = c;
        out.constant_profile = true;
        out.n_min = c.n_min;
        out.L0 = c.L0;
        out.n_max = N;
        out.L_max = 0;
        for (long L = 1; floor_snapped(double(L) * T) <= N; ++L) out.L_max = L;
        out.cond_flmin = condition_flmin(profile, T);
        out.cond_anmax = condition_anmax(profile, T);
        return out;
    }

    if (definitely_greater(1.0, T))
        throw infeasible_error("solve_arbitrary_profile: budget below one object");

    out.n_min = n_min_profile(profile, T);
    out.L0 = smallest_l0(out.n_min, T);
    out.n_max = n_max_profile(profile, T);
    out.L_max = 0;
    for (long L = 1; floor_snapped(double(L) * T) <= out.n_max; ++L) out.L_max = L;
    out.cond_flmin = condition_flmin(profile, T);
    out.cond_anmax = condition_anmax(profile, T);
    // The symmetric candidate window {floor(L0*T), ..., floor(L_max*T)} must
    // be nonempty, which is exactly L0 <= L_max.
    if (out.L_max < out.L0)
        throw infeasible_error("solve_arbitrary_profile: no usable spreading (L_max < L0)");

    const double pT = p * T;
    if (nearly_equal(pT, 1.0)) {
        for (long k = out.L0; k <= out.L_max; ++k) {
            const long v = floor_snapped(double(k) * T);
            if (out.tie_set.empty() || out.tie_set.back() != v) out.tie_set.push_back(v);
        }
        out.case_label = SolveCase::tie_set;
        out.n_star = out.tie_set.front();
        out.allocation = detail::symmetric_on_profile(profile, out.n_star, T);
        out.success_prob = detail::exact_or_throw(out.allocation, p);
        out.family = AllocFamily::symmetric;
        return out;
    }
    if (pT < 1.0) {
        if (out.cond_flmin) {
            out.case_label = SolveCase::case1a;
            out.n_star = out.n_min;
            out.allocation = flmin_alloc(profile, T);
            out.success_prob = detail::exact_or_throw(out.allocation, p);
            out.family = AllocFamily::flmin;
        } else {
            out.case_label = SolveCase::case1b;
            out.n_star = floor_snapped(double(out.L0) * T);
            out.allocation = detail::symmetric_on_profile(profile, out.n_star, T);
            out.success_prob = detail::exact_or_throw(out.allocation, p);
            out.family = AllocFamily::symmetric;
        }
        return out;
    }
    if (out.cond_anmax) {
        out.case_label = SolveCase::case4;
        out.n_star = N;
        out.allocation = anmax_alloc(profile, T);
        out.success_prob = detail::exact_or_throw(out.allocation, p);
        out.family = AllocFamily::anmax;
    } else {
        out.case_label = SolveCase::case5;
        out.n_star = floor_snapped(double(out.L_max) * T);
        out.allocation = detail::symmetric_on_profile(profile, out.n_star, T);
        out.success_prob = detail::exact_or_throw(out.allocation, p);
        out.family = AllocFamily::symmetric;
    }
    return out;
}

}  // namespace allocopt
