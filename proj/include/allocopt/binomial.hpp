#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "allocopt/errors.hpp"
#include "allocopt/numeric.hpp"

// Exact probability machinery: binomial pmf/tail in the log domain, exact
// success probability of an arbitrary allocation by support enumeration, the
// symmetric and quasi-symmetric closed forms, a seeded Monte Carlo estimator,
// and the first-moment (Markov) bound.

namespace allocopt {

struct SystemParams {
    long num_nodes = 0;     // N
    double access_prob = 0; // p, each node reachable independently
    double budget = 0;      // T, total storage in units of the object size

    void validate() const {
        if (num_nodes < 1) throw domain_error("num_nodes must be >= 1");
        if (!(access_prob >= 0.0 && access_prob <= 1.0))
            throw domain_error("access_prob must lie in [0,1]");
        if (!(budget > 0.0)) throw domain_error("budget must be positive");
    }
};

// Amounts per node, in object-size units. Plain data; ops validate on entry.
struct Allocation {
    std::vector<double> amounts;

    double sum() const {
        KahanSum k;
        for (double a : amounts) k.add(a);
        return k.sum;
    }

    long support() const {
        long n = 0;
        for (double a : amounts)
            if (a > 0.0) ++n;
        return n;
    }
};

enum class EstimateMethod { exact_enumeration, closed_form, monte_carlo };

inline const char* to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::exact_enumeration: return "exact-enumeration";
        case EstimateMethod::closed_form: return "closed-form";
        case EstimateMethod::monte_carlo: return "monte-carlo";
    }
    return "?";
}

struct SuccessEstimate {
    double value = 0.0;
    EstimateMethod method = EstimateMethod::exact_enumeration;
    double ci_halfwidth = 0.0; // 0 for exact methods
    std::uint64_t trials = 0;  // 0 for exact methods
};

// P[Binomial(n, p) = i], log-domain so n up to 1e4 neither over- nor
// underflows on the way to the result.
inline double binom_pmf(long n, double p, long i) {
    if (n < 0 || i < 0 || i > n) throw domain_error("binom_pmf: need 0 <= i <= n");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binom_pmf: p outside [0,1]");
    if (p == 0.0) return i == 0 ? 1.0 : 0.0;
    if (p == 1.0) return i == n ? 1.0 : 0.0;
    if (n == 0) return 1.0;
    const double logc = std::lgamma(double(n) + 1.0) - std::lgamma(double(i) + 1.0) -
                        std::lgamma(double(n - i) + 1.0);
    return std::exp(logc + double(i) * std::log(p) + double(n - i) * std::log1p(-p));
}

// P[Binomial(n, p) >= k]. k = 0 gives exactly 1, k = n + 1 exactly 0.
inline double binom_tail(long n, double p, long k) {
    if (n < 0 || k < 0 || k > n + 1) throw domain_error("binom_tail: need 0 <= k <= n+1");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binom_tail: p outside [0,1]");
    if (k == 0) return 1.0;
    if (k == n + 1) return 0.0;
    KahanSum acc;
    for (long i = k; i <= n; ++i) acc.add(binom_pmf(n, p, i));
    return std::min(1.0, acc.sum);
}

namespace detail {

// Nonzero amounts only; throws on negatives. Enumeration paths never gain
// anything from zero-amount nodes, so they are pruned up front.
inline std::vector<double> pruned_support(const Allocation& alloc) {
    std::vector<double> s;
    s.reserve(alloc.amounts.size());
    for (double a : alloc.amounts) {
        if (a < 0.0) throw domain_error("allocation amounts must be nonnegative");
        if (a > 0.0) s.push_back(a);
    }
    return s;
}

// Success probability over independent node accesses, branch-and-bound over
// the support. Once the running sum covers the object every completion
// succeeds; once even the whole suffix cannot cover it none do.
inline double subset_success(const std::vector<double>& x, const std::vector<double>& suffix,
                             double p, std::size_t idx, double acc) {
    if (covers_unit(acc)) return 1.0;
    if (idx == x.size() || !covers_unit(acc + suffix[idx])) return 0.0;
    return p * subset_success(x, suffix, p, idx + 1, acc + x[idx]) +
           (1.0 - p) * subset_success(x, suffix, p, idx + 1, acc);
}

}  // namespace detail

// Exact success probability of an arbitrary allocation: the collector reaches
// each node independently with probability p and recovers iff the accessed
// amounts sum to at least one object. Enumeration is over the support only;
// more than 25 nonzero nodes is out of scope for this path (use Monte Carlo).
inline double exact_success(const Allocation& alloc, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("exact_success: p outside [0,1]");
    std::vector<double> x = detail::pruned_support(alloc);
    if (x.size() > 25)
        throw size_error("exact_success: support exceeds 25 nodes; use monte_carlo_success");
    std::sort(x.begin(), x.end(), std::greater<double>());
    std::vector<double> suffix(x.size() + 1, 0.0);
    for (std::size_t i = x.size(); i-- > 0;) suffix[i] = suffix[i + 1] + x[i];
    return detail::subset_success(x, suffix, p, 0, 0.0);
}

// Closed form for the symmetric allocation spreading T over n nodes: success
// needs at least ceil(n/T) of them. Returns 0 when even n accesses are short.
inline double symmetric_success(long n, const SystemParams& params) {
    params.validate();
    if (n < 1) throw domain_error("symmetric_success: n must be >= 1");
    const long k = ceil_snapped(double(n) / params.budget);
    if (k > n) return 0.0;
    return binom_tail(n, params.access_prob, std::max(k, 0L));
}

// Closed form for the quasi-symmetric allocation: n - 1 nodes hold M, one
// holds the residual R (0 < R <= M). Conditioning on the residual node being
// reached gives the two binomial tails over the remaining n - 1 nodes.
inline double quasi_symmetric_success(long n, double M, double R, double p) {
    if (n < 1) throw domain_error("quasi_symmetric_success: n must be >= 1");
    if (!(M > 0.0)) throw domain_error("quasi_symmetric_success: M must be positive");
    if (!(R > 0.0) || definitely_greater(R, M))
        throw domain_error("quasi_symmetric_success: need 0 < R <= M");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("quasi_symmetric_success: p outside [0,1]");
    const long k_with = std::max(ceil_snapped((1.0 - R) / M), 0L);
    const long k_without = std::max(ceil_snapped(1.0 / M), 0L);
    const double t_with = k_with <= n - 1 ? binom_tail(n - 1, p, k_with) : 0.0;
    const double t_without = k_without <= n - 1 ? binom_tail(n - 1, p, k_without) : 0.0;
    return p * t_with + (1.0 - p) * t_without;
}

// z for a two-sided 99% normal interval.
inline constexpr double z_99 = 2.5758293035489004;

// Seeded Monte Carlo estimate of exact_success with a 99% CI half-width.
// Deterministic for a fixed seed.
inline SuccessEstimate monte_carlo_success(const Allocation& alloc, double p,
                                           std::uint64_t trials, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("monte_carlo_success: p outside [0,1]");
    if (trials == 0) throw domain_error("monte_carlo_success: trials must be >= 1");
    std::vector<double> x = detail::pruned_support(alloc);
    std::sort(x.begin(), x.end(), std::greater<double>());
    std::vector<double> suffix(x.size() + 1, 0.0);
    for (std::size_t i = x.size(); i-- > 0;) suffix[i] = suffix[i + 1] + x[i];

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };

    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (covers_unit(acc) || !covers_unit(acc + suffix[i])) break;
            if (uniform() < p) acc += x[i];
        }
        if (covers_unit(acc)) ++hits;
    }
    const double value = double(hits) / double(trials);
    const double half = z_99 * std::sqrt(value * (1.0 - value) / double(trials));
    return SuccessEstimate{value, EstimateMethod::monte_carlo, half, trials};
}

// First-moment bound on the with-replacement access model: k accesses collect
// k * mean(support) in expectation, so P[success] <= p * n * mean = p * total.
inline double markov_bound(const Allocation& alloc, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("markov_bound: p outside [0,1]");
    const std::vector<double> x = detail::pruned_support(alloc);
    if (x.empty()) throw domain_error("markov_bound: allocation has empty support");
    KahanSum total;
    for (double a : x) total.add(a);
    return std::min(1.0, p * total.sum);
}

}  // namespace allocopt
