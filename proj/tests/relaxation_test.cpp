#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "allocopt/allocopt.hpp"

namespace {

using namespace allocopt;

TEST(QFunction, KnownValues) {
    EXPECT_DOUBLE_EQ(q_function(0.0), 0.5);
    EXPECT_NEAR(q_function(1.0), 0.15865525393145705, 1e-15);
    EXPECT_NEAR(q_function(-1.0), 1.0 - 0.15865525393145705, 1e-15);
    EXPECT_NEAR(q_function(2.5758293035489004), 0.005, 1e-12);
}

TEST(QFunction, SymmetryAndTails) {
    for (double x : {0.1, 0.7, 1.3, 2.9, 5.0}) {
        EXPECT_NEAR(q_function(x) + q_function(-x), 1.0, 1e-15) << "x=" << x;
        EXPECT_LT(q_function(x), q_function(x - 0.05)) << "x=" << x;
    }
    EXPECT_LT(q_function(40.0), 1e-300);
    EXPECT_GT(q_function(-40.0), 1.0 - 1e-15);
}

TEST(RelaxedObjective, MatchesQFunctionComposition) {
    const SystemParams params{45, 0.2, 10.0};
    for (long n : {1L, 7L, 20L, 40L, 45L}) {
        const double k = std::ceil(double(n) / params.budget);
        const double mu = double(n) * params.access_prob;
        const double sigma =
            std::sqrt(double(n) * params.access_prob * (1.0 - params.access_prob));
        EXPECT_DOUBLE_EQ(relaxed_objective(double(n), params),
                         q_function((k - mu) / sigma))
            << "n=" << n;
    }
}

TEST(RelaxedObjective, KnownValues) {
    EXPECT_NEAR(relaxed_objective(40.0, {45, 0.2, 10.0}), 0.9431, 1e-4);
    EXPECT_NEAR(relaxed_objective(10.0, {45, 0.05, 10.0}), 0.234, 1e-3);
    // Threshold equal to the mean pins the value at exactly one half.
    EXPECT_DOUBLE_EQ(relaxed_objective(4.0, {10, 0.5, 2.0}), 0.5);
}

TEST(RelaxedObjective, DistinctInputsGiveDistinctValues) {
    // Support sizes sharing a recovery threshold still differ through the
    // mean and variance, so equal outputs pin down (threshold, n) jointly.
    const SystemParams params{45, 0.3, 10.0};
    EXPECT_EQ(std::ceil(33.0 / params.budget), std::ceil(40.0 / params.budget));
    EXPECT_GT(relaxed_objective(40.0, params), relaxed_objective(33.0, params));
    const SystemParams low{45, 0.02, 10.0};
    EXPECT_EQ(std::ceil(33.0 / low.budget), std::ceil(40.0 / low.budget));
    EXPECT_NE(relaxed_objective(33.0, low), relaxed_objective(40.0, low));
}

TEST(RelaxedObjective, Errors) {
    EXPECT_THROW(relaxed_objective(5.0, {10, 0.0, 2.0}), degenerate_error);
    EXPECT_THROW(relaxed_objective(5.0, {10, 1.0, 2.0}), degenerate_error);
    EXPECT_THROW(relaxed_objective(0.0, {10, 0.5, 2.0}), domain_error);
    EXPECT_THROW(relaxed_objective(-1.0, {10, 0.5, 2.0}), domain_error);
}

TEST(CandidateSet, KnownSets) {
    const CandidateSet a = candidate_set({45, 0.2, 10.0});
    EXPECT_EQ(a.L, 4);
    EXPECT_EQ(a.values, (std::vector<long>{10, 20, 30, 40, 45}));

    const CandidateSet b = candidate_set({10, 0.2, 10.0});
    EXPECT_EQ(b.L, 1);
    EXPECT_EQ(b.values, (std::vector<long>{10}));

    const CandidateSet c = candidate_set({7, 0.2, 1.4});
    EXPECT_EQ(c.L, 5);
    EXPECT_EQ(c.values, (std::vector<long>{1, 2, 4, 5, 7}));

    const CandidateSet d = candidate_set({1, 0.2, 1.0});
    EXPECT_EQ(d.L, 1);
    EXPECT_EQ(d.values, (std::vector<long>{1}));
}

TEST(CandidateSet, StructuralProperties) {
    for (long N : {2L, 5L, 11L, 23L, 45L}) {
        for (double T = 1.0; T <= double(N); T += 0.7) {
            const CandidateSet cand = candidate_set({N, 0.5, T});
            EXPECT_EQ(cand.L, floor_snapped(double(N) / T));
            ASSERT_FALSE(cand.values.empty());
            EXPECT_EQ(cand.values.back(), N);
            EXPECT_GE(cand.values.front(), 1);
            for (std::size_t i = 1; i < cand.values.size(); ++i)
                EXPECT_LT(cand.values[i - 1], cand.values[i]);
            const long flt = floor_snapped(double(cand.L) * T);
            EXPECT_NE(std::find(cand.values.begin(), cand.values.end(), flt),
                      cand.values.end())
                << "N=" << N << " T=" << T;
        }
    }
}

TEST(CandidateSet, BudgetBelowOneIsInfeasible) {
    EXPECT_THROW(candidate_set({5, 0.5, 0.8}), infeasible_error);
    EXPECT_THROW(candidate_set({5, 0.5, 0.999999}), infeasible_error);
}

TEST(MakeSymmetricAlloc, ShapeAndErrors) {
    const Allocation alloc = make_symmetric_alloc(10, 4, 3.0);
    ASSERT_EQ(alloc.amounts.size(), 10u);
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(alloc.amounts[i], 0.75);
    for (int i = 4; i < 10; ++i) EXPECT_DOUBLE_EQ(alloc.amounts[i], 0.0);
    EXPECT_NEAR(alloc.sum(), 3.0, 1e-9);
    EXPECT_EQ(alloc.support(), 4);
    EXPECT_THROW(make_symmetric_alloc(10, 0, 3.0), domain_error);
    EXPECT_THROW(make_symmetric_alloc(10, 11, 3.0), domain_error);
}

TEST(SolveP2, MinimalSpreadingBelowTheBand) {
    const SolveOutcome out = solve_p2({45, 0.05, 10.0});
    EXPECT_EQ(out.case_label, SolveCase::case1);
    EXPECT_EQ(out.n_star, 10);
    EXPECT_EQ(out.family, AllocFamily::symmetric);
    EXPECT_TRUE(out.tie_set.empty());
    EXPECT_DOUBLE_EQ(out.allocation.amounts[9], 1.0);
    EXPECT_NEAR(out.success_prob, symmetric_success(10, {45, 0.05, 10.0}), 1e-12);

    // Budget floor larger than N clamps to N.
    const SolveOutcome clamped = solve_p2({3, 0.1, 5.0});
    EXPECT_EQ(clamped.case_label, SolveCase::case1);
    EXPECT_EQ(clamped.n_star, 3);
}

TEST(SolveP2, TieBandListsEveryCandidateExceptFullSpread) {
    const SolveOutcome out = solve_p2({45, 0.1, 10.0});
    EXPECT_EQ(out.case_label, SolveCase::case2);
    EXPECT_EQ(out.tie_set, (std::vector<long>{10, 20, 30, 40}));
    EXPECT_EQ(out.n_star, 10);

    // When N is the only candidate the tie set degenerates to {N}.
    const SolveOutcome only = solve_p2({10, 0.1, 10.0});
    EXPECT_EQ(only.case_label, SolveCase::case2);
    EXPECT_EQ(only.tie_set, (std::vector<long>{10}));
    EXPECT_EQ(only.n_star, 10);
}

TEST(SolveP2, ThresholdsAboveTheBand) {
    const SystemParams base{45, 0.2, 10.0};
    const SolveOutcome spread = solve_p2(base);
    EXPECT_EQ(spread.case_label, SolveCase::case5);
    EXPECT_EQ(spread.n_star, 40);

    const SolveOutcome low = solve_p2({45, 0.111, 10.0});
    EXPECT_EQ(low.case_label, SolveCase::case3);
    EXPECT_EQ(low.n_star, 40);

    const SolveOutcome mid = solve_p2({45, 0.12, 10.0});
    EXPECT_EQ(mid.case_label, SolveCase::case4);
    EXPECT_EQ(mid.n_star, 45);

    // The upper threshold for N=45, T=10 sits at about 0.13283; the band is
    // closed, so values at or just below it stay in the full-spread case.
    EXPECT_EQ(solve_p2({45, 0.132834, 10.0}).case_label, SolveCase::case4);
    EXPECT_EQ(solve_p2({45, 0.1329, 10.0}).case_label, SolveCase::case5);
    EXPECT_EQ(solve_p2({45, 0.1329, 10.0}).n_star, 40);

    // L = 0 (budget exceeds N) leaves only the full spread.
    const SolveOutcome tiny = solve_p2({3, 0.9, 5.0});
    EXPECT_EQ(tiny.case_label, SolveCase::case4);
    EXPECT_EQ(tiny.n_star, 3);
}

TEST(SolveP2, StructuralGrid) {
    for (long N : {5L, 17L, 45L}) {
        for (double T = 1.0; T <= double(N); T += 0.7) {
            for (double p = 0.05; p < 1.0; p += 0.05) {
                const SolveOutcome out = solve_p2({N, p, T});
                if (definitely_greater(1.0, p * T)) {
                    EXPECT_EQ(out.case_label, SolveCase::case1);
                    EXPECT_EQ(out.n_star, std::min(floor_snapped(T), N))
                        << "N=" << N << " T=" << T << " p=" << p;
                } else if (definitely_greater(p * T, 1.0)) {
                    const long L = floor_snapped(double(N) / T);
                    const long flt = floor_snapped(double(L) * T);
                    EXPECT_TRUE(out.n_star == flt || out.n_star == N)
                        << "N=" << N << " T=" << T << " p=" << p
                        << " n*=" << out.n_star;
                }
            }
        }
    }
}

TEST(SolveP2, OutcomeCoherence) {
    for (double p : {0.05, 0.1, 0.12, 0.2, 0.7}) {
        const SolveOutcome out = solve_p2({45, p, 10.0});
        EXPECT_EQ(out.family, AllocFamily::symmetric);
        EXPECT_NEAR(out.allocation.sum(), 10.0, 1e-9);
        EXPECT_EQ(out.allocation.support(), out.n_star);
        EXPECT_NEAR(out.success_prob,
                    binom_tail(out.n_star, p, ceil_snapped(double(out.n_star) / 10.0)),
                    1e-12);
        if (out.n_star <= 25)
            EXPECT_NEAR(out.success_prob, exact_success(out.allocation, p), 1e-9);
        if (out.case_label != SolveCase::case2) EXPECT_TRUE(out.tie_set.empty());
    }
}

TEST(SolveP1, KnownArgmaxes) {
    const SolveOutcome spread = solve_p1({45, 0.2, 10.0}, SearchMode::candidate_set);
    EXPECT_EQ(spread.n_star, 40);
    EXPECT_NEAR(spread.success_prob, 0.97153790554, 1e-10);
    EXPECT_TRUE(solutions_agree(spread.n_star, solve_p2({45, 0.2, 10.0})));

    const SolveOutcome narrow = solve_p1({45, 0.05, 10.0}, SearchMode::candidate_set);
    EXPECT_EQ(narrow.n_star, 10);
    EXPECT_TRUE(solutions_agree(narrow.n_star, solve_p2({45, 0.05, 10.0})));

    const SolveOutcome band = solve_p1({45, 0.1, 10.0}, SearchMode::candidate_set);
    const SolveOutcome band_p2 = solve_p2({45, 0.1, 10.0});
    EXPECT_TRUE(solutions_agree(band.n_star, band_p2))
        << "band argmax " << band.n_star << " outside the tie set";
}

TEST(SolveP1, CandidateRestrictionLosesNothing) {
    for (long N : {1L, 2L, 3L, 5L, 8L, 21L, 45L}) {
        for (double T = 1.0; T <= double(N); T += 0.5) {
            for (double p = 0.04; p < 1.0; p += 0.04) {
                const SystemParams params{N, p, T};
                const SolveOutcome full = solve_p1(params, SearchMode::full_range);
                const SolveOutcome cand = solve_p1(params, SearchMode::candidate_set);
                ASSERT_NEAR(full.success_prob, cand.success_prob, 1e-12)
                    << "N=" << N << " T=" << T << " p=" << p;
            }
        }
    }
}

TEST(SolveP1, SpreadingThresholdFavorsExtremes) {
    // Classical sufficient condition for maximal spreading: once
    // (1-p)^f + 2 f p (1-p)^(f-1) <= 1 with f = floor(T), the best support is
    // one of the two extreme candidates floor(LT) or N.
    for (long N : {8L, 15L, 30L, 45L}) {
        for (double T = 1.0; T <= double(N); T += 0.6) {
            for (double p = 0.04; p < 1.0; p += 0.04) {
                const long f = floor_snapped(T);
                const double cond =
                    std::pow(1.0 - p, double(f)) +
                    2.0 * double(f) * p * std::pow(1.0 - p, double(f) - 1.0);
                if (cond > 1.0) continue;
                const SystemParams params{N, p, T};
                const long L = floor_snapped(double(N) / T);
                const long flt = floor_snapped(double(L) * T);
                const double best_extreme = std::max(symmetric_success(flt, params),
                                                     symmetric_success(N, params));
                const SolveOutcome full = solve_p1(params, SearchMode::full_range);
                ASSERT_LE(full.success_prob, best_extreme + 1e-12)
                    << "N=" << N << " T=" << T << " p=" << p;
                ASSERT_GE(best_extreme,
                          symmetric_success(std::min(f, N), params) - 1e-12)
                    << "N=" << N << " T=" << T << " p=" << p;
            }
        }
    }
}

TEST(RelaxedSolutionSet, ContainsRelaxedArgmax) {
    for (double p : {0.05, 0.12, 0.2, 0.45, 0.9}) {
        const SystemParams params{45, p, 10.0};
        const std::vector<long> set = relaxed_solution_set(params);
        ASSERT_FALSE(set.empty());
        const CandidateSet cand = candidate_set(params);
        double best = -1.0;
        long best_n = 0;
        for (long n : cand.values) {
            const double q = relaxed_objective(double(n), params);
            if (q > best) { best = q; best_n = n; }
        }
        EXPECT_NE(std::find(set.begin(), set.end(), best_n), set.end()) << "p=" << p;
        for (long n : set) {
            EXPECT_NE(std::find(cand.values.begin(), cand.values.end(), n),
                      cand.values.end());
            EXPECT_GE(relaxed_objective(double(n), params), best - 1e-9);
        }
    }
}

TEST(RelaxedSolutionSet, BandReturnsAnalyticTieSet) {
    EXPECT_EQ(relaxed_solution_set({45, 0.1, 10.0}),
              (std::vector<long>{10, 20, 30, 40}));
    EXPECT_EQ(relaxed_solution_set({10, 0.1, 10.0}), (std::vector<long>{10}));
    EXPECT_THROW(relaxed_solution_set({10, 0.0, 2.0}), degenerate_error);
}

TEST(SolutionsAgree, MembershipSemantics) {
    const SolveOutcome unique = solve_p2({45, 0.2, 10.0});
    EXPECT_TRUE(solutions_agree(40, unique));
    EXPECT_FALSE(solutions_agree(45, unique));
    EXPECT_FALSE(solutions_agree(30, unique));

    const SolveOutcome band = solve_p2({45, 0.1, 10.0});
    EXPECT_TRUE(solutions_agree(10, band));
    EXPECT_TRUE(solutions_agree(40, band));
    EXPECT_FALSE(solutions_agree(45, band));
}

TEST(DisparityScan, FrozenTenNodeReport) {
    const DisparityReport report = disparity_scan(10, 1e-3, 0.1, 1);
    EXPECT_EQ(report.grid_points_total, 90909u);
    EXPECT_EQ(report.grid_points_pT_gt_1, 67364u);
    EXPECT_NEAR(report.alpha, 0.905146905147, 1e-9);
    EXPECT_NEAR(report.beta, 0.921753458821, 1e-9);
    EXPECT_EQ(report.mismatches.size(), 8623u);
    const double agree =
        double(report.grid_points_total) - double(report.mismatches.size());
    EXPECT_NEAR(report.alpha, agree / double(report.grid_points_total), 1e-12);
}

TEST(DisparityScan, ThreadCountDoesNotChangeReport) {
    const DisparityReport a = disparity_scan(10, 0.01, 0.5, 1);
    const DisparityReport b = disparity_scan(10, 0.01, 0.5, 4);
    EXPECT_EQ(a.grid_points_total, b.grid_points_total);
    EXPECT_EQ(a.grid_points_pT_gt_1, b.grid_points_pT_gt_1);
    EXPECT_DOUBLE_EQ(a.alpha, b.alpha);
    EXPECT_DOUBLE_EQ(a.beta, b.beta);
    ASSERT_EQ(a.mismatches.size(), b.mismatches.size());
    for (std::size_t i = 0; i < a.mismatches.size(); ++i) {
        EXPECT_DOUBLE_EQ(a.mismatches[i].p, b.mismatches[i].p);
        EXPECT_DOUBLE_EQ(a.mismatches[i].T, b.mismatches[i].T);
        EXPECT_EQ(a.mismatches[i].n_p1, b.mismatches[i].n_p1);
        EXPECT_EQ(a.mismatches[i].n_p2, b.mismatches[i].n_p2);
    }
}

TEST(DisparityScan, SingleNodeGrid) {
    const DisparityReport report = disparity_scan(1, 0.1, 0.1, 1);
    EXPECT_EQ(report.grid_points_total, 9u);
    EXPECT_EQ(report.grid_points_pT_gt_1, 0u);
    EXPECT_DOUBLE_EQ(report.alpha, 1.0);
    EXPECT_DOUBLE_EQ(report.beta, 0.0);
    EXPECT_TRUE(report.mismatches.empty());
}

TEST(DisparityScan, RejectsBadSteps) {
    EXPECT_THROW(disparity_scan(0, 0.1, 0.1), domain_error);
    EXPECT_THROW(disparity_scan(10, 0.0, 0.1), domain_error);
    EXPECT_THROW(disparity_scan(10, 1.0, 0.1), domain_error);
    EXPECT_THROW(disparity_scan(10, 0.1, 0.0), domain_error);
}

TEST(ObjectiveCurve, FrozenRows) {
    const std::vector<CurvePoint> curve = objective_curve({5, 0.3, 2.0});
    ASSERT_EQ(curve.size(), 5u);
    EXPECT_EQ(curve[0].n, 1);
    EXPECT_NEAR(curve[0].p1_objective, 0.3, 1e-12);
    EXPECT_NEAR(curve[0].p2_objective, 0.0633152289738, 1e-10);
    EXPECT_EQ(curve[1].n, 2);
    EXPECT_NEAR(curve[1].p1_objective, 0.51, 1e-12);
    EXPECT_NEAR(curve[1].p2_objective, 0.268546989221, 1e-10);
    for (const CurvePoint& pt : curve) {
        EXPECT_NEAR(pt.p1_objective, symmetric_success(pt.n, {5, 0.3, 2.0}), 1e-12);
        EXPECT_NEAR(pt.p2_objective, relaxed_objective(double(pt.n), {5, 0.3, 2.0}),
                    1e-12);
    }
}

TEST(ObjectiveCurve, SinglePoint) {
    const std::vector<CurvePoint> curve = objective_curve({1, 0.3, 1.0});
    ASSERT_EQ(curve.size(), 1u);
    EXPECT_EQ(curve[0].n, 1);
    EXPECT_NEAR(curve[0].p1_objective, 0.3, 1e-12);
    EXPECT_NEAR(curve[0].p2_objective, q_function(0.7 / std::sqrt(0.21)), 1e-12);
}

TEST(ObjectiveCurve, ArgmaxesCoincideAwayFromTheBand) {
    const std::vector<CurvePoint> curve = objective_curve({45, 0.2, 10.0});
    long best_p1 = 0, best_p2 = 0;
    double v1 = -1.0, v2 = -1.0;
    for (const CurvePoint& pt : curve) {
        if (pt.p1_objective > v1) { v1 = pt.p1_objective; best_p1 = pt.n; }
        if (pt.p2_objective > v2) { v2 = pt.p2_objective; best_p2 = pt.n; }
    }
    EXPECT_EQ(best_p1, 40);
    EXPECT_EQ(best_p2, 40);
}

TEST(ResolveThreads, EnvironmentCap) {
    unsetenv("ALLOCOPT_THREADS");
    EXPECT_EQ(resolve_threads(3), 3u);
    EXPECT_GE(resolve_threads(0), 1u);
    setenv("ALLOCOPT_THREADS", "2", 1);
    EXPECT_EQ(resolve_threads(0), 2u);
    EXPECT_EQ(resolve_threads(8), 2u);
    EXPECT_EQ(resolve_threads(1), 1u);
    setenv("ALLOCOPT_THREADS", "garbage", 1);
    EXPECT_EQ(resolve_threads(3), 3u);
    unsetenv("ALLOCOPT_THREADS");
}

}  // namespace
