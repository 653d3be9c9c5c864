// Command-line front end for the allocation optimizer library.
//
// Subcommands:
//   solve            case solver (unconstrained, constant cap, or profile)
//   eval             score a concrete allocation (exact, closed form, or MC)
//   scan             P1-vs-P2 agreement scan over a (p, T) grid
//   curve            per-support objective curve as CSV
//   two              sequential two-object allocator
//   oracle-compare   case solver against the brute-force grid oracle
//
// Exit codes: 0 success, 2 for domain/infeasibility errors raised by the
// library, 1 for anything unexpected.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "allocopt/allocopt.hpp"

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw allocopt::domain_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw allocopt::domain_error(what + ": " + e.what());
    }
}

// Accepts inline JSON (starts with '[' or '{') or a path to a JSON file.
// Object form must carry the vector under object_key.
std::vector<double> load_vector_arg(const std::string& arg, const std::string& object_key,
                                    const std::string& what) {
    std::size_t i = 0;
    while (i < arg.size() && std::isspace(static_cast<unsigned char>(arg[i]))) ++i;
    const bool inline_json = i < arg.size() && (arg[i] == '[' || arg[i] == '{');
    json j = parse_json(inline_json ? arg : slurp(arg), what);
    if (j.is_object()) {
        if (!j.contains(object_key))
            throw allocopt::domain_error(what + ": object form needs key \"" + object_key +
                                         "\"");
        j = j[object_key];
    }
    if (!j.is_array())
        throw allocopt::domain_error(what + ": expected a JSON array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number())
            throw allocopt::domain_error(what + ": expected a JSON array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// Prints to stdout and, when requested, writes the same bytes to a file.
void emit(const std::string& text, const std::string& out_path) {
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw allocopt::domain_error("cannot write file: " + out_path);
        out << text;
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_sig12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct SolveArgs {
    long nodes = 0;
    double access_prob = 0;
    double budget = 0;
    double memory = 0;
    std::string profile;
    std::string out;
    bool has_memory = false;
    bool has_profile = false;
};

int run_solve(const SolveArgs& a) {
    const allocopt::SystemParams params{a.nodes, a.access_prob, a.budget};
    json result;
    std::string mode;
    if (a.has_profile) {
        const auto caps = load_vector_arg(a.profile, "caps", "--profile");
        result = allocopt::solve_arbitrary_profile(params,
                                                   allocopt::MemoryProfile::from_caps(caps));
        mode = "profile";
    } else if (a.has_memory) {
        result = allocopt::solve_constant_profile(params, a.memory);
        mode = "constant-cap";
    } else {
        result = allocopt::solve_p2(params);
        mode = "unconstrained";
    }
    json top = {{"params", params}, {"mode", mode}, {"result", result}};
    emit(dump(top), a.out);
    return 0;
}

struct EvalArgs {
    double access_prob = 0;
    std::string alloc;
    std::string method = "exact";
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1234567;
    std::string out;
};

allocopt::SuccessEstimate closed_form_estimate(const allocopt::Allocation& alloc, double p) {
    std::vector<double> pos;
    for (double x : alloc.amounts) {
        if (x < 0.0) throw allocopt::domain_error("allocation amounts must be nonnegative");
        if (x > 0.0) pos.push_back(x);
    }
    if (pos.empty())
        throw allocopt::domain_error("closed form: empty support, nothing to evaluate");
    std::sort(pos.begin(), pos.end(), std::greater<>());
    const long n = long(pos.size());
    bool head_equal = true;
    for (long i = 0; i + 1 < n; ++i)
        head_equal = head_equal && allocopt::nearly_equal(pos[std::size_t(i)], pos.front());
    if (!head_equal)
        throw allocopt::domain_error(
            "closed form: allocation is neither symmetric nor quasi-symmetric");
    const double M = pos.front();
    const double R = pos.back();
    double value;
    if (allocopt::nearly_equal(M, R)) {
        const long k = allocopt::ceil_snapped(1.0 / M);
        value = k > n ? 0.0 : allocopt::binom_tail(n, p, std::max(k, 0L));
    } else {
        value = allocopt::quasi_symmetric_success(n, M, R, p);
    }
    return {value, allocopt::EstimateMethod::closed_form, 0.0, 0};
}

int run_eval(const EvalArgs& a) {
    if (!(a.access_prob >= 0.0 && a.access_prob <= 1.0))
        throw allocopt::domain_error("--access-prob must be in [0, 1]");
    allocopt::Allocation alloc;
    alloc.amounts = load_vector_arg(a.alloc, "allocation", "--alloc");
    allocopt::SuccessEstimate est;
    if (a.method == "exact") {
        est = {allocopt::exact_success(alloc, a.access_prob),
               allocopt::EstimateMethod::exact_enumeration, 0.0, 0};
    } else if (a.method == "mc") {
        if (a.trials == 0) throw allocopt::domain_error("--trials must be positive");
        est = allocopt::monte_carlo_success(alloc, a.access_prob, a.trials, a.seed);
    } else if (a.method == "closed") {
        est = closed_form_estimate(alloc, a.access_prob);
    } else {
        throw allocopt::domain_error("--method must be exact, mc, or closed");
    }
    json top = {{"allocation", alloc},
                {"access_prob", allocopt::round_sig12(a.access_prob)},
                {"estimate", est}};
    emit(dump(top), a.out);
    return 0;
}

struct ScanArgs {
    long nodes = 0;
    double p_step = 0;
    double t_step = 0;
    unsigned threads = 0;
    std::string out;
};

int run_scan(const ScanArgs& a) {
    const allocopt::DisparityReport report = allocopt::disparity_scan(
        a.nodes, a.p_step, a.t_step, allocopt::resolve_threads(a.threads));
    emit(dump(json(report)), a.out);
    return 0;
}

struct CurveArgs {
    long nodes = 0;
    double access_prob = 0;
    double budget = 0;
    std::string out;
};

int run_curve(const CurveArgs& a) {
    const allocopt::SystemParams params{a.nodes, a.access_prob, a.budget};
    const auto rows = allocopt::objective_curve(params);
    std::ostringstream ss;
    ss << "n,p1_objective,p2_objective\n";
    for (const auto& r : rows)
        ss << r.n << ',' << format_sig12(r.p1_objective) << ','
           << format_sig12(r.p2_objective) << '\n';
    emit(ss.str(), a.out);
    return 0;
}

struct TwoArgs {
    double t1 = 0;
    double t2 = 0;
    double p1 = 0;
    double access_prob = 0;
    long nodes = 0;
    std::string profile;
    int granularity = 0;
    std::string out;
    bool has_nodes = false;
    bool has_profile = false;
    bool has_granularity = false;
};

int run_two(const TwoArgs& a) {
    std::vector<double> caps;
    if (a.has_profile) {
        caps = load_vector_arg(a.profile, "caps", "--profile");
    } else if (a.has_nodes) {
        if (a.nodes < 1) throw allocopt::domain_error("--nodes must be >= 1");
        caps.assign(std::size_t(a.nodes), a.t1 + a.t2);  // caps never bind
    } else {
        throw allocopt::domain_error("two: needs --profile or --nodes");
    }
    const allocopt::TwoObjectSpec spec{a.t1, a.t2, a.p1, 1.0 - a.p1, a.access_prob};
    const allocopt::TwoObjectOutcome outcome = allocopt::allocate_two_objects(caps, spec);
    json top = {{"caps", json(caps)},
                {"spec",
                 json{{"budget1", allocopt::round_sig12(a.t1)},
                      {"budget2", allocopt::round_sig12(a.t2)},
                      {"demand1", allocopt::round_sig12(spec.demand1)},
                      {"demand2", allocopt::round_sig12(spec.demand2)},
                      {"access_prob", allocopt::round_sig12(a.access_prob)}}},
                {"result", outcome}};
    if (a.has_granularity)
        top["exhaustive"] = allocopt::exhaustive_two_object(caps, spec, a.granularity);
    emit(dump(top), a.out);
    return 0;
}

struct OracleArgs {
    long nodes = 0;
    double access_prob = 0;
    double budget = 0;
    std::string profile;
    int granularity = 8;
    std::string dump_csv;
    std::string out;
    bool has_profile = false;
};

void write_points_csv(const std::string& path, long nodes, double unit,
                      const std::vector<std::pair<std::vector<int>, double>>& scored) {
    if (nodes > 4)
        throw allocopt::size_error("--dump-csv supports at most 4 nodes");
    std::ostringstream ss;
    for (long i = 1; i <= nodes; ++i) ss << 'a' << i << ',';
    ss << "score\n";
    for (const auto& [units, score] : scored) {
        for (int u : units) ss << format_sig12(double(u) * unit) << ',';
        ss << format_sig12(score) << '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw allocopt::domain_error("cannot write file: " + path);
    out << ss.str();
}

int run_oracle_compare(const OracleArgs& a) {
    const allocopt::SystemParams params{a.nodes, a.access_prob, a.budget};
    const bool collect = !a.dump_csv.empty();
    json top;
    if (a.has_profile) {
        const auto caps = load_vector_arg(a.profile, "caps", "--profile");
        const allocopt::ConjectureReport report =
            allocopt::conjecture_report(params, caps, a.granularity, collect);
        if (collect)
            write_points_csv(a.dump_csv, a.nodes, a.budget / double(a.granularity),
                             report.grid.scored);
        top = report;
    } else {
        const allocopt::SolveOutcome solver = allocopt::solve_p2(params);
        const allocopt::GridSearchResult grid =
            allocopt::grid_search_alloc(params, nullptr, a.granularity, collect);
        if (collect)
            write_points_csv(a.dump_csv, a.nodes, a.budget / double(a.granularity),
                             grid.scored);
        const double gap_abs = grid.best_score - solver.success_prob;
        top = {{"solver", solver},
               {"grid", grid},
               {"gap_abs", allocopt::round_sig12(gap_abs)},
               {"gap_rel", allocopt::round_sig12(
                               grid.best_score > 0.0 ? gap_abs / grid.best_score : 0.0)}};
    }
    emit(dump(top), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal distributed-storage allocations under node memory limits"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Run the case solver");
    solve->add_option("--nodes", solve_args.nodes, "Number of storage nodes")->required();
    solve->add_option("--access-prob", solve_args.access_prob,
                      "Per-node access probability p")
        ->required();
    solve->add_option("--budget", solve_args.budget, "Storage budget T")->required();
    auto* solve_mem = solve->add_option(
        "--memory", solve_args.memory, "Constant per-node memory cap M");
    auto* solve_prof = solve->add_option(
        "--profile", solve_args.profile,
        "Per-node caps: inline JSON array, or a JSON file (array or {\"caps\": [...]})");
    solve_prof->excludes(solve_mem);
    solve->add_option("--out", solve_args.out, "Also write the output to this file");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a concrete allocation");
    eval->add_option("--access-prob", eval_args.access_prob, "Per-node access probability p")
        ->required();
    eval->add_option("--alloc", eval_args.alloc,
                     "Allocation: inline JSON array, or a JSON file (array or "
                     "{\"allocation\": [...]})")
        ->required();
    eval->add_option("--method", eval_args.method, "exact, mc, or closed (default exact)");
    eval->add_option("--trials", eval_args.trials, "Monte Carlo trials (default 100000)");
    eval->add_option("--seed", eval_args.seed, "Monte Carlo seed (default 1234567)");
    eval->add_option("--out", eval_args.out, "Also write the output to this file");

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "P1-vs-P2 agreement scan over a (p, T) grid");
    scan->add_option("--nodes", scan_args.nodes, "Number of storage nodes")->required();
    scan->add_option("--p-step", scan_args.p_step, "Grid step in p")->required();
    scan->add_option("--t-step", scan_args.t_step, "Grid step in T")->required();
    scan->add_option("--threads", scan_args.threads,
                     "Worker threads (default: ALLOCOPT_THREADS or all cores)");
    scan->add_option("--out", scan_args.out, "Also write the output to this file");

    CurveArgs curve_args;
    auto* curve = app.add_subcommand("curve", "Objective curve over support sizes as CSV");
    curve->add_option("--nodes", curve_args.nodes, "Number of storage nodes")->required();
    curve->add_option("--access-prob", curve_args.access_prob,
                      "Per-node access probability p")
        ->required();
    curve->add_option("--budget", curve_args.budget, "Storage budget T")->required();
    curve->add_option("--out", curve_args.out, "Also write the output to this file");

    TwoArgs two_args;
    auto* two = app.add_subcommand("two", "Sequential two-object allocator");
    two->add_option("--t1", two_args.t1, "Budget for object 1")->required();
    two->add_option("--t2", two_args.t2, "Budget for object 2")->required();
    two->add_option("--p1", two_args.p1, "Demand probability for object 1")->required();
    two->add_option("--access-prob", two_args.access_prob, "Per-node access probability p")
        ->required();
    auto* two_nodes =
        two->add_option("--nodes", two_args.nodes, "Node count with non-binding caps");
    auto* two_prof = two->add_option(
        "--profile", two_args.profile,
        "Per-node caps: inline JSON array, or a JSON file (array or {\"caps\": [...]})");
    two_prof->excludes(two_nodes);
    auto* two_gran = two->add_option("--granularity", two_args.granularity,
                                     "Also run the joint grid oracle at this granularity");
    two->add_option("--out", two_args.out, "Also write the output to this file");

    OracleArgs oracle_args;
    auto* oracle =
        app.add_subcommand("oracle-compare", "Case solver against the grid oracle");
    oracle->add_option("--nodes", oracle_args.nodes, "Number of storage nodes")->required();
    oracle->add_option("--access-prob", oracle_args.access_prob,
                       "Per-node access probability p")
        ->required();
    oracle->add_option("--budget", oracle_args.budget, "Storage budget T")->required();
    auto* oracle_prof = oracle->add_option(
        "--profile", oracle_args.profile,
        "Per-node caps: inline JSON array, or a JSON file (array or {\"caps\": [...]})");
    oracle->add_option("--granularity", oracle_args.granularity,
                       "Grid granularity (default 8)");
    oracle->add_option("--dump-csv", oracle_args.dump_csv,
                       "Write every scored grid point to this CSV file (<= 4 nodes)");
    oracle->add_option("--out", oracle_args.out, "Also write the output to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) {
            solve_args.has_memory = solve_mem->count() > 0;
            solve_args.has_profile = solve_prof->count() > 0;
            return run_solve(solve_args);
        }
        if (eval->parsed()) return run_eval(eval_args);
        if (scan->parsed()) return run_scan(scan_args);
        if (curve->parsed()) return run_curve(curve_args);
        if (two->parsed()) {
            two_args.has_nodes = two_nodes->count() > 0;
            two_args.has_profile = two_prof->count() > 0;
            two_args.has_granularity = two_gran->count() > 0;
            return run_two(two_args);
        }
        if (oracle->parsed()) {
            oracle_args.has_profile = oracle_prof->count() > 0;
            return run_oracle_compare(oracle_args);
        }
    } catch (const allocopt::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
