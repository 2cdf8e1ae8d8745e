#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coremax/maxsat.hpp"

namespace fs = std::filesystem;
using namespace coremax;

namespace {

constexpr int kExitOptimum = 0;
constexpr int kExitError = 1;
constexpr int kExitHardUnsat = 20;
constexpr int kExitTimeout = 124;

uint64_t seed_default() {
    if (const char* env = std::getenv("COREMAX_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

EncodeStrategy parse_strategy(const std::string& s) {
    if (s == "pairwise") return EncodeStrategy::Pairwise;
    if (s == "bdd") return EncodeStrategy::Bdd;
    if (s == "auto") return EncodeStrategy::Auto;
    throw UnsupportedError("unknown encoding '" + s + "'");
}

struct SolveOpts {
    std::string algo = "msu3";
    std::string encoding = "auto";
    std::string card;  // empty: per-algorithm default
    double timeout = 1000.0;
    long mem_mb = 2048;
    uint64_t seed = seed_default();
    bool stats = false;
    std::string input;
};

MaxSatConfig make_config(const SolveOpts& o) {
    MaxSatConfig cfg;
    if (o.encoding != "auto") cfg.encoding = parse_strategy(o.encoding);
    if (o.card == "equals")
        cfg.use_equals = true;
    else if (o.card == "atmost")
        cfg.use_equals = false;
    else if (!o.card.empty())
        throw UnsupportedError("unknown card mode '" + o.card + "'");
    cfg.timeout_s = o.timeout;
    cfg.mem_limit_bytes = o.mem_mb > 0 ? static_cast<size_t>(o.mem_mb) * 1024 * 1024 : 0;
    cfg.seed = o.seed;
    return cfg;
}

struct RunRecord {
    std::string instance;
    std::string algorithm;
    std::string status;  // optimum | timeout | memout | hard-unsat | error
    int optimum = -1;
    int cost = -1;
    double wall_time = 0.0;
    MaxSatStats stats;
};

RunRecord run_instance(const std::string& path, Algorithm algo, const MaxSatConfig& cfg) {
    RunRecord rec;
    rec.instance = path;
    rec.algorithm = algorithm_name(algo);
    double start = monotonic_seconds();
    try {
        Formula f = parse_dimacs_file(path);
        MaxSatResult res = solve_maxsat(f, algo, cfg);
        EvalCounts ev = evaluate(f, res.model);
        if (ev.satisfied != res.optimum) throw std::logic_error("model verification failed");
        rec.status = "optimum";
        rec.optimum = res.optimum;
        rec.cost = res.cost;
        rec.stats = res.stats;
    } catch (const TimeoutError&) {
        rec.status = "timeout";
    } catch (const MemoryBudgetError&) {
        rec.status = "memout";
    } catch (const HardClausesUnsatError&) {
        rec.status = "hard-unsat";
    } catch (const std::exception&) {
        rec.status = "error";
    }
    rec.wall_time = monotonic_seconds() - start;
    return rec;
}

int cmd_solve(const SolveOpts& o) {
    Algorithm algo;
    Formula f;
    try {
        algo = algorithm_from_name(o.algo);
        f = parse_dimacs_file(o.input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    for (const std::string& w : f.warnings()) std::cout << "c warning: " << w << "\n";
    std::cout << "c coremax " << o.algo << " " << o.input << "\n";

    MaxSatConfig cfg;
    try {
        cfg = make_config(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        MaxSatResult res = solve_maxsat(f, algo, cfg);
        EvalCounts ev = evaluate(f, res.model);
        if (ev.satisfied != res.optimum || ev.falsified != res.cost) {
            std::cerr << "error: model failed verification\n";
            return kExitError;
        }
        std::cout << "o " << res.cost << "\n";
        std::cout << "c satisfied " << res.optimum << "\n";
        if (o.stats) {
            const MaxSatStats& s = res.stats;
            std::cout << "c stats iterations=" << s.iterations << " cores=" << s.cores_found
                      << " blockers=" << s.total_blockers << " encoded_clauses=" << s.encoded_clauses
                      << " sat_calls=" << s.sat_calls
                      << " per_clause_atmost1=" << s.per_clause_atmost1
                      << " disjoint_cores=" << s.disjoint_cores
                      << " lower_bound=" << s.lower_bound << "\n";
        }
        std::cout << "s OPTIMUM FOUND\n";
        std::cout << "v";
        for (Var v = 1; v <= f.num_vars(); ++v)
            std::cout << " " << (res.model.value(v) ? v : -v);
        std::cout << "\n";
        return kExitOptimum;
    } catch (const HardClausesUnsatError&) {
        std::cout << "s UNSATISFIABLE\n";
        return kExitHardUnsat;
    } catch (const TimeoutError&) {
        std::cout << "s UNKNOWN\n";
        std::cout << "c timeout\n";
        return kExitTimeout;
    } catch (const MemoryBudgetError&) {
        std::cout << "s UNKNOWN\n";
        std::cout << "c memout\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_sat(const std::string& input, double timeout, uint64_t seed) {
    Formula f;
    try {
        f = parse_dimacs_file(input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::vector<int> tracked;
    for (int id = 0; id < f.size(); ++id) tracked.push_back(id);
    SolverConfig sc;
    sc.seed = seed;
    if (timeout >= 0) sc.deadline = monotonic_seconds() + timeout;
    SolveResult r = solve(f, tracked, sc);
    if (r.status == SolveStatus::Sat) {
        std::cout << "s SATISFIABLE\n";
        std::cout << "v";
        for (Var v = 1; v <= f.num_vars(); ++v) std::cout << " " << (r.model.value(v) ? v : -v);
        std::cout << "\n";
        return 10;
    }
    if (r.status == SolveStatus::Unsat) {
        std::cout << "s UNSATISFIABLE\n";
        std::cout << "c core";
        for (int id : r.core) std::cout << " " << id;
        std::cout << "\n";
        return 20;
    }
    std::cout << "s UNKNOWN\n";
    return kExitTimeout;
}

int cmd_card_size(const std::string& strategy, const std::string& rel_name, uint64_t r, uint64_t k,
                  uint64_t cap) {
    try {
        Rel rel;
        if (rel_name == "atmost")
            rel = Rel::AtMost;
        else if (rel_name == "atleast")
            rel = Rel::AtLeast;
        else if (rel_name == "equals")
            rel = Rel::Equals;
        else
            throw UnsupportedError("unknown relation '" + rel_name + "'");
        CardSize s = encode_size(parse_strategy(strategy), rel, r, k, cap);
        std::cout << strategy << " " << rel_name << " r=" << r << " k=" << k
                  << " clauses=" << s.clauses << " fresh_vars=" << s.fresh_vars << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

std::string csv_time(double t) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << t;
    return os.str();
}

int cmd_bench(const std::string& dir, const std::string& algos_csv, double timeout, long mem_mb,
              const std::string& prefix, uint64_t seed, int jobs) {
    std::vector<std::string> instances;
    try {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_regular_file()) continue;
            std::string ext = e.path().extension().string();
            if (ext == ".cnf" || ext == ".wcnf" || ext == ".dimacs")
                instances.push_back(e.path().string());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::sort(instances.begin(), instances.end());
    if (instances.empty()) {
        std::cerr << "error: no instances in '" << dir << "'\n";
        return kExitError;
    }

    std::vector<Algorithm> algos;
    std::vector<std::string> algo_names;
    std::stringstream as(algos_csv);
    std::string tok;
    while (std::getline(as, tok, ',')) {
        if (tok.empty()) continue;
        try {
            algos.push_back(algorithm_from_name(tok));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitError;
        }
        algo_names.push_back(tok);
    }
    if (algos.empty()) {
        std::cerr << "error: no algorithms given\n";
        return kExitError;
    }

    MaxSatConfig cfg;
    cfg.timeout_s = timeout;
    cfg.mem_limit_bytes = mem_mb > 0 ? static_cast<size_t>(mem_mb) * 1024 * 1024 : 0;
    cfg.seed = seed;

    // Row order: instance-major, algorithm order as given; fixed regardless
    // of how many workers ran.
    struct Task {
        size_t inst;
        size_t algo;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < instances.size(); ++i)
        for (size_t a = 0; a < algos.size(); ++a) tasks.push_back({i, a});
    std::vector<RunRecord> records(tasks.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            records[t] = run_instance(instances[tasks[t].inst], algos[tasks[t].algo], cfg);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::ofstream runs(prefix + "-runs.csv");
    runs << "instance,algorithm,status,optimum,cost,wall_time,iterations,cores_found,"
            "total_blockers,encoded_clauses,sat_calls\n";
    for (const RunRecord& r : records) {
        runs << r.instance << "," << r.algorithm << "," << r.status << ","
             << (r.status == "optimum" ? std::to_string(r.optimum) : "") << ","
             << (r.status == "optimum" ? std::to_string(r.cost) : "") << "," << csv_time(r.wall_time)
             << "," << r.stats.iterations << "," << r.stats.cores_found << ","
             << r.stats.total_blockers << "," << r.stats.encoded_clauses << "," << r.stats.sat_calls
             << "\n";
    }
    runs.close();

    std::ofstream cactus(prefix + "-cactus.csv");
    cactus << "algorithm,rank,seconds,flag\n";
    for (size_t a = 0; a < algos.size(); ++a) {
        std::vector<std::pair<double, bool>> times;  // (seconds, timed_out)
        for (size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].algo != a) continue;
            const RunRecord& r = records[t];
            bool to = r.status != "optimum" && r.status != "hard-unsat";
            times.push_back({to ? timeout : r.wall_time, to});
        }
        std::sort(times.begin(), times.end());
        for (size_t i = 0; i < times.size(); ++i)
            cactus << algo_names[a] << "," << (i + 1) << "," << csv_time(times[i].first) << ","
                   << (times[i].second ? "t" : "") << "\n";
    }
    cactus.close();

    for (size_t a = 0; a < algos.size(); ++a) {
        for (size_t b = a + 1; b < algos.size(); ++b) {
            std::ofstream sc(prefix + "-scatter-" + algo_names[a] + "-vs-" + algo_names[b] + ".csv");
            sc << "instance," << algo_names[a] << "," << algo_names[b] << "\n";
            for (size_t i = 0; i < instances.size(); ++i) {
                auto time_of = [&](size_t algo) {
                    const RunRecord& r = records[i * algos.size() + algo];
                    bool to = r.status != "optimum" && r.status != "hard-unsat";
                    return to ? timeout : r.wall_time;
                };
                sc << instances[i] << "," << csv_time(time_of(a)) << "," << csv_time(time_of(b))
                   << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coremax - unsatisfiability-based MaxSAT solver"};
    app.require_subcommand(1);

    SolveOpts so;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve a MaxSAT instance");
    solve_cmd->add_option("--algo", so.algo, "msu1|msu2|msu3|linear|brute")->capture_default_str();
    solve_cmd->add_option("--encoding", so.encoding, "pairwise|bdd|auto")->capture_default_str();
    solve_cmd->add_option("--card", so.card, "equals|atmost (default per algorithm)");
    solve_cmd->add_option("--timeout", so.timeout, "wall-clock limit, seconds")->capture_default_str();
    solve_cmd->add_option("--mem-mb", so.mem_mb, "clause-database budget, MB")->capture_default_str();
    solve_cmd->add_option("--seed", so.seed, "engine seed");
    solve_cmd->add_flag("--stats", so.stats, "print run statistics");
    solve_cmd->add_option("input", so.input, "DIMACS CNF/WCNF file")->required();

    std::string sat_input;
    double sat_timeout = 1000.0;
    uint64_t sat_seed = seed_default();
    CLI::App* sat_cmd = app.add_subcommand("sat", "decide satisfiability (debugging front-end)");
    sat_cmd->add_option("--timeout", sat_timeout, "wall-clock limit, seconds");
    sat_cmd->add_option("--seed", sat_seed, "engine seed");
    sat_cmd->add_option("input", sat_input, "DIMACS CNF file")->required();

    std::string cs_strategy = "bdd", cs_rel = "atmost";
    uint64_t cs_r = 0, cs_k = 1, cs_cap = 100000000;
    CLI::App* cs_cmd = app.add_subcommand("card-size", "cardinality encoding size report");
    cs_cmd->add_option("--strategy", cs_strategy, "pairwise|bdd|auto")->capture_default_str();
    cs_cmd->add_option("--rel", cs_rel, "atmost|atleast|equals")->capture_default_str();
    cs_cmd->add_option("-r", cs_r, "number of literals")->required();
    cs_cmd->add_option("-k", cs_k, "bound")->capture_default_str();
    cs_cmd->add_option("--cap", cs_cap, "refuse computations larger than this")->capture_default_str();

    std::string b_dir, b_algos = "msu2,msu3", b_prefix = "bench";
    double b_timeout = 1000.0;
    long b_mem = 2048;
    uint64_t b_seed = seed_default();
    int b_jobs = 1;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run the benchmark harness");
    bench_cmd->add_option("--dir", b_dir, "instance directory")->required();
    bench_cmd->add_option("--algos", b_algos, "comma-separated algorithm list")->capture_default_str();
    bench_cmd->add_option("--timeout", b_timeout, "per-run limit, seconds")->capture_default_str();
    bench_cmd->add_option("--mem-mb", b_mem, "per-run memory budget, MB")->capture_default_str();
    bench_cmd->add_option("--out", b_prefix, "output CSV prefix")->capture_default_str();
    bench_cmd->add_option("--seed", b_seed, "engine seed");
    bench_cmd->add_option("--jobs", b_jobs, "parallel runs")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) return cmd_solve(so);
    if (sat_cmd->parsed()) return cmd_sat(sat_input, sat_timeout, sat_seed);
    if (cs_cmd->parsed()) return cmd_card_size(cs_strategy, cs_rel, cs_r, cs_k, cs_cap);
    if (bench_cmd->parsed()) return cmd_bench(b_dir, b_algos, b_timeout, b_mem, b_prefix, b_seed, b_jobs);
    return kExitError;
}
