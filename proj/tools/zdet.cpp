// zdet: exact integer determinants with an adaptive engine, plus benchmark
// and statistical-verification harnesses.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "zdet/zdet.hpp"

using nlohmann::json;

namespace {

struct MatrixSource {
    std::string file;
    std::string gen = "random";  // identity | random | engineered | unimodular
    std::size_t n = 0;
    std::uint64_t lambda = 16;
};

zdet::IntMatrix make_matrix(const MatrixSource& src, std::uint64_t seed) {
    if (!src.file.empty()) return zdet::read_matrix_file(src.file);
    if (src.n == 0) throw zdet::ParseError("generator requires --n");
    if (src.gen == "identity") return zdet::IntMatrix::identity(src.n);
    if (src.gen == "random") return zdet::gen_random(src.n, src.lambda, seed);
    if (src.gen == "engineered") return zdet::gen_engineered(src.n, seed);
    if (src.gen == "unimodular") return zdet::gen_unimodular(src.n, seed);
    throw zdet::ParseError("unknown generator '" + src.gen + "'");
}

struct AlgoResult {
    mpz_class det;
    std::string path = "-";
    std::size_t solvings = 0;
    std::size_t primes = 0;
    std::size_t cra_pairs = 0;
    std::size_t k_bits = 0;
    std::map<std::string, double> timings_ms;
};

AlgoResult run_algo(const std::string& algo, const zdet::IntMatrix& a, const zdet::DetOptions& opts) {
    AlgoResult r;
    if (algo == "introspective") {
        zdet::DetReport rep = zdet::determinant(a, opts);
        r.det = rep.det;
        r.path = zdet::to_string(rep.path);
        r.solvings = rep.solvings;
        r.primes = rep.primes_used;
        r.cra_pairs = rep.cra_pairs;
        r.k_bits = rep.known_divisor_bits;
        r.timings_ms = rep.timings_ms;
        return r;
    }
    if (algo == "bareiss") {
        r.det = zdet::bareiss_det(a);
        r.path = "bareiss";
        return r;
    }
    zdet::Rng master(opts.seed);
    zdet::PrimeSampler sampler(std::uint64_t(1) << opts.prime_bits,
                               std::uint64_t(1) << (opts.prime_bits + 1), master.fork(2).next());
    if (algo == "certified-cra") {
        r.det = zdet::cra_det_certified(a, 1, sampler, opts.threads);
        r.path = "certified";
        r.primes = sampler.issued();
        return r;
    }
    if (algo == "et-cra") {
        r.det = zdet::cra_det_early(a, 1, opts.epsilon, sampler);
        r.path = "et";
        r.primes = sampler.issued();
        return r;
    }
    if (algo == "abbott") {  // one solving, then ET-CRA on det/K
        zdet::DetOptions o = opts;
        o.min_level = 1;
        o.max_level = 1;
        zdet::DetReport rep = zdet::determinant(a, o);
        r.det = rep.det;
        r.path = zdet::to_string(rep.path);
        r.solvings = rep.solvings;
        r.primes = rep.primes_used;
        r.k_bits = rep.known_divisor_bits;
        return r;
    }
    if (algo == "lif-only") {  // two solvings, then ET-CRA on det/K
        zdet::Rng solve_rng = master.fork(1);
        const mpz_class h = zdet::hadamard_bound(a);
        mpz_class k = 1;
        if (a.rows() > 0 && h >= 2) {
            const zdet::LifConfig cfg =
                zdet::lif_config_for(h, zdet::LifRegime::expected_constant_gap);
            try {
                k = zdet::lif(a, cfg, sampler, solve_rng);
                r.solvings = cfg.solve_count;
            } catch (const zdet::SingularMatrix&) {
                k = 1;
            }
        }
        r.det = zdet::cra_det_early(a, k, opts.epsilon, sampler) * k;
        r.path = "lif";
        r.primes = sampler.issued();
        r.k_bits = k == 1 ? 0 : mpz_sizeinbase(k.get_mpz_t(), 2);
        return r;
    }
    throw CLI::ValidationError("--algo", "unknown algorithm '" + algo + "'");
}

int cmd_det(const MatrixSource& src, const zdet::DetOptions& opts, const std::string& algo,
            const std::string& stats_path) {
    const zdet::IntMatrix a = make_matrix(src, opts.seed);
    if (!a.square()) {
        std::cerr << "zdet: matrix is not square (" << a.rows() << "x" << a.cols() << ")\n";
        return 2;
    }
    const double t0 = zdet::monotonic_seconds();
    const AlgoResult r = run_algo(algo, a, opts);
    const double ms = (zdet::monotonic_seconds() - t0) * 1e3;
    std::cout << r.det << "\n";

    if (!stats_path.empty()) {
        json stats;
        stats["n"] = a.rows();
        stats["algo"] = algo;
        stats["seed"] = opts.seed;
        stats["path"] = r.path;
        stats["solvings"] = r.solvings;
        stats["primes"] = r.primes;
        stats["cra_pairs"] = r.cra_pairs;
        stats["K_bits"] = r.k_bits;
        stats["det_bits"] = r.det == 0 ? 0 : mpz_sizeinbase(r.det.get_mpz_t(), 2);
        stats["epsilon"] = opts.epsilon;
        stats["ms"] = ms;
        stats["timings_ms"] = r.timings_ms;
        std::ofstream out(stats_path);
        if (!out) {
            std::cerr << "zdet: cannot write stats to '" << stats_path << "'\n";
            return 2;
        }
        out << stats.dump(2) << "\n";
    }
    return 0;
}

int cmd_bench(const std::vector<std::size_t>& sizes, const std::vector<std::string>& algos,
              const MatrixSource& base, std::size_t seeds, const zdet::DetOptions& opts) {
    std::cout << "n,algo,seed,ms,det_bits,solvings,primes\n";
    for (const std::size_t n : sizes) {
        for (std::size_t seed = 0; seed < seeds; ++seed) {
            MatrixSource src = base;
            src.n = n;
            const zdet::IntMatrix a = make_matrix(src, seed);
            std::optional<mpz_class> reference;
            for (const auto& algo : algos) {
                zdet::DetOptions o = opts;
                o.seed = seed;
                const double t0 = zdet::monotonic_seconds();
                const AlgoResult r = run_algo(algo, a, o);
                const double ms = (zdet::monotonic_seconds() - t0) * 1e3;
                if (!reference) {
                    reference = r.det;
                } else if (*reference != r.det) {
                    std::cerr << "zdet bench: DISAGREEMENT at n=" << n << " seed=" << seed
                              << " algo=" << algo << ": " << r.det << " vs " << *reference
                              << "\n";
                    return 4;
                }
                std::cout << n << ',' << algo << ',' << seed << ',' << ms << ','
                          << (r.det == 0 ? 0 : mpz_sizeinbase(r.det.get_mpz_t(), 2)) << ','
                          << r.solvings << ',' << r.primes << "\n";
            }
        }
    }
    return 0;
}

int cmd_verify(const std::string& suite, std::size_t trials, std::uint64_t seed, std::size_t n,
               std::uint64_t lambda) {
    std::vector<zdet::McResult> results;
    const bool all = suite == "all";
    if (all || suite == "rank") {
        results.push_back(zdet::mc_rank_bound(2, 2, 1, 2, 1, trials, seed));
        for (std::size_t j : {5, 6, 7})
            results.push_back(zdet::mc_rank_bound(8, 8, 8, 3, j, trials, seed + j));
    }
    if (all || suite == "factors") {
        const std::size_t t = std::min<std::size_t>(trials, 300);
        results.push_back(zdet::mc_factor_count(n, lambda, t, seed + 11));
        results.push_back(zdet::mc_factor_count(n, 1, t, seed + 12, 2));
    }
    if (all || suite == "perturbed") {
        results.push_back(zdet::mc_perturbed_det(6, 3, 64, 2, 3, trials, seed + 21));
        results.push_back(zdet::mc_perturbed_det(6, 3, 81, 3, 2, trials, seed + 22));
        results.push_back(zdet::mc_perturbed_det(6, 3, 100, 5, 2, trials, seed + 23));
    }
    if (all || suite == "lif-gap") {
        const std::size_t t = std::min<std::size_t>(trials, 300);
        results.push_back(zdet::mc_lif_gap(30, zdet::LifRegime::expected_constant_gap, t, seed + 31));
        results.push_back(zdet::mc_lif_gap(30, zdet::LifRegime::equality_one_third, t, seed + 32));
    }
    if (results.empty()) throw CLI::ValidationError("--suite", "unknown suite '" + suite + "'");

    bool ok = true;
    for (const auto& r : results) {
        std::cout << r.json() << "\n";
        ok = ok && r.pass;
    }
    std::cout << (ok ? "PASS" : "FAIL") << " (" << results.size() << " checks)\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact integer determinant engine"};
    app.require_subcommand(1);

    MatrixSource src;
    zdet::DetOptions opts;
    std::string algo = "introspective";
    std::string stats_path;
    std::string format = "text";
    long long imax = -1, imin = -1;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--seed", opts.seed, "random seed");
        c->add_option("--epsilon", opts.epsilon, "failure probability budget")
            ->check(CLI::Range(1e-300, 0.999999));
        c->add_option("--prime-bits", opts.prime_bits, "prime window exponent: primes in (2^b, 2^(b+1))")
            ->check(CLI::Range(10u, 30u));
        c->add_option("--threads", opts.threads, "worker threads for certified CRA batches")
            ->check(CLI::Range(1u, 256u));
    };

    CLI::App* det = app.add_subcommand("det", "print the determinant of a matrix");
    det->add_option("file", src.file, "matrix file (text format)");
    det->add_option("--gen", src.gen, "generator: identity|random|engineered|unimodular");
    det->add_option("--n", src.n, "generated matrix size");
    det->add_option("--lambda", src.lambda, "entry-set parameter for --gen random");
    det->add_option("--algo", algo, "introspective|bareiss|certified-cra|et-cra|abbott|lif-only");
    det->add_option("--imax", imax, "override the top trailing-factor level");
    det->add_option("--imin", imin, "override the lowest stabilization level");
    det->add_flag("--adaptive-switch", opts.adaptive_switch,
                  "use the timing-ratio stabilization rule");
    det->add_option("--stats", stats_path, "write a JSON run record to this path");
    det->add_option("--format", format, "output format (text)")->check(CLI::IsMember({"text"}));
    add_common(det);

    std::string sizes_csv = "40,80,120,160";
    std::string algos_csv = "introspective,certified-cra";
    std::size_t bench_seeds = 1;
    CLI::App* bench = app.add_subcommand("bench", "algorithm comparison, CSV on stdout");
    bench->add_option("--sizes", sizes_csv, "comma-separated matrix sizes");
    bench->add_option("--algos", algos_csv,
                      "comma-separated subset of introspective,certified-cra,et-cra,abbott,lif-only,bareiss");
    bench->add_option("--gen", src.gen, "generator: random|engineered|unimodular");
    bench->add_option("--lambda", src.lambda, "entry-set parameter for random matrices");
    bench->add_option("--seeds", bench_seeds, "seeds per size");
    bench->add_option("--imax", imax, "override the top trailing-factor level");
    bench->add_option("--imin", imin, "override the lowest stabilization level");
    add_common(bench);

    std::string suite = "all";
    std::size_t trials = 10000;
    std::size_t verify_n = 40;
    std::uint64_t verify_lambda = 4;
    CLI::App* verify = app.add_subcommand("verify", "Monte Carlo checks of the probability bounds");
    verify->add_option("--suite", suite, "rank|factors|perturbed|lif-gap|all");
    verify->add_option("--trials", trials, "trials per estimator (heavy suites cap at 300)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--n", verify_n, "matrix size for the factors suite");
    verify->add_option("--lambda", verify_lambda, "entry-set parameter for the factors suite");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (imax >= 0) opts.max_level = std::size_t(imax);
    if (imin >= 0) opts.min_level = std::size_t(imin);

    try {
        if (det->parsed()) return cmd_det(src, opts, algo, stats_path);
        if (bench->parsed()) {
            std::vector<std::size_t> sizes;
            for (const auto& tok : CLI::detail::split(sizes_csv, ','))
                sizes.push_back(std::size_t(std::stoull(tok)));
            std::vector<std::string> algos = CLI::detail::split(algos_csv, ',');
            return cmd_bench(sizes, algos, src, bench_seeds, opts);
        }
        if (verify->parsed()) return cmd_verify(suite, trials, opts.seed, verify_n, verify_lambda);
    } catch (const zdet::ParseError& e) {
        std::cerr << "zdet: " << e.what() << "\n";
        return 2;
    } catch (const zdet::PrimeExhausted& e) {
        std::cerr << "zdet: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "zdet: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "zdet: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
