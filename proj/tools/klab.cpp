// klab: exponential-sum and squarefree-distribution laboratory.
//
// Subcommands: expsum, exceptions, bilinear, scan, sqfree-error,
// poisson-check, sweep, acceptance.  Exit codes: 0 success, 2 usage or
// configuration error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "klab/acceptance.hpp"
#include "klab/bilinear.hpp"
#include "klab/expsum.hpp"
#include "klab/harness.hpp"
#include "klab/modarith.hpp"
#include "klab/sqfree.hpp"
#include "klab/square_lemmas.hpp"

#ifndef KLAB_BUILD_ID
#define KLAB_BUILD_ID "unknown"
#endif

namespace {

using json = nlohmann::json;
using namespace klab;

struct OutputSink {
    std::string path;    // empty = stdout
    std::string format;  // csv | json

    void emit_table(const std::string& schema, const std::vector<std::string>& cols,
                    const std::vector<std::vector<std::string>>& rows) const {
        if (format == "json") {
            json arr = json::array();
            for (const auto& r : rows) {
                json obj;
                for (size_t i = 0; i < cols.size(); ++i) obj[cols[i]] = r[i];
                arr.push_back(obj);
            }
            json doc{{"schema", schema}, {"rows", arr}};
            if (path.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::ofstream out(path);
                if (!out) throw std::runtime_error("cannot open " + path);
                out << doc.dump(2) << "\n";
            }
            return;
        }
        if (path.empty()) {
            std::ostringstream ss;
            ss << "# schema=" << schema << "\n";
            for (size_t i = 0; i < cols.size(); ++i) ss << (i ? "," : "") << cols[i];
            ss << "\n";
            for (const auto& r : rows) {
                for (size_t i = 0; i < r.size(); ++i) ss << (i ? "," : "") << r[i];
                ss << "\n";
            }
            std::cout << ss.str();
        } else {
            ResultStore store(path, cols, schema);
            for (const auto& r : rows) store.write_row(r);
        }
    }
};

KernelVariant parse_kernel(const std::string& name) {
    if (name == "s") return KernelVariant::SRaw;
    if (name == "k1") return KernelVariant::K1;
    if (name == "k2") return KernelVariant::K2;
    if (name == "klk") return KernelVariant::Klk;
    throw CLI::ValidationError("--kernel must be one of s,k1,k2,klk");
}

// ---- expsum ---------------------------------------------------------------

int run_expsum(uint64_t qv, uint64_t m, uint64_t n, uint64_t t, const std::string& kernel,
               uint64_t a, uint64_t b, int k, bool row, const OutputSink& sink) {
    PrimeModulus q(qv);
    KernelVariant variant = parse_kernel(kernel);
    const std::vector<std::string> cols{"q",  "kernel", "a",  "b",     "m",     "n",
                                        "t",  "re",     "im", "abs",   "bound", "ratio"};
    std::vector<std::vector<std::string>> rows;
    auto push = [&](std::optional<uint64_t> mv, std::optional<uint64_t> nv,
                    std::optional<uint64_t> tv, Complex val, double bound) {
        rows.push_back({format_u64(qv), kernel,
                        variant == KernelVariant::SRaw ? "" : format_u64(a),
                        variant == KernelVariant::SRaw ? "" : format_u64(b),
                        mv ? format_u64(*mv) : "", nv ? format_u64(*nv) : "",
                        tv ? format_u64(*tv) : "", format_double(val.real()),
                        format_double(val.imag()), format_double(std::abs(val)),
                        format_double(bound), format_double(std::abs(val) / bound)});
    };

    double max_ratio = 0.0;
    if (variant == KernelVariant::SRaw) {
        double bound = 3.0 * std::sqrt(static_cast<double>(qv));
        if (row) {
            std::vector<Complex> r = s_row(m, q);
            for (uint64_t i = 0; i < qv; ++i) push(m, i, std::nullopt, r[i], bound);
        } else {
            push(m, n, std::nullopt, s_sum(m, n, q), bound);
        }
    } else {
        KernelSpec spec(variant, q, a, b, k);
        double bound = variant == KernelVariant::Klk ? static_cast<double>(k) : 3.0;
        if (row) {
            std::vector<Complex> tab = kernel_table(spec);
            uint64_t t0 = variant == KernelVariant::Klk ? 1 : 0;
            for (uint64_t i = t0; i < qv; ++i) push(std::nullopt, std::nullopt, i, tab[i], bound);
        } else {
            push(std::nullopt, std::nullopt, t, kernel_eval(spec, t), bound);
        }
    }
    for (const auto& r : rows) max_ratio = std::max(max_ratio, std::stod(r.back()));
    sink.emit_table("expsum-v1", cols, rows);
    std::fprintf(stderr, "expsum: %zu value(s), max |value|/bound = %s\n", rows.size(),
                 format_double(max_ratio).c_str());
    return 0;
}

// ---- exceptions -----------------------------------------------------------

int run_exceptions(uint64_t qv, const std::string& out) {
    PrimeModulus q(qv);
    ExceptionSet E = exception_set(q);
    json pairs = json::array();
    for (auto& [al, be] : E.pairs) pairs.push_back({al, be});
    json doc{{"q", qv}, {"cardinality", E.size()}, {"pairs", pairs}};
    if (out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open " + out);
        f << doc.dump(2) << "\n";
    }
    std::fprintf(stderr, "exceptions: q=%llu |E|=%zu (cap 14)\n",
                 static_cast<unsigned long long>(qv), E.size());
    return 0;
}

// ---- bilinear ---------------------------------------------------------------

int run_bilinear(uint64_t qv, int j, const std::string& kernel, uint64_t a, uint64_t b,
                 uint64_t M, uint64_t N, uint64_t n0, const std::string& alpha_mode,
                 const OutputSink& sink) {
    PrimeModulus q(qv);
    KernelVariant variant = parse_kernel(kernel);
    if (variant == KernelVariant::SRaw)
        throw CLI::ValidationError("bilinear expects a normalized kernel (k1, k2 or klk)");
    std::vector<Complex> alpha(M, Complex(1, 0));
    if (alpha_mode.rfind("random:", 0) == 0) {
        uint64_t seed = std::stoull(alpha_mode.substr(7));
        for (uint64_t i = 0; i < M; ++i) {
            TaskRng rng(seed, i);
            double phase = 2.0 * M_PI * static_cast<double>(rng.next() >> 11) / 9007199254740992.0;
            alpha[i] = std::polar(1.0, phase);
        }
    } else if (alpha_mode != "ones") {
        throw CLI::ValidationError("--alpha must be 'ones' or 'random:SEED'");
    }
    BilinearConfig cfg(KernelSpec(variant, q, a, b), j, M, n0, N, std::move(alpha));
    BilinearResult r = bilinear_sum(cfg);

    const std::vector<std::string> cols{"q",   "j",           "kernel",        "a",
                                        "b",   "M",           "N",             "n0",
                                        "re",  "im",          "abs",           "trivial_bound",
                                        "theorem_bound",      "ratio_trivial", "ratio_theorem",
                                        "hypotheses_ok"};
    sink.emit_table("bilinear-v1", cols,
                    {{format_u64(qv), std::to_string(j), kernel, format_u64(a), format_u64(b),
                      format_u64(M), format_u64(N), format_u64(n0), format_double(r.value.real()),
                      format_double(r.value.imag()), format_double(r.abs),
                      format_double(r.trivial_bound), format_double(r.theorem_bound),
                      format_double(r.ratio_trivial), format_double(r.ratio_theorem),
                      r.hypotheses_ok ? "1" : "0"}});
    std::fprintf(stderr, "bilinear: |S| = %s, vs trivial %s (x%s), vs theorem %s (x%s)%s\n",
                 format_double(r.abs).c_str(), format_double(r.trivial_bound).c_str(),
                 format_double(r.ratio_trivial).c_str(), format_double(r.theorem_bound).c_str(),
                 format_double(r.ratio_theorem).c_str(),
                 r.hypotheses_ok ? "" : " [outside theorem hypotheses]");
    for (const auto& w : r.warnings) std::fprintf(stderr, "bilinear: warning: %s\n", w.c_str());
    return 0;
}

// ---- scan -------------------------------------------------------------------

int run_scan(uint64_t qv, uint32_t B, int j, const std::string& kernel, uint64_t a, uint64_t b,
             uint64_t budget, uint64_t seed, uint64_t samples, uint64_t h_samples,
             bool diagonal_controls, unsigned workers, const OutputSink& sink) {
    PrimeModulus q(qv);
    KernelVariant variant = parse_kernel(kernel);
    ScanOptions opt;
    opt.budget = budget;
    opt.seed = seed;
    opt.sample_size = samples;
    opt.h_samples = h_samples;
    opt.workers = workers;
    opt.diagonal_controls = diagonal_controls;
    ScanReport rep = nondiagonal_scan(KernelSpec(variant, q, a, b), j, B, opt);
    if (rep.empty) {
        std::fprintf(stderr, "scan: no nondiagonal quadruple in the window (B=%u)\n", B);
        return 0;
    }
    const std::vector<std::string> cols{"q",  "j",         "B",     "b1",          "b2", "b3",
                                        "b4", "h",         "abs_sigma", "ratio",   "in_diagonal"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(rep.rows.size());
    for (const auto& r : rep.rows)
        rows.push_back({format_u64(qv), std::to_string(j), format_u64(B), format_u64(r.b.b[0]),
                        format_u64(r.b.b[1]), format_u64(r.b.b[2]), format_u64(r.b.b[3]),
                        format_u64(r.h), format_double(r.abs_sigma), format_double(r.ratio),
                        r.in_diagonal ? "1" : "0"});
    sink.emit_table("scan-v1", cols, rows);
    std::fprintf(stderr,
                 "scan: %s, %zu/%zu quadruples diagonal, evaluated %zu cells, "
                 "max |Sigma_%d|/q = %s at b=(%u,%u,%u,%u) h=%llu, mean = %s%s%s\n",
                 rep.exhaustive ? "exhaustive" : "sampled", rep.diagonal_members,
                 rep.total_quadruples, rep.evaluated_cells, j,
                 format_double(rep.max_ratio).c_str(), rep.argmax_b.b[0], rep.argmax_b.b[1],
                 rep.argmax_b.b[2], rep.argmax_b.b[3],
                 static_cast<unsigned long long>(rep.argmax_h),
                 format_double(rep.mean_ratio).c_str(),
                 diagonal_controls ? ", diagonal control max = " : "",
                 diagonal_controls ? format_double(rep.diag_max_ratio).c_str() : "");
    return 0;
}

// ---- sqfree-error -----------------------------------------------------------

int run_sqfree_error(uint64_t X, uint64_t qv, int64_t a, bool all_a, const OutputSink& sink) {
    PrimeModulus q(qv);
    MobiusTable mu = MobiusTable::build(X);
    std::vector<ErrorRecord> recs;
    if (all_a) {
        recs = error_term_all(X, q, mu);
    } else {
        if (a <= 0) throw CLI::ValidationError("pass --a (positive, coprime with q) or --all-a");
        recs.push_back(error_term(X, q, static_cast<uint64_t>(a), mu));
    }
    const std::vector<std::string> cols{"X",     "q",        "a",           "E_num", "phi_q",
                                        "E",     "E_decomp", "hooley_bound", "ratio"};
    std::vector<std::vector<std::string>> rows;
    double worst = 0.0;
    bool all_equal = true;
    for (const auto& r : recs) {
        worst = std::max(worst, r.ratio);
        all_equal = all_equal && r.E_direct == r.E_decomp;
        rows.push_back({format_u64(r.X), format_u64(r.q), format_u64(r.a),
                        format_i64(r.E_direct.num), format_i64(r.E_direct.phi),
                        format_double(r.E_direct.value()), format_double(r.E_decomp.value()),
                        format_double(r.hooley_bound), format_double(r.ratio)});
    }
    sink.emit_table("sqfree-error-v1", cols, rows);
    std::fprintf(stderr, "sqfree-error: %zu class(es), dual paths %s, max |E|/bound = %s\n",
                 recs.size(), all_equal ? "agree exactly" : "DISAGREE", format_double(worst).c_str());
    return all_equal ? 0 : 3;
}

// ---- poisson-check ----------------------------------------------------------

int run_poisson_check(uint64_t qv, double M, double N, uint64_t T, uint64_t a,
                      const OutputSink& sink) {
    PrimeModulus q(qv);
    double direct = s_v_direct(M, N, q, a);
    PoissonResult dual = s_v_poisson(M, N, q, a, T);
    double diff = std::abs(direct - dual.value.real());
    double tol = std::max(1e-4, 1e-3 * std::abs(direct));
    const std::vector<std::string> cols{"q",   "M",         "N",    "a",      "T",
                                        "direct", "dual_re", "dual_im", "diff", "tol",
                                        "tail_estimate", "terms"};
    sink.emit_table("poisson-v1", cols,
                    {{format_u64(qv), format_double(M), format_double(N), format_u64(a),
                      format_u64(T), format_double(direct), format_double(dual.value.real()),
                      format_double(dual.value.imag()), format_double(diff), format_double(tol),
                      format_double(dual.tail_estimate), format_u64(dual.terms)}});
    bool ok = diff <= tol;
    std::fprintf(stderr, "poisson-check: direct = %s, dual = %s, |diff| = %s (tol %s) -> %s\n",
                 format_double(direct).c_str(), format_double(dual.value.real()).c_str(),
                 format_double(diff).c_str(), format_double(tol).c_str(), ok ? "OK" : "MISMATCH");
    return ok ? 0 : 3;
}

// ---- sweep --------------------------------------------------------------------

int run_sweep(const std::string& config_path, const std::string& out_override,
              unsigned workers_override) {
    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "sweep: cannot read config file: %s\n", config_path.c_str());
        return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    SweepConfig cfg = SweepConfig::parse(ss.str());
    if (!out_override.empty()) cfg.out = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    if (cfg.out.empty()) {
        std::fprintf(stderr, "sweep: no output path (config key 'out' or --out)\n");
        return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepRecord> recs = exponent_sweep(cfg);
    write_sweep_csv(cfg, recs, cfg.out, KLAB_BUILD_ID);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    for (const auto& r : recs) worst = std::max(worst, r.hooley_ratio);
    std::fprintf(stderr,
                 "sweep: %zu records -> %s (config %s, seed %llu), max |E|/bound = %s, %.2fs\n",
                 recs.size(), cfg.out.c_str(), hex_u64(cfg.hash()).c_str(),
                 static_cast<unsigned long long>(cfg.seed), format_double(worst).c_str(), secs);
    return 0;
}

// ---- acceptance ----------------------------------------------------------------

int run_acceptance(const std::string& suite) {
    int failures = 0, ran = 0;
    for (const auto& check : acceptance_checks()) {
        if (suite != "all" && check.suite != suite) continue;
        ++ran;
        CheckResult r;
        try {
            r = check.run();
        } catch (const std::exception& e) {
            r = {check.suite, check.name, false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s/%s: %s\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d/%d checks passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"klab: exponential sums, square-detection lemmas, and squarefree "
                 "numbers in arithmetic progressions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("klab ") + KLAB_BUILD_ID);

    std::string out, format = "csv";
    auto add_sink = [&](CLI::App* sub) {
        sub->add_option("--out", out, "output file (default: stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    // expsum
    uint64_t qv = 101, m = 0, n = 0, t = 0, a = 1, b = 1;
    int k = 2;
    bool row = false;
    std::string kernel = "s";
    auto* expsum = app.add_subcommand("expsum", "evaluate S(m,n;q) or a normalized kernel");
    expsum->add_option("--q", qv, "odd prime modulus")->required();
    expsum->add_option("--m", m, "first argument of S");
    expsum->add_option("--n", n, "second argument of S");
    expsum->add_option("--t", t, "kernel argument (k1/k2/klk)");
    expsum->add_option("--kernel", kernel, "s|k1|k2|klk");
    expsum->add_option("--a", a, "kernel parameter a");
    expsum->add_option("--b", b, "kernel parameter b");
    expsum->add_option("--k", k, "hyper-Kloosterman order (1..3)");
    expsum->add_flag("--row", row, "emit the whole row over n (kernel s) or t");
    add_sink(expsum);

    // exceptions
    auto* exceptions = app.add_subcommand("exceptions", "exception pairs of f_{alpha,beta}");
    uint64_t eq = 101;
    std::string eout;
    exceptions->add_option("--q", eq, "odd prime modulus")->required();
    exceptions->add_option("--out", eout, "output JSON file (default: stdout)");

    // bilinear
    uint64_t bq = 101, M = 10, N = 10, n0 = 1;
    int j = 2;
    std::string bkernel = "k2", alpha_mode = "ones";
    uint64_t ba = 1, bb = 1;
    auto* bilinear = app.add_subcommand("bilinear", "bilinear sum sum_m sum_n alpha_m K(m n^j)");
    bilinear->add_option("--q", bq, "odd prime modulus")->required();
    bilinear->add_option("--j", j, "power of n (1 or 2)");
    bilinear->add_option("--kernel", bkernel, "k1|k2|klk");
    bilinear->add_option("--a", ba, "kernel parameter a");
    bilinear->add_option("--b", bb, "kernel parameter b");
    bilinear->add_option("--M", M, "m ranges over 1..M")->required();
    bilinear->add_option("--N", N, "window length")->required();
    bilinear->add_option("--n0", n0, "window start (default 1)");
    bilinear->add_option("--alpha", alpha_mode, "ones | random:SEED");
    add_sink(bilinear);

    // scan
    uint64_t sq = 53, budget = 2'000'000, seed = 1, samples = 500, h_samples = 50;
    uint32_t B = 6;
    int sj = 2;
    std::string skernel = "k2";
    uint64_t sa = 1, sb = 1;
    unsigned workers = 0;
    bool diag_controls = false;
    auto* scan = app.add_subcommand("scan", "Sigma_j ratio scan outside the diagonal set");
    scan->add_option("--q", sq, "odd prime modulus")->required();
    scan->add_option("--B", B, "quadruple window parameter")->required();
    scan->add_option("--j", sj, "power of (r+b) (1 or 2)");
    scan->add_option("--kernel", skernel, "k1|k2|klk");
    scan->add_option("--a", sa, "kernel parameter a");
    scan->add_option("--b", sb, "kernel parameter b");
    scan->add_option("--budget", budget, "exhaustive when |nondiag| * q <= budget");
    scan->add_option("--seed", seed, "sampling seed");
    scan->add_option("--samples", samples, "quadruple draws when sampling");
    scan->add_option("--h-samples", h_samples, "h draws when sampling");
    scan->add_option("--workers", workers, "worker threads (0 = auto, KLAB_WORKERS overrides)");
    scan->add_flag("--diagonal-control", diag_controls, "also evaluate the pure diagonal for contrast");
    add_sink(scan);

    // sqfree-error
    uint64_t X = 10'000, fq = 101;
    int64_t fa = -1;
    bool all_a = false;
    auto* sqerr = app.add_subcommand("sqfree-error", "progression error term E(X,q,a)");
    sqerr->add_option("--X", X, "count squarefree n <= X")->required();
    sqerr->add_option("--q", fq, "odd prime modulus")->required();
    sqerr->add_option("--a", fa, "residue class (coprime with q)");
    sqerr->add_flag("--all-a", all_a, "all unit classes");
    add_sink(sqerr);

    // poisson-check
    uint64_t pq = 101, T = 8, pa = 1;
    double pM = 10, pN = 10;
    auto* poisson = app.add_subcommand("poisson-check", "S_V direct vs truncated dual sum");
    poisson->add_option("--q", pq, "odd prime modulus")->required();
    poisson->add_option("--M", pM, "m-scale");
    poisson->add_option("--N", pN, "n-scale");
    poisson->add_option("--T", T, "truncation multiple of q/M and q/N");
    poisson->add_option("--a", pa, "residue class (coprime with q)");
    add_sink(poisson);

    // sweep
    std::string config_path, sweep_out;
    unsigned sweep_workers = 0;
    auto* sweep = app.add_subcommand("sweep", "exponent sweep over (X, theta) grid");
    sweep->add_option("--config", config_path, "flat key=value config file")->required();
    sweep->add_option("--out", sweep_out, "override the config output path");
    sweep->add_option("--workers", sweep_workers, "override the config worker count");

    // acceptance
    std::string suite = "all";
    auto* acc = app.add_subcommand("acceptance", "run the verification checks");
    acc->add_option("suite", suite, "identities|lemmas|bilinear|sqfree|all")
        ->check(CLI::IsMember(acceptance_suites()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        OutputSink sink{out, format};
        if (expsum->parsed()) return run_expsum(qv, m, n, t, kernel, a, b, k, row, sink);
        if (exceptions->parsed()) return run_exceptions(eq, eout);
        if (bilinear->parsed())
            return run_bilinear(bq, j, bkernel, ba, bb, M, N, n0, alpha_mode, sink);
        if (scan->parsed())
            return run_scan(sq, B, sj, skernel, sa, sb, budget, seed, samples, h_samples,
                            diag_controls, workers, sink);
        if (sqerr->parsed()) return run_sqfree_error(X, fq, fa, all_a, sink);
        if (poisson->parsed()) return run_poisson_check(pq, pM, pN, T, pa, sink);
        if (sweep->parsed()) return run_sweep(config_path, sweep_out, sweep_workers);
        if (acc->parsed()) return run_acceptance(suite);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {  // precondition violations are usage errors
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
