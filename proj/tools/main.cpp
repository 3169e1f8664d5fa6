#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsvd/bounds.hpp"
#include "rsvd/driver.hpp"
#include "rsvd/errors.hpp"
#include "rsvd/experiment.hpp"
#include "rsvd/matrix_core.hpp"
#include "rsvd/matrix_io.hpp"
#include "rsvd/sketch.hpp"
#include "rsvd/statcheck.hpp"
#include "rsvd/synthetic.hpp"

namespace {

using namespace rsvd;

// "slow:2000", "fast:4096:..." or a file path. Synthetic inputs share the
// run seed; the factor streams are fenced off from sketch streams, so the
// test matrix and the sketches stay independent.
DenseMatrix load_input(const std::string& input, const std::string& format,
                       std::uint64_t seed) {
    const std::size_t colon = input.find(':');
    if (colon != std::string::npos) {
        SyntheticSpec sp;
        sp.kind = synthetic_kind_from_name(input.substr(0, colon));
        std::string rest = input.substr(colon + 1);
        const std::size_t colon2 = rest.find(':');
        if (colon2 != std::string::npos) {
            sp.d = std::stoi(rest.substr(colon2 + 1));
            rest = rest.substr(0, colon2);
        }
        sp.n = std::stoi(rest);
        sp.seed = seed;
        return gen_synthetic(sp);
    }
    return load_matrix(input, matrix_format_from_name(format));
}

struct FactorizeOpts {
    std::string input;
    std::string format = "raw";
    std::string kind = "gaussian";
    double p = 0.0;
    int power = 1;
    int block = 0;
    double eps = 0.0;
    bool rel = false;
    std::uint64_t seed = 0;
    int rank = 0;
    std::string out;
    bool deterministic = false;
};

int run_factorize(const FactorizeOpts& o) {
    if ((o.eps > 0.0) == (o.rank > 0))
        throw ConfigError("factorize needs exactly one of --eps or --rank");
    const DenseMatrix a = load_input(o.input, o.format, o.seed);

    FarpcaConfig fc;
    fc.eps = o.eps;
    fc.relative = o.rel;
    fc.power = o.power;
    fc.block = o.block;
    fc.sketch.kind = sketch_kind_from_name(o.kind);
    fc.sketch.p = o.p;
    fc.sketch.seed = o.seed;

    const auto t0 = std::chrono::steady_clock::now();
    ApproxSvd svd;
    try {
        svd = o.rank > 0 ? run_fixed_rank(a, o.rank, fc)
                         : run_fixed_precision(a, fc);
    } catch (const ToleranceNotReached& e) {
        std::fprintf(stderr, "factorize: %s\n", e.what());
        std::fprintf(stderr, "partial rank %d, estimated relative error %.6e\n",
                     e.partial.rank(),
                     e.partial.norm_a_sq > 0.0
                         ? std::sqrt(std::max(0.0, e.partial.residual_sq) /
                                     e.partial.norm_a_sq)
                         : 0.0);
        return 3;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const double est =
        svd.norm_a_sq > 0.0
            ? std::sqrt(std::max(0.0, svd.residual_sq) / svd.norm_a_sq)
            : 0.0;
    const double err = relative_error(a, svd);
    std::printf("matrix %d x %d  sketch %s  P=%d  b=%d\n", a.rows, a.cols,
                sketch_kind_name(fc.sketch.kind), fc.power,
                fc.block > 0 ? fc.block : default_block(a.rows, a.cols));
    std::printf("rank %d  blocks %d  rel_err %.6e  est_err %.6e  time %.3f s\n",
                svd.rank(), svd.blocks, err, est, secs);
    if (!o.out.empty()) {
        save_matrix(svd.u, o.out + ".u.raw", MatrixFormat::RawF64);
        DenseMatrix s(svd.rank(), 1);
        for (int i = 0; i < svd.rank(); ++i) s(i, 0) = svd.sigma[std::size_t(i)];
        save_matrix(s, o.out + ".s.raw", MatrixFormat::RawF64);
        save_matrix(svd.v, o.out + ".v.raw", MatrixFormat::RawF64);
        std::printf("wrote %s.{u,s,v}.raw\n", o.out.c_str());
    }
    return 0;
}

struct BenchOpts {
    std::string config;
    std::string out;
};

int run_bench(const BenchOpts& o) {
    ExperimentConfig cfg = load_experiment_config(o.config);
    if (!o.out.empty()) cfg.out_prefix = o.out;
    const ExperimentReport report = run_experiment(cfg);
    std::printf("%-16s %-10s %-6s %-5s %-10s %7s %8s %12s %10s %8s\n",
                "algorithm", "eps", "rank", "P", "p", "trials", "mean_l",
                "mean_err", "mean_t", "success");
    for (const ExperimentCell& c : report.cells)
        std::printf("%-16s %-10.3g %-6d %-5d %-10.4g %7d %8.1f %12.4e %10.4f %8.2f\n",
                    c.algorithm.c_str(), c.eps, c.rank, c.power, c.p, c.trials,
                    c.mean_l, c.mean_err, c.mean_time, c.success_rate);
    std::printf("%zu runs, %zu cells\n", report.records.size(),
                report.cells.size());
    if (!cfg.out_prefix.empty())
        std::printf("wrote %s.csv, %s.json, %s_series.json\n",
                    cfg.out_prefix.c_str(), cfg.out_prefix.c_str(),
                    cfg.out_prefix.c_str());
    return 0;
}

struct BoundsOpts {
    std::string source;
    int k = 0;
    int h = 0;
    int power = 0;
    double u = 3.0;
    double t = 3.0;
    std::string format = "raw";
    std::string out;
};

std::vector<double> source_spectrum(const std::string& source,
                                    const std::string& format) {
    const std::size_t colon = source.find(':');
    if (colon != std::string::npos) {
        const SyntheticKind kind =
            synthetic_kind_from_name(source.substr(0, colon));
        const int n = std::stoi(source.substr(colon + 1));
        return synthetic_spectrum(kind, n);
    }
    // Exact spectrum through the Gram matrix of the smaller side.
    const DenseMatrix a = load_matrix(source, matrix_format_from_name(format));
    const DenseMatrix gram = a.rows >= a.cols
                                 ? matmul_tn(a, a)
                                 : matmul_nt(a, a);
    SymEigResult eig = sym_eig(gram);
    std::vector<double> sigma(eig.values.size());
    for (std::size_t i = 0; i < eig.values.size(); ++i)
        sigma[i] = std::sqrt(std::max(0.0, eig.values[eig.values.size() - 1 - i]));
    return sigma;
}

int run_bounds(const BoundsOpts& o) {
    const std::vector<double> sigma = source_spectrum(o.source, o.format);
    const int n = int(sigma.size());
    if (o.k < 2 || o.k >= n)
        throw ConfigError("bounds: need 2 <= k < spectrum length");
    BoundInputs in;
    in.k = o.k;
    in.h = o.h;
    in.power = o.power;
    in.u = o.u;
    in.t = o.t;
    in.tail.assign(sigma.begin() + o.k, sigma.end());

    std::printf("spectrum length %d, k=%d h=%d P=%d u=%g t=%g\n", n, o.k, o.h,
                o.power, o.u, o.t);
    const bool classical_prob = o.h >= 4 && o.u >= 1.0 && o.t >= 1.0;
    const BoundSet cl = classical_bounds(in, classical_prob);
    std::printf("classical : E frob <= %.6e  E spec <= %.6e\n",
                cl.frob_expected, cl.spec_expected);
    if (classical_prob)
        std::printf("            frob <= %.6e, spec <= %.6e with failure <= %.3e\n",
                    cl.frob_prob, cl.spec_prob, cl.fail_prob);
    else
        std::printf("            probabilistic form needs h >= 4 and u, t >= 1\n");
    const bool asym_prob = o.u > 0.0;
    const BoundSet as = asymptotic_bounds(in, asym_prob);
    std::printf("asymptotic: E frob <= %.6e  E spec <= %.6e\n",
                as.frob_expected, as.spec_expected);
    if (asym_prob)
        std::printf("            frob <= %.6e, spec <= %.6e with failure <= %.3e\n",
                    as.frob_prob, as.spec_prob, as.fail_prob);
    if (o.k + o.h < n) {
        const PinvLimits pl = pinv_norm_asymptotics(o.k + o.h, n);
        std::printf("sketch pseudo-inverse limits at %d x %d: frob %.6e, spec bound %.6e\n",
                    o.k + o.h, n, pl.frob_limit, pl.spec_limit_bound);
    }
    if (!o.out.empty()) {
        std::FILE* f = std::fopen(o.out.c_str(), "w");
        if (!f) throw FormatError("cannot open " + o.out + " for writing", 0);
        std::fprintf(f,
                     "{\n  \"k\": %d, \"h\": %d, \"power\": %d, \"u\": %.17g, "
                     "\"t\": %.17g,\n"
                     "  \"classical\": {\"frob_expected\": %.17g, "
                     "\"spec_expected\": %.17g, \"frob_prob\": %.17g, "
                     "\"spec_prob\": %.17g, \"fail_prob\": %.17g},\n"
                     "  \"asymptotic\": {\"frob_expected\": %.17g, "
                     "\"spec_expected\": %.17g, \"frob_prob\": %.17g, "
                     "\"spec_prob\": %.17g, \"fail_prob\": %.17g}\n}\n",
                     o.k, o.h, o.power, o.u, o.t, cl.frob_expected,
                     cl.spec_expected, cl.frob_prob, cl.spec_prob,
                     cl.fail_prob, as.frob_expected, as.spec_expected,
                     as.frob_prob, as.spec_prob, as.fail_prob);
        std::fclose(f);
        std::printf("wrote %s\n", o.out.c_str());
    }
    return 0;
}

struct StatcheckOpts {
    std::string kind = "stdbernoulli";
    double p = 0.0;
    std::uint64_t seed = 0;
    int n = 4096;
    int reps = 20000;
};

int run_statcheck(const StatcheckOpts& o) {
    SketchSpec spec;
    spec.kind = sketch_kind_from_name(o.kind);
    spec.seed = o.seed;
    spec.p = spec.kind == SketchKind::Gaussian
                 ? 0.0
                 : (o.p > 0.0 ? o.p : default_density(spec.kind, o.n));
    const std::vector<double> row = normalized_gaussian_row(o.n, o.seed + 1);
    const std::vector<double> samples =
        projected_sketch_samples(row, spec, o.reps);
    KsReport ks = ks_vs_normal(samples);
    ks.bound_scale = bound_scale(row);
    std::printf("projected row: kind=%s n=%d p=%.4g reps=%d\n",
                sketch_kind_name(spec.kind), o.n, spec.p, o.reps);
    std::printf("  ks=%.5f  bound_scale=%.5f  (n^-1/2=%.5f)\n", ks.statistic,
                ks.bound_scale, 1.0 / std::sqrt(double(o.n)));

    const int hn = 256;
    SketchSpec hspec = spec;
    if (hspec.kind != SketchKind::Gaussian && o.p <= 0.0)
        hspec.p = default_density(hspec.kind, hn);
    const DenseMatrix had = hadamard_orthogonal(hn);
    const double corr = cross_correlation_check(had, hspec, o.reps);
    std::printf("cross-correlation: n=%d reps=%d max|corr|=%.5f\n", hn, o.reps,
                corr);
    return 0;
}

struct GenOpts {
    std::string kind;
    int n = 0;
    std::string output;
    int d = 1;
    std::string format = "raw";
    std::uint64_t seed = 0;
};

int run_gen(const GenOpts& o) {
    SyntheticSpec sp;
    sp.kind = synthetic_kind_from_name(o.kind);
    sp.n = o.n;
    sp.d = o.d;
    sp.seed = o.seed;
    const DenseMatrix a = gen_synthetic(sp);
    save_matrix(a, o.output, matrix_format_from_name(o.format));
    std::printf("wrote %s (%d x %d, %s)\n", o.output.c_str(), a.rows, a.cols,
                synthetic_kind_name(sp.kind));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blocked adaptive randomized SVD toolkit"};
    app.require_subcommand(1);

    FactorizeOpts fo;
    CLI::App* fact = app.add_subcommand(
        "factorize", "low-rank factorization of a matrix file or synthetic "
                     "input (kind:n shorthand)");
    fact->add_option("input", fo.input, "matrix path or kind:n")->required();
    fact->add_option("--format", fo.format, "input format (mm/raw/ppm)");
    fact->add_option("--kind", fo.kind,
                     "sketch kind: gaussian, stdbernoulli, sparsesign, "
                     "sparsegaussian, bernoulli");
    fact->add_option("--p", fo.p, "sketch density (0 = recommended default)");
    fact->add_option("--power", fo.power, "power iteration passes");
    fact->add_option("--block", fo.block, "block size (0 = heuristic)");
    fact->add_option("--eps", fo.eps, "Frobenius tolerance");
    fact->add_flag("--rel", fo.rel, "eps is relative to ||A||_F");
    fact->add_option("--seed", fo.seed, "random seed");
    fact->add_option("--rank", fo.rank, "fixed-rank mode target");
    fact->add_option("--out", fo.out, "output prefix for factor files");
    fact->add_flag("--deterministic", fo.deterministic,
                   "kept for interface stability; runs are always "
                   "deterministic for a fixed seed");

    BenchOpts bo;
    CLI::App* bench =
        app.add_subcommand("bench", "run an experiment grid from a JSON config");
    bench->add_option("config", bo.config, "config JSON path")->required();
    bench->add_option("--out", bo.out, "override the report output prefix");

    BoundsOpts uo;
    CLI::App* bounds = app.add_subcommand(
        "bounds", "error bounds for a spectrum (file or kind:n shorthand)");
    bounds->add_option("source", uo.source, "matrix path or kind:n")->required();
    bounds->add_option("rank_k", uo.k, "target rank k")->required();
    bounds->add_option("oversampling", uo.h, "oversampling h")->required();
    bounds->add_option("--power", uo.power, "power iteration passes");
    bounds->add_option("--u", uo.u, "probabilistic deviation parameter u");
    bounds->add_option("--t", uo.t, "probabilistic deviation parameter t");
    bounds->add_option("--format", uo.format, "input format when source is a file");
    bounds->add_option("--out", uo.out, "write the bound set as JSON");

    StatcheckOpts so;
    CLI::App* stat = app.add_subcommand(
        "statcheck", "distributional checks of the sketch ensembles");
    stat->add_option("n", so.n, "projection dimension");
    stat->add_option("reps", so.reps, "sample count");
    stat->add_option("--kind", so.kind, "sketch kind");
    stat->add_option("--p", so.p, "sketch density (0 = recommended default)");
    stat->add_option("--seed", so.seed, "random seed");

    GenOpts go;
    CLI::App* gen =
        app.add_subcommand("gen", "generate a synthetic test matrix file");
    gen->add_option("kind", go.kind, "slow, fast or blockv")->required();
    gen->add_option("n", go.n, "dimension")->required();
    gen->add_option("output", go.output, "output path")->required();
    gen->add_option("d", go.d, "block count for blockv");
    gen->add_option("--format", go.format, "output format (mm/raw/ppm)");
    gen->add_option("--seed", go.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(fact)) return run_factorize(fo);
        if (app.got_subcommand(bench)) return run_bench(bo);
        if (app.got_subcommand(bounds)) return run_bounds(uo);
        if (app.got_subcommand(stat)) return run_statcheck(so);
        if (app.got_subcommand(gen)) return run_gen(go);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s (byte %zu)\n", e.what(),
                     e.byte_offset);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
