#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rsvd/errors.hpp"
#include "rsvd/sketch.hpp"

using namespace rsvd;

namespace {

SketchSpec spec_of(SketchKind k, double p, std::uint64_t seed) {
    SketchSpec s;
    s.kind = k;
    s.p = p;
    s.seed = seed;
    return s;
}

// Pooled entry moments of a sparse block, zeros included.
struct Moments {
    double mean = 0.0, mean_sq = 0.0;
    std::size_t nnz = 0;
};

Moments entry_moments(const SparseSketch& s) {
    Moments m;
    double sum = 0.0, sum_sq = 0.0;
    for (double v : s.values) {
        sum += v;
        sum_sq += v * v;
    }
    double total = double(s.rows) * s.cols;
    m.mean = sum / total;
    m.mean_sq = sum_sq / total;
    m.nnz = s.nnz();
    return m;
}

}  // namespace

TEST_CASE("sketch kind names round trip") {
    for (SketchKind k : {SketchKind::Gaussian, SketchKind::Bernoulli,
                         SketchKind::StdBernoulli, SketchKind::SparseSign,
                         SketchKind::SparseGaussian})
        CHECK(sketch_kind_from_name(sketch_kind_name(k)) == k);
    CHECK_THROWS_AS(sketch_kind_from_name("uniform"), ConfigError);
}

TEST_CASE("sparse blocks keep the CSC invariants") {
    const int n = 500, l = 40;
    for (SketchKind k : {SketchKind::Bernoulli, SketchKind::StdBernoulli,
                         SketchKind::SparseSign, SketchKind::SparseGaussian}) {
        SketchBlock blk = gen_sketch(spec_of(k, 0.1, 7), n, l, 0);
        REQUIRE(!blk.is_dense);
        const SparseSketch& s = blk.sparse;
        REQUIRE(int(s.col_ptr.size()) == l + 1);
        CHECK(s.col_ptr[0] == 0);
        CHECK(s.col_ptr[l] == int(s.nnz()));
        CHECK(s.values.size() == s.row_idx.size());
        for (int j = 0; j < l; ++j) {
            CHECK(s.col_ptr[j] <= s.col_ptr[j + 1]);
            for (int idx = s.col_ptr[j]; idx < s.col_ptr[j + 1]; ++idx) {
                CHECK(s.row_idx[idx] >= 0);
                CHECK(s.row_idx[idx] < n);
                if (idx > s.col_ptr[j]) CHECK(s.row_idx[idx] > s.row_idx[idx - 1]);
                CHECK(s.values[idx] != 0.0);
            }
        }
    }
}

TEST_CASE("generation is deterministic and streams are per column") {
    SketchSpec sp = spec_of(SketchKind::SparseSign, 0.05, 99);
    SketchBlock a = gen_sketch(sp, 300, 20, 3);
    SketchBlock b = gen_sketch(sp, 300, 20, 3);
    CHECK(a.sparse.row_idx == b.sparse.row_idx);
    CHECK(a.sparse.values == b.sparse.values);

    // A wider block starts with exactly the same columns.
    SketchBlock wide = gen_sketch(sp, 300, 30, 3);
    for (int j = 0; j < 20; ++j) {
        REQUIRE(wide.sparse.col_ptr[j + 1] == a.sparse.col_ptr[j + 1]);
        for (int idx = a.sparse.col_ptr[j]; idx < a.sparse.col_ptr[j + 1]; ++idx) {
            CHECK(wide.sparse.row_idx[idx] == a.sparse.row_idx[idx]);
            CHECK(wide.sparse.values[idx] == a.sparse.values[idx]);
        }
    }

    // A different block id gives a different pattern.
    SketchBlock other = gen_sketch(sp, 300, 20, 4);
    CHECK(other.sparse.row_idx != a.sparse.row_idx);
}

TEST_CASE("entry moments match the designed distributions") {
    const int n = 20000, l = 1;
    const double p = 0.1;

    SUBCASE("bernoulli pattern density") {
        SketchBlock blk = gen_sketch(spec_of(SketchKind::Bernoulli, p, 11), n, l, 0);
        for (double v : blk.sparse.values) CHECK(v == 1.0);
        double phat = double(blk.sparse.nnz()) / n;
        CHECK(std::fabs(phat - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
    SUBCASE("sparse sign has unit second moment") {
        SketchBlock blk = gen_sketch(spec_of(SketchKind::SparseSign, p, 12), n, l, 0);
        Moments m = entry_moments(blk.sparse);
        double inv_sqrt_p = 1.0 / std::sqrt(p);
        for (double v : blk.sparse.values)
            CHECK(std::fabs(v) == doctest::Approx(inv_sqrt_p));
        CHECK(std::fabs(m.mean) < 4.0 * std::sqrt(1.0 / n));
        CHECK(std::fabs(m.mean_sq - 1.0) < 4.0 * std::sqrt((1 / p - 1) / n));
    }
    SUBCASE("sparse gaussian has unit second moment") {
        SketchBlock blk =
            gen_sketch(spec_of(SketchKind::SparseGaussian, p, 13), n, l, 0);
        Moments m = entry_moments(blk.sparse);
        CHECK(std::fabs(m.mean) < 4.0 * std::sqrt(1.0 / n));
        CHECK(std::fabs(m.mean_sq - 1.0) < 4.0 * std::sqrt((3 / p - 1) / n));
    }
    SUBCASE("standardized bernoulli carries the pattern plus metadata") {
        SketchBlock blk =
            gen_sketch(spec_of(SketchKind::StdBernoulli, p, 14), n, l, 0);
        CHECK(blk.centered);
        CHECK(blk.std_scale == 1.0 / std::sqrt(p * (1.0 - p)));
        for (double v : blk.sparse.values) CHECK(v == 1.0);
    }
    SUBCASE("gaussian block is dense with standard moments") {
        SketchBlock blk = gen_sketch(spec_of(SketchKind::Gaussian, 0, 15), n, l, 0);
        REQUIRE(blk.is_dense);
        double sum = 0.0, sum_sq = 0.0;
        for (double v : blk.dense.data) {
            sum += v;
            sum_sq += v * v;
        }
        CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(double(n)));
        CHECK(std::fabs(sum_sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    }
}

TEST_CASE("sparse products agree with the densified oracle") {
    const int m = 23, n = 60, l = 9;
    DenseMatrix a = oracle::random_dense(m, n, 50);
    SketchBlock blk = gen_sketch(spec_of(SketchKind::SparseGaussian, 0.15, 51), n, l, 2);
    DenseMatrix dense = densify(blk.sparse);

    CHECK(oracle::max_abs_diff(sparse_dense_mul(a, blk.sparse),
                               oracle::matmul(a, dense)) < 1e-12);

    DenseMatrix w = oracle::random_dense(n, 7, 52);
    CHECK(oracle::max_abs_diff(dense_sparse_tmul(w, blk.sparse),
                               oracle::matmul_tn(w, dense)) < 1e-12);
}

TEST_CASE("centered product equals the standardized dense product") {
    const int m = 18, n = 64, l = 6;
    const double p = 0.2;
    DenseMatrix a = oracle::random_dense(m, n, 53);
    SketchBlock blk = gen_sketch(spec_of(SketchKind::StdBernoulli, p, 54), n, l, 1);

    std::vector<double> z(m, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) z[i] += a(i, j) * p;

    // a (b - p) equals sqrt(p(1-p)) times a times the standardized matrix.
    DenseMatrix got = centered_product(a, blk.sparse, z);
    for (double& v : got.data) v *= blk.std_scale;

    DenseMatrix want = oracle::matmul(a, oracle::standardized_dense(blk.sparse, p));
    CHECK(oracle::max_abs_diff(got, want) < 1e-11);
}

TEST_CASE("generator rejects invalid parameters") {
    CHECK_THROWS_AS(gen_sketch(spec_of(SketchKind::SparseSign, 0.0, 1), 10, 2, 0),
                    ConfigError);
    CHECK_THROWS_AS(gen_sketch(spec_of(SketchKind::Bernoulli, 1.0, 1), 10, 2, 0),
                    ConfigError);
    CHECK_THROWS_AS(gen_sketch(spec_of(SketchKind::Gaussian, 0.0, 1), 0, 2, 0),
                    ConfigError);
    CHECK_THROWS_AS(gen_sketch(spec_of(SketchKind::Gaussian, 0.0, 1), 10, 0, 0),
                    ConfigError);
}
