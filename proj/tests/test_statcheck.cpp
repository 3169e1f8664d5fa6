#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "rsvd/errors.hpp"
#include "rsvd/statcheck.hpp"

using namespace rsvd;

namespace {

SketchSpec spec_of(SketchKind k, double p, std::uint64_t seed) {
    SketchSpec s;
    s.kind = k;
    s.p = p;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("normal cdf reference points") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(normal_cdf(-1.96) == doctest::Approx(0.0249978951482205).epsilon(1e-10));
    CHECK(normal_cdf(3.0) == doctest::Approx(0.9986501019683699).epsilon(1e-12));
    for (double x : {-2.3, -0.4, 0.9, 3.1})
        CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ks statistic on degenerate samples is exact") {
    // All mass at zero: the empirical jump of 1 straddles Phi(0) = 0.5.
    std::vector<double> zeros(100, 0.0);
    CHECK(ks_vs_normal(zeros).statistic == doctest::Approx(0.5).epsilon(1e-15));

    // All mass far right: the empirical cdf is 0 where Phi is already 1.
    std::vector<double> right(100, 10.0);
    CHECK(ks_vs_normal(right).statistic == doctest::Approx(1.0).epsilon(1e-9));

    // Half far left, half far right: gap of one half at the origin.
    std::vector<double> split(100, -10.0);
    for (int i = 0; i < 50; ++i) split[i] = 10.0;
    CHECK(ks_vs_normal(split).statistic == doctest::Approx(0.5).epsilon(1e-9));

    KsReport rep = ks_vs_normal(zeros);
    CHECK(rep.sample_size == 100);
    CHECK(rep.bound_scale == 0.0);
}

TEST_CASE("ks needs at least 100 finite samples") {
    std::vector<double> few(99, 0.0);
    CHECK_THROWS_AS(ks_vs_normal(few), ConfigError);

    std::vector<double> tainted(100, 0.0);
    tainted[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ks_vs_normal(tainted), ConfigError);
    tainted[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ks_vs_normal(tainted), ConfigError);
}

TEST_CASE("ks accepts true normal draws") {
    std::vector<double> row = normalized_gaussian_row(2000, 21);
    for (double& v : row) v *= std::sqrt(2000.0);  // back to unit variance
    CHECK(ks_vs_normal(row).statistic < 0.04);
}

TEST_CASE("bound scale is exact on hadamard rows") {
    // Every entry is +-1/16, so sum |u|^3 = 256 / 16^3 = n^{-1/2}.
    std::vector<double> row = hadamard_row(256, 37);
    CHECK(bound_scale(row) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

    std::vector<double> e1(64, 0.0);
    e1[0] = 1.0;
    CHECK(bound_scale(e1) == 1.0);
}

TEST_CASE("hadamard matrix is orthogonal with uniform entries") {
    const int n = 8;
    DenseMatrix h = hadamard_orthogonal(n);
    const double mag = 1.0 / std::sqrt(double(n));
    for (double v : h.data) CHECK(std::fabs(v) == doctest::Approx(mag));

    DenseMatrix g = oracle::matmul_tn(h, h);
    CHECK(oracle::max_abs_diff(g, DenseMatrix::identity(n)) < 1e-14);

    for (int i = 0; i < n; ++i) {
        std::vector<double> row = hadamard_row(n, i);
        for (int j = 0; j < n; ++j) CHECK(row[j] == h(i, j));
    }

    CHECK_THROWS_AS(hadamard_orthogonal(6), ConfigError);
    CHECK_THROWS_AS(hadamard_orthogonal(0), ConfigError);
    CHECK_THROWS_AS(hadamard_row(6, 0), ConfigError);
}

TEST_CASE("normalized gaussian row is unit, delocalized and seeded") {
    const int n = 4096;
    std::vector<double> u = normalized_gaussian_row(n, 5);
    double nrm = 0.0, mx = 0.0;
    for (double v : u) {
        nrm += v * v;
        mx = std::max(mx, std::fabs(v));
    }
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mx < 0.1);  // entries of order sqrt(log n / n)

    CHECK(normalized_gaussian_row(n, 5) == u);
    CHECK(normalized_gaussian_row(n, 6) != u);
}

TEST_CASE("projected sketch samples are deterministic standardized draws") {
    const int n = 1024;
    std::vector<double> u = normalized_gaussian_row(n, 30);

    for (SketchKind kind : {SketchKind::Gaussian, SketchKind::StdBernoulli,
                            SketchKind::SparseSign, SketchKind::SparseGaussian}) {
        double p = kind == SketchKind::StdBernoulli ? std::log(double(n)) / n
                                                    : 10.0 / n;
        SketchSpec sp = spec_of(kind, kind == SketchKind::Gaussian ? 0.0 : p, 31);
        std::vector<double> s = projected_sketch_samples(u, sp, 1000);
        REQUIRE(int(s.size()) == 1000);
        CHECK(projected_sketch_samples(u, sp, 1000) == s);

        double mean = 0.0, var = 0.0;
        for (double v : s) mean += v;
        mean /= s.size();
        for (double v : s) var += (v - mean) * (v - mean);
        var /= s.size();
        CHECK(std::fabs(mean) < 0.13);
        CHECK(std::fabs(var - 1.0) < 0.2);

        // The projection of a delocalized row is close to normal.
        CHECK(ks_vs_normal(s).statistic < 0.05);
    }
}

TEST_CASE("projection requires a unit row") {
    std::vector<double> u = normalized_gaussian_row(256, 32);
    for (double& v : u) v *= 2.0;
    CHECK_THROWS_AS(
        projected_sketch_samples(u, spec_of(SketchKind::Gaussian, 0.0, 1), 200),
        ConfigError);
}

TEST_CASE("a localized row breaks normality and the ks test sees it") {
    // One-hot projection of a sparse sign sketch: the sample is zero with
    // probability 1-p, nowhere near gaussian.
    const int n = 512;
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    std::vector<double> s =
        projected_sketch_samples(e1, spec_of(SketchKind::SparseSign, 0.01, 33), 1000);
    CHECK(ks_vs_normal(s).statistic > 0.4);
}

TEST_CASE("cross correlations of distinct projected entries are small") {
    DenseMatrix h = hadamard_orthogonal(64);
    for (SketchKind kind : {SketchKind::Gaussian, SketchKind::StdBernoulli}) {
        SketchSpec sp = spec_of(kind, kind == SketchKind::Gaussian ? 0.0 : 0.1, 34);
        double c = cross_correlation_check(h, sp, 1500);
        CHECK(c > 0.0);
        CHECK(c < 0.15);
    }
}

TEST_CASE("cross correlation check requires an orthogonal matrix") {
    DenseMatrix ones(16, 16);
    for (double& v : ones.data) v = 0.25;
    CHECK_THROWS_AS(
        cross_correlation_check(ones, spec_of(SketchKind::Gaussian, 0.0, 1), 200),
        ConfigError);
}
