#include "rsvd/statcheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rsvd/errors.hpp"
#include "rsvd/kernels.hpp"
#include "rsvd/matrix_core.hpp"
#include "rsvd/rng.hpp"

namespace rsvd {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

KsReport ks_vs_normal(const std::vector<double>& samples) {
    if (samples.size() < 100)
        throw ConfigError("ks_vs_normal: need at least 100 samples");
    for (double s : samples)
        if (!std::isfinite(s)) throw ConfigError("ks_vs_normal: non-finite sample");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = normal_cdf(x[i]);
        d = std::max(d, std::max(f - double(i) / n, double(i + 1) / n - f));
    }
    KsReport r;
    r.statistic = d;
    r.sample_size = int(x.size());
    return r;
}

double bound_scale(const std::vector<double>& u_row) {
    double s = 0.0;
    for (double v : u_row) s += std::abs(v) * v * v;
    return s;
}

namespace {

void require_unit(const std::vector<double>& u_row) {
    double nrm2 = 0.0;
    for (double v : u_row) nrm2 += v * v;
    if (std::abs(std::sqrt(nrm2) - 1.0) > 1e-10)
        throw ConfigError("projected samples: row is not unit length");
}

// One projected entry sum_k u_k omega_k from a single-column sketch.
// Centered blocks evaluate the standardized entries exactly through the
// pattern sum and the full row sum.
double project_column(const std::vector<double>& u_row, const SketchBlock& blk,
                      double row_sum) {
    const int n = int(u_row.size());
    if (blk.is_dense)
        return kern::active_ops().dot(n, u_row.data(), blk.dense.col(0));
    const SparseSketch& s = blk.sparse;
    if (blk.centered) {
        double sp = 0.0;
        for (int idx = s.col_ptr[0]; idx < s.col_ptr[1]; ++idx)
            sp += u_row[s.row_idx[idx]];
        return (sp - blk.p * row_sum) * blk.std_scale;
    }
    double acc = 0.0;
    for (int idx = s.col_ptr[0]; idx < s.col_ptr[1]; ++idx)
        acc += u_row[s.row_idx[idx]] * s.values[idx];
    return acc;
}

}  // namespace

std::vector<double> projected_sketch_samples(const std::vector<double>& u_row,
                                             const SketchSpec& spec, int reps) {
    const int n = int(u_row.size());
    if (n < 1 || reps < 1)
        throw ConfigError("projected_sketch_samples: empty row or no reps");
    require_unit(u_row);
    double row_sum = 0.0;
    for (double v : u_row) row_sum += v;
    std::vector<double> out(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        SketchBlock blk = gen_sketch(spec, n, 1, r);
        out[std::size_t(r)] = project_column(u_row, blk, row_sum);
    }
    return out;
}

double cross_correlation_check(const DenseMatrix& u, const SketchSpec& spec,
                               int reps) {
    const int n = u.rows;
    if (u.cols != n || n < 2)
        throw ConfigError("cross_correlation_check: matrix must be square");
    if (reps < 2) throw ConfigError("cross_correlation_check: reps too small");
    {
        DenseMatrix g = matmul_tn(u, u);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) > 1e-10)
                    throw ConfigError("cross_correlation_check: matrix not orthogonal");
    }

    // Fixed probe set: a spread of rows crossed with two sketch columns gives
    // same-row, same-column, and disjoint entry pairs.
    std::vector<int> rows = {0, 1, n / 7, n / 3, n / 2, n - 2, n - 1};
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    const int ncols = 2;
    const int ne = int(rows.size()) * ncols;

    std::vector<std::vector<double>> rowvec(rows.size());
    std::vector<double> row_sum(rows.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rowvec[r].resize(std::size_t(n));
        for (int k = 0; k < n; ++k) rowvec[r][std::size_t(k)] = u(rows[r], k);
        for (double v : rowvec[r]) row_sum[r] += v;
    }

    std::vector<double> sum(std::size_t(ne), 0.0);
    std::vector<double> sum_sq(std::size_t(ne), 0.0);
    std::vector<double> cross(std::size_t(ne) * ne, 0.0);
    std::vector<double> vals(static_cast<std::size_t>(ne));
    for (int rep = 0; rep < reps; ++rep) {
        SketchBlock blk = gen_sketch(spec, n, ncols, rep);
        for (int c = 0; c < ncols; ++c) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                double v;
                if (blk.is_dense) {
                    v = kern::active_ops().dot(n, rowvec[r].data(),
                                               blk.dense.col(c));
                } else {
                    const SparseSketch& s = blk.sparse;
                    double sp = 0.0;
                    if (blk.centered) {
                        for (int idx = s.col_ptr[c]; idx < s.col_ptr[c + 1]; ++idx)
                            sp += rowvec[r][std::size_t(s.row_idx[idx])];
                        v = (sp - blk.p * row_sum[r]) * blk.std_scale;
                    } else {
                        for (int idx = s.col_ptr[c]; idx < s.col_ptr[c + 1]; ++idx)
                            sp += rowvec[r][std::size_t(s.row_idx[idx])] *
                                  s.values[idx];
                        v = sp;
                    }
                }
                vals[std::size_t(c * int(rows.size()) + int(r))] = v;
            }
        }
        for (int e = 0; e < ne; ++e) {
            sum[e] += vals[e];
            sum_sq[e] += vals[e] * vals[e];
            for (int f = e + 1; f < ne; ++f)
                cross[std::size_t(e) * ne + f] += vals[e] * vals[f];
        }
    }

    const double inv = 1.0 / double(reps);
    double worst = 0.0;
    for (int e = 0; e < ne; ++e) {
        double me = sum[e] * inv;
        double ve = sum_sq[e] * inv - me * me;
        for (int f = e + 1; f < ne; ++f) {
            double mf = sum[f] * inv;
            double vf = sum_sq[f] * inv - mf * mf;
            double cov = cross[std::size_t(e) * ne + f] * inv - me * mf;
            double den = std::sqrt(std::max(ve, 0.0) * std::max(vf, 0.0));
            if (den > 0.0) worst = std::max(worst, std::abs(cov) / den);
        }
    }
    return worst;
}

std::vector<double> normalized_gaussian_row(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("normalized_gaussian_row: n must be positive");
    Philox rng(seed, 0, 0);
    std::vector<double> v(static_cast<std::size_t>(n));
    double nrm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        v[std::size_t(i)] = rng.next_gaussian();
        nrm2 += v[std::size_t(i)] * v[std::size_t(i)];
    }
    double inv = 1.0 / std::sqrt(nrm2);
    for (double& x : v) x *= inv;
    return v;
}

DenseMatrix hadamard_orthogonal(int n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw ConfigError("hadamard_orthogonal: size must be a power of two");
    DenseMatrix h(n, n);
    const double s = 1.0 / std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            h(i, j) = (std::popcount(unsigned(i & j)) & 1) ? -s : s;
    return h;
}

std::vector<double> hadamard_row(int n, int row) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw ConfigError("hadamard_row: size must be a power of two");
    if (row < 0 || row >= n) throw ConfigError("hadamard_row: row out of range");
    std::vector<double> v(static_cast<std::size_t>(n));
    const double s = 1.0 / std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
        v[std::size_t(j)] = (std::popcount(unsigned(row & j)) & 1) ? -s : s;
    return v;
}

}  // namespace rsvd
