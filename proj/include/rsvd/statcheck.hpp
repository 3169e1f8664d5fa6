#pragma once

#include <cstdint>
#include <vector>

#include "rsvd/dense_matrix.hpp"
#include "rsvd/sketch.hpp"

namespace rsvd {

struct KsReport {
    double statistic = 0.0;   // sup distance against the standard normal CDF
    int sample_size = 0;
    double bound_scale = 0.0; // sum |u_ik|^3 of the projecting row, when known
};

// Standard normal CDF via erfc; error well under 1e-12.
double normal_cdf(double x);

// Exact one-sample Kolmogorov-Smirnov statistic against the standard normal.
// Needs at least 100 finite samples. bound_scale is left zero; pipelines that
// know the projecting row fill it with bound_scale(u_row).
KsReport ks_vs_normal(const std::vector<double>& samples);

// The convergence-rate scale of the projected entry: sum |u_ik|^3.
double bound_scale(const std::vector<double>& u_row);

// reps independent draws of one projected sketch entry sum_k u_k omega_k,
// each rep on its own stream. StdBernoulli uses exact standardized entries.
// u_row must be unit length within 1e-10.
std::vector<double> projected_sketch_samples(const std::vector<double>& u_row,
                                             const SketchSpec& spec, int reps);

// Estimates correlations between a fixed set of distinct entries of the
// projected sketch u * omega and returns the largest absolute value. u must
// be orthogonal within 1e-10.
double cross_correlation_check(const DenseMatrix& u, const SketchSpec& spec,
                               int reps);

// A uniformly random unit vector, the row distribution of an orthonormalized
// Gaussian matrix; satisfies the delocalization condition with max entry of
// order sqrt(log n / n).
std::vector<double> normalized_gaussian_row(int n, std::uint64_t seed);

// Sylvester-Hadamard matrix scaled by n^{-1/2}: exactly orthogonal with all
// entries +-n^{-1/2}, so each row has bound_scale exactly n^{-1/2}. n must be
// a power of two.
DenseMatrix hadamard_orthogonal(int n);
std::vector<double> hadamard_row(int n, int row);

}  // namespace rsvd
