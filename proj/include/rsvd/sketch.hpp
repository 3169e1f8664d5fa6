#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsvd/dense_matrix.hpp"

namespace rsvd {

enum class SketchKind { Gaussian, Bernoulli, StdBernoulli, SparseSign, SparseGaussian };

const char* sketch_kind_name(SketchKind k);
SketchKind sketch_kind_from_name(const std::string& name);

struct SketchSpec {
    SketchKind kind = SketchKind::Gaussian;
    double p = 0.0;  // ignored for Gaussian
    std::uint64_t seed = 0;
};

// Compressed sparse column storage; row indices strictly increase within
// each column and stored values are nonzero.
struct SparseSketch {
    int rows = 0;
    int cols = 0;
    std::vector<int> col_ptr;  // size cols + 1
    std::vector<int> row_idx;
    std::vector<double> values;

    std::size_t nnz() const { return row_idx.size(); }
};

// One generated test-matrix block. Gaussian blocks are dense; the sparse
// kinds stay in CSC form. StdBernoulli is the raw Bernoulli pattern plus
// centering metadata; the standardized matrix itself is never materialized.
struct SketchBlock {
    bool is_dense = false;
    DenseMatrix dense;
    SparseSketch sparse;
    bool centered = false;   // StdBernoulli: consumers apply the centering trick
    double p = 0.0;
    double std_scale = 0.0;  // 1 / sqrt(p (1-p)) for StdBernoulli
};

// Deterministic in (spec, n, l, block_id); column streams are independent.
SketchBlock gen_sketch(const SketchSpec& spec, int n, int l, int block_id);

// a (m x n) times s (n x l); cost scales with nnz(s) * m.
DenseMatrix sparse_dense_mul(const DenseMatrix& a, const SparseSketch& s);
// w' s for dense w (n x l), sparse s (n x b) -> l x b.
DenseMatrix dense_sparse_tmul(const DenseMatrix& w, const SparseSketch& s);
// a b - z broadcast over columns, i.e. sqrt(p(1-p)) times the standardized
// product. z must equal a times the constant-p column.
DenseMatrix centered_product(const DenseMatrix& a, const SparseSketch& b,
                             const std::vector<double>& z);

// Dense expansion used by test oracles only.
DenseMatrix densify(const SparseSketch& s);

}  // namespace rsvd
