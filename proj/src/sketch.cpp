#include "rsvd/sketch.hpp"

#include <cmath>

#include "rsvd/kernels.hpp"
#include "rsvd/rng.hpp"

namespace rsvd {

const char* sketch_kind_name(SketchKind k) {
    switch (k) {
        case SketchKind::Gaussian: return "gaussian";
        case SketchKind::Bernoulli: return "bernoulli";
        case SketchKind::StdBernoulli: return "stdbernoulli";
        case SketchKind::SparseSign: return "sparsesign";
        case SketchKind::SparseGaussian: return "sparsegaussian";
    }
    return "unknown";
}

SketchKind sketch_kind_from_name(const std::string& name) {
    if (name == "gaussian") return SketchKind::Gaussian;
    if (name == "bernoulli") return SketchKind::Bernoulli;
    if (name == "stdbernoulli") return SketchKind::StdBernoulli;
    if (name == "sparsesign") return SketchKind::SparseSign;
    if (name == "sparsegaussian") return SketchKind::SparseGaussian;
    throw ConfigError("unknown sketch kind: " + name);
}

namespace {

// Walks the nonzero pattern of one Bernoulli(p) column by geometric gaps:
// gap = 1 + floor(log u / log(1-p)) reproduces the i.i.d. entry pattern with
// row indices sorted and O(nnz) work.
template <typename Emit>
void walk_pattern(Philox& rng, int n, double p, Emit&& emit) {
    const double denom = std::log1p(-p);  // < 0 for p in (0,1)
    long long row = -1;
    for (;;) {
        double u = rng.next_unit();
        double ratio = std::log(u) / denom;
        if (ratio >= double(n)) break;  // gap larger than the remaining rows
        row += 1 + (long long)(ratio);
        if (row >= n) break;
        emit(int(row));
    }
}

}  // namespace

SketchBlock gen_sketch(const SketchSpec& spec, int n, int l, int block_id) {
    if (n < 1 || l < 1) throw ConfigError("gen_sketch: dimensions must be positive");
    SketchBlock blk;
    blk.p = spec.p;
    if (spec.kind == SketchKind::Gaussian) {
        blk.is_dense = true;
        blk.dense = DenseMatrix(n, l);
        for (int j = 0; j < l; ++j) {
            Philox rng(spec.seed, std::uint32_t(block_id), std::uint32_t(j));
            double* col = blk.dense.col(j);
            for (int i = 0; i < n; ++i) col[i] = rng.next_gaussian();
        }
        return blk;
    }
    if (!(spec.p > 0.0 && spec.p < 1.0))
        throw ConfigError("gen_sketch: sparse kinds require p in (0,1)");

    SparseSketch s;
    s.rows = n;
    s.cols = l;
    s.col_ptr.resize(l + 1, 0);
    s.row_idx.reserve(std::size_t(double(n) * l * spec.p * 1.3) + 16);
    s.values.reserve(s.row_idx.capacity());
    const double inv_sqrt_p = 1.0 / std::sqrt(spec.p);
    for (int j = 0; j < l; ++j) {
        Philox rng(spec.seed, std::uint32_t(block_id), std::uint32_t(j));
        walk_pattern(rng, n, spec.p, [&](int row) {
            s.row_idx.push_back(row);
            switch (spec.kind) {
                case SketchKind::Bernoulli:
                case SketchKind::StdBernoulli:
                    s.values.push_back(1.0);
                    break;
                case SketchKind::SparseSign:
                    s.values.push_back(rng.next_unit() < 0.5 ? -inv_sqrt_p
                                                             : inv_sqrt_p);
                    break;
                case SketchKind::SparseGaussian:
                    s.values.push_back(rng.next_gaussian() * inv_sqrt_p);
                    break;
                default: break;
            }
        });
        s.col_ptr[j + 1] = int(s.row_idx.size());
    }
    blk.sparse = std::move(s);
    if (spec.kind == SketchKind::StdBernoulli) {
        blk.centered = true;
        blk.std_scale = 1.0 / std::sqrt(spec.p * (1.0 - spec.p));
    }
    return blk;
}

DenseMatrix sparse_dense_mul(const DenseMatrix& a, const SparseSketch& s) {
    if (a.cols != s.rows) throw DimensionError("sparse_dense_mul: dimension mismatch");
    DenseMatrix c(a.rows, s.cols);
    const auto& ops = kern::active_ops();
    for (int j = 0; j < s.cols; ++j) {
        double* cj = c.col(j);
        for (int idx = s.col_ptr[j]; idx < s.col_ptr[j + 1]; ++idx)
            ops.axpy(a.rows, s.values[idx], a.col(s.row_idx[idx]), cj);
    }
    return c;
}

DenseMatrix dense_sparse_tmul(const DenseMatrix& w, const SparseSketch& s) {
    if (w.rows != s.rows) throw DimensionError("dense_sparse_tmul: dimension mismatch");
    DenseMatrix c(w.cols, s.cols);
    for (int j = 0; j < s.cols; ++j) {
        double* cj = c.col(j);
        for (int i = 0; i < w.cols; ++i) {
            const double* wi = w.col(i);
            double acc = 0.0;
            for (int idx = s.col_ptr[j]; idx < s.col_ptr[j + 1]; ++idx)
                acc += s.values[idx] * wi[s.row_idx[idx]];
            cj[i] = acc;
        }
    }
    return c;
}

DenseMatrix centered_product(const DenseMatrix& a, const SparseSketch& b,
                             const std::vector<double>& z) {
    if (z.size() != std::size_t(a.rows))
        throw DimensionError("centered_product: stale centering column");
    DenseMatrix c = sparse_dense_mul(a, b);
    const auto& ops = kern::active_ops();
    for (int j = 0; j < c.cols; ++j) ops.sub_vec(c.rows, z.data(), c.col(j));
    return c;
}

DenseMatrix densify(const SparseSketch& s) {
    DenseMatrix d(s.rows, s.cols);
    for (int j = 0; j < s.cols; ++j)
        for (int idx = s.col_ptr[j]; idx < s.col_ptr[j + 1]; ++idx)
            d(s.row_idx[idx], j) = s.values[idx];
    return d;
}

}  // namespace rsvd
