#include "rsvd/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>

#include "rsvd/kernels.hpp"
#include "rsvd/matrix_core.hpp"

namespace rsvd {

namespace {

int block_width(const SketchBlock& blk) {
    return blk.is_dense ? blk.dense.cols : blk.sparse.cols;
}

// A times the raw block, with the centering subtraction when active.
DenseMatrix apply_block(const DenseMatrix& a, const SketchBlock& blk,
                        const std::vector<double>& z_center) {
    if (blk.is_dense) return matmul(a, blk.dense);
    if (blk.centered) return centered_product(a, blk.sparse, z_center);
    return sparse_dense_mul(a, blk.sparse);
}

// w' times the raw block; the centered variant subtracts w'(p 1_n) from
// every column, mirroring the A-side centering trick.
DenseMatrix tmul_block(const DenseMatrix& w, const SketchBlock& blk) {
    DenseMatrix r = blk.is_dense ? matmul_tn(w, blk.dense)
                                 : dense_sparse_tmul(w, blk.sparse);
    if (blk.centered && w.cols > 0) {
        std::vector<double> wtw(w.cols);
        for (int c = 0; c < w.cols; ++c) {
            const double* col = w.col(c);
            double s = 0.0;
            for (int i = 0; i < w.rows; ++i) s += col[i];
            wtw[c] = blk.p * s;
        }
        const auto& ops = kern::active_ops();
        for (int c = 0; c < r.cols; ++c) ops.sub_vec(r.rows, wtw.data(), r.col(c));
    }
    return r;
}

// c -= a * b; takes b by value because it gets negated in place.
void sub_product(DenseMatrix& c, const DenseMatrix& a, DenseMatrix b) {
    const auto& ops = kern::active_ops();
    ops.scale(int(b.data.size()), -1.0, b.data.data());
    ops.gemm_nn(a.rows, b.cols, a.cols, a.data.data(), a.rows, b.data.data(),
                b.rows, c.data.data(), c.rows);
}

// [[old, off], [off', corner]] for the bordered z/t growth.
DenseMatrix grow_sym(const DenseMatrix& old, const DenseMatrix& off,
                     const DenseMatrix& corner) {
    int l = old.rows, b = corner.rows;
    DenseMatrix z(l + b, l + b);
    for (int j = 0; j < l; ++j) {
        std::copy(old.col(j), old.col(j) + l, z.col(j));
        for (int i = 0; i < b; ++i) z(l + i, j) = off(j, i);
    }
    for (int j = 0; j < b; ++j) {
        std::copy(off.col(j), off.col(j) + l, z.col(l + j));
        std::copy(corner.col(j), corner.col(j) + b, z.col(l + j) + l);
    }
    return z;
}

// [[old, 0], [x', l22]]: the Cholesky factor picks up the border rows.
DenseMatrix grow_chol(const DenseMatrix& old, const DenseMatrix& x,
                      const DenseMatrix& l22) {
    int l = old.rows, b = l22.rows;
    DenseMatrix lz(l + b, l + b);
    for (int j = 0; j < l; ++j) {
        std::copy(old.col(j), old.col(j) + l, lz.col(j));
        for (int i = 0; i < b; ++i) lz(l + i, j) = x(j, i);
    }
    for (int j = 0; j < b; ++j)
        std::copy(l22.col(j), l22.col(j) + b, lz.col(l + j) + l);
    return lz;
}

ApproxSvd drop_smallest(const ApproxSvd& svd, int drop) {
    ApproxSvd out;
    out.norm_a_sq = svd.norm_a_sq;
    out.blocks = svd.blocks;
    out.converged = svd.converged;
    double acc = svd.residual_sq;
    for (int i = 0; i < drop; ++i) acc += svd.sigma[i] * svd.sigma[i];
    out.residual_sq = acc;
    int l = svd.rank(), r = l - drop;
    out.sigma.assign(svd.sigma.begin() + drop, svd.sigma.end());
    if (int(svd.v_flagged.size()) == l)
        out.v_flagged.assign(svd.v_flagged.begin() + drop, svd.v_flagged.end());
    out.u = DenseMatrix(svd.u.rows, r);
    out.v = DenseMatrix(svd.v.rows, r);
    for (int j = 0; j < r; ++j) {
        std::copy(svd.u.col(drop + j), svd.u.col(drop + j) + svd.u.rows,
                  out.u.col(j));
        std::copy(svd.v.col(drop + j), svd.v.col(drop + j) + svd.v.rows,
                  out.v.col(j));
    }
    return out;
}

struct DefaultSource final : BlockSource {
    SketchSpec spec;
    explicit DefaultSource(const SketchSpec& s) : spec(s) {}
    SketchBlock next(int n, int b, int block_id) override {
        return gen_sketch(spec, n, b, block_id);
    }
};

FarpcaConfig resolve(const DenseMatrix& a, const FarpcaConfig& in,
                     bool fixed_precision) {
    if (a.rows < 1 || a.cols < 1) throw ConfigError("matrix must be non-empty");
    FarpcaConfig cfg = in;
    if (cfg.block == 0) cfg.block = default_block(a.rows, a.cols);
    if (cfg.block < 1) throw ConfigError("block size must be at least 1");
    if (cfg.block > std::min(a.rows, a.cols))
        throw ConfigError("block size exceeds matrix dimensions");
    if (cfg.max_iters == 0) cfg.max_iters = default_max_iters(a.cols, cfg.block);
    if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (cfg.power < 0) throw ConfigError("power must be non-negative");
    if (cfg.sketch.kind != SketchKind::Gaussian && cfg.sketch.p == 0.0)
        cfg.sketch.p = default_density(cfg.sketch.kind, a.cols);
    if (fixed_precision && !(cfg.eps > 0.0))
        throw ConfigError("fixed-precision mode needs a positive tolerance");
    return cfg;
}

// One accepted block, with degenerate redraws: attempt r shifts the block id
// by 1000 r, giving the sketch a fresh stream; after 3 redraws the failure
// propagates.
void process_block(FactorState& st, const DenseMatrix& a,
                   const FarpcaConfig& cfg, BlockSource& src,
                   const std::vector<double>& zc, int index) {
    constexpr int kMaxRetries = 3;
    for (int attempt = 0;; ++attempt) {
        try {
            SketchBlock raw = src.next(a.cols, cfg.block, index + 1000 * attempt);
            if (cfg.power >= 1) {
                DenseMatrix gd = power_iterate_block(st, a, raw, cfg.power,
                                                     cfg.shift_convention, zc);
                SketchBlock iterate;
                iterate.is_dense = true;
                iterate.dense = std::move(gd);
                accept_block(st, a, iterate, zc);
            } else {
                st.alpha = 0.0;
                accept_block(st, a, raw, zc);
            }
            return;
        } catch (const BlockDegenerate&) {
            if (attempt >= kMaxRetries) throw;
        }
    }
}

}  // namespace

FactorState make_state(const DenseMatrix& a, int block) {
    if (block < 1) throw ConfigError("block size must be at least 1");
    if (block > std::min(a.rows, a.cols))
        throw ConfigError("block size exceeds matrix dimensions");
    FactorState st;
    st.m = a.rows;
    st.n = a.cols;
    st.b = block;
    st.y = DenseMatrix(a.rows, 0);
    st.w = DenseMatrix(a.cols, 0);
    st.norm_a_sq = frob_norm_sq(a);
    return st;
}

std::vector<double> centering_column(const DenseMatrix& a, double p) {
    std::vector<double> z(a.rows, 0.0);
    const auto& ops = kern::active_ops();
    for (int c = 0; c < a.cols; ++c) ops.axpy(a.rows, p, a.col(c), z.data());
    return z;
}

DenseMatrix power_iterate_block(FactorState& st, const DenseMatrix& a,
                                const SketchBlock& blk, int power,
                                ShiftConvention conv,
                                const std::vector<double>& z_center) {
    st.alpha = 0.0;
    if (power <= 0) return blk.is_dense ? blk.dense : densify(blk.sparse);
    const auto& ops = kern::active_ops();
    const int b = block_width(blk);
    DenseMatrix gd;
    try {
        for (int k = 1; k <= power; ++k) {
            DenseMatrix wj;
            if (k == 1) {
                // The raw block only appears in the first pass; afterwards the
                // iterate is the orthonormal eigSVD factor and the centering
                // terms are gone.
                wj = matmul_tn(a, apply_block(a, blk, z_center));
                if (st.blocks > 0)
                    sub_product(wj, st.w,
                                chol_solve_factored(st.lz, tmul_block(st.w, blk)));
            } else {
                wj = matmul_tn(a, matmul(a, gd));
                if (st.blocks > 0)
                    sub_product(wj, st.w,
                                chol_solve_factored(st.lz, matmul_tn(st.w, gd)));
                if (st.alpha != 0.0)
                    for (int c = 0; c < b; ++c)
                        ops.axpy(wj.rows, -st.alpha, gd.col(c), wj.col(c));
            }
            EigSvdResult es = eig_svd(wj, 0.0);
            gd = std::move(es.u);
            if (k > 1) {
                double shat = conv == ShiftConvention::LastDiagonal
                                  ? es.sigma[b - 1]
                                  : es.sigma[0];
                if (st.alpha < shat) st.alpha = 0.5 * (shat + st.alpha);
            }
        }
    } catch (const RankDeficient& e) {
        throw BlockDegenerate(std::string("power pass degenerate: ") + e.what(),
                              st.blocks, st.residual(), st.norm_a_sq);
    }
    return gd;
}

void accept_block(FactorState& st, const DenseMatrix& a, const SketchBlock& blk,
                  const std::vector<double>& z_center) {
    if (block_width(blk) < 1) throw DimensionError("accept_block: empty block");
    DenseMatrix yj = apply_block(a, blk, z_center);
    DenseMatrix wj = matmul_tn(a, yj);
    const int lold = st.y.cols;
    DenseMatrix dblk = matmul_tn(yj, yj);
    DenseMatrix tblk = matmul_tn(wj, wj);

    if (lold == 0) {
        DenseMatrix l22;
        try {
            l22 = chol_factor(dblk, kPivotTol);
        } catch (const RankDeficient& e) {
            throw BlockDegenerate(std::string("first block degenerate: ") + e.what(),
                                  st.blocks, st.residual(), st.norm_a_sq);
        }
        DenseMatrix g = wj;
        trsm_right_lower_trans(l22, g);
        st.trace_acc += frob_norm_sq(g);
        st.y = std::move(yj);
        st.w = std::move(wj);
        st.z = std::move(dblk);
        st.t = std::move(tblk);
        st.lz = std::move(l22);
        st.blocks = 1;
        return;
    }

    DenseMatrix c = matmul_tn(st.y, yj);
    DenseMatrix f = matmul_tn(st.w, wj);
    DenseMatrix x = c;
    trsm_lower(st.lz, x);
    // Schur complement of the border; its Cholesky both vets the block and
    // extends the factor.
    DenseMatrix s = dblk;
    {
        DenseMatrix xtx = matmul_tn(x, x);
        for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] -= xtx.data[i];
    }
    double diag_ref = 0.0;
    for (int i = 0; i < st.z.rows; ++i) diag_ref = std::max(diag_ref, st.z(i, i));
    for (int i = 0; i < dblk.rows; ++i) diag_ref = std::max(diag_ref, dblk(i, i));
    DenseMatrix l22;
    try {
        l22 = chol_factor(s, kPivotTol, diag_ref);
    } catch (const RankDeficient& e) {
        throw BlockDegenerate(std::string("block border degenerate: ") + e.what(),
                              st.blocks, st.residual(), st.norm_a_sq);
    }
    // Residual drop of this block: || (W_j - W Z11^{-1} C) L22^{-T} ||_F^2.
    DenseMatrix mm = x;
    trsm_lower_trans(st.lz, mm);
    DenseMatrix r = wj;
    sub_product(r, st.w, std::move(mm));
    trsm_right_lower_trans(l22, r);
    st.trace_acc += frob_norm_sq(r);

    st.z = grow_sym(st.z, c, dblk);
    st.t = grow_sym(st.t, f, tblk);
    st.lz = grow_chol(st.lz, x, l22);
    st.y.append_cols(yj);
    st.w.append_cols(wj);
    st.blocks += 1;
}

ApproxSvd assemble_svd(const FactorState& st) {
    ApproxSvd out;
    out.norm_a_sq = st.norm_a_sq;
    out.residual_sq = st.residual();
    out.blocks = st.blocks;
    const int l = st.y.cols;
    if (l == 0) {
        out.u = DenseMatrix(st.m, 0);
        out.v = DenseMatrix(st.n, 0);
        return out;
    }
    const auto& ops = kern::active_ops();
    SymEigResult ez = sym_eig(st.z);
    double lmax = std::max(ez.values.back(), 0.0);
    DenseMatrix d = ez.vectors;
    for (int j = 0; j < l; ++j) {
        // Floor protects against a tiny eigenvalue rounding negative; real
        // degeneracy was already rejected at block acceptance.
        double lam = std::max(ez.values[j], lmax * 1e-31);
        ops.scale(l, 1.0 / std::sqrt(lam), d.col(j));
    }
    DenseMatrix core = matmul_tn(d, matmul(st.t, d));
    for (int j = 0; j < l; ++j)
        for (int i = j + 1; i < l; ++i) {
            double v = 0.5 * (core(i, j) + core(j, i));
            core(i, j) = v;
            core(j, i) = v;
        }
    SymEigResult ec = sym_eig(core);
    out.sigma.resize(l);
    for (int j = 0; j < l; ++j)
        out.sigma[j] = std::sqrt(std::max(ec.values[j], 0.0));
    DenseMatrix dv = matmul(d, ec.vectors);
    out.u = matmul(st.y, dv);
    out.v_flagged.assign(l, 0);
    double smax = out.sigma.back();
    DenseMatrix dvs = dv;
    for (int j = 0; j < l; ++j) {
        if (out.sigma[j] > 1e-14 * smax) {
            ops.scale(l, 1.0 / out.sigma[j], dvs.col(j));
        } else {
            // Pseudo-inverse convention: the direction is numerically
            // unresolved, so its v column is zeroed and flagged.
            ops.scale(l, 0.0, dvs.col(j));
            out.v_flagged[j] = 1;
        }
    }
    out.v = matmul(st.w, dvs);
    return out;
}

ApproxSvd run_fixed_precision(const DenseMatrix& a, const FarpcaConfig& cfg_in,
                              BlockSource* source) {
    FarpcaConfig cfg = resolve(a, cfg_in, true);
    DefaultSource fallback(cfg.sketch);
    BlockSource& src = source ? *source : fallback;

    FactorState st = make_state(a, cfg.block);
    double norm_a = std::sqrt(st.norm_a_sq);
    double eps_abs = cfg.relative ? cfg.eps * norm_a : cfg.eps;
    if (eps_abs <= 2.1e-7 * norm_a)
        std::cerr << "warning: tolerance " << eps_abs
                  << " is at or below the double-precision floor of the "
                     "residual indicator ("
                  << 2.1e-7 * norm_a << "); the stopping test may never fire\n";
    double eps_sq = eps_abs * eps_abs;

    std::vector<double> zc;
    if (cfg.sketch.kind == SketchKind::StdBernoulli)
        zc = centering_column(a, cfg.sketch.p);

    if (st.residual() <= eps_sq) {
        ApproxSvd out = assemble_svd(st);
        out.converged = true;
        return out;
    }
    bool converged = false;
    for (int j = 0; j < cfg.max_iters; ++j) {
        process_block(st, a, cfg, src, zc, j);
        if (st.residual() < eps_sq) {
            converged = true;
            break;
        }
    }
    ApproxSvd out = assemble_svd(st);
    out.converged = converged;
    if (!converged)
        throw ToleranceNotReached(
            "tolerance not reached after " + std::to_string(st.blocks) +
                " blocks; residual " + std::to_string(std::sqrt(out.residual_sq)),
            std::move(out));
    return out;
}

ApproxSvd run_fixed_rank(const DenseMatrix& a, int rank,
                         const FarpcaConfig& cfg_in, BlockSource* source) {
    FarpcaConfig cfg = resolve(a, cfg_in, false);
    if (rank < 1) throw ConfigError("rank must be at least 1");
    if (rank > std::min(a.rows, a.cols))
        throw ConfigError("rank exceeds matrix dimensions");
    DefaultSource fallback(cfg.sketch);
    BlockSource& src = source ? *source : fallback;

    FactorState st = make_state(a, cfg.block);
    std::vector<double> zc;
    if (cfg.sketch.kind == SketchKind::StdBernoulli)
        zc = centering_column(a, cfg.sketch.p);

    int nblocks = (rank + cfg.block - 1) / cfg.block;
    for (int j = 0; j < nblocks; ++j) process_block(st, a, cfg, src, zc, j);
    ApproxSvd out = assemble_svd(st);
    out.converged = true;
    // A rank that is not a block multiple rounds up; the overshoot comes off
    // the small end and its energy returns to the residual.
    int extra = nblocks * cfg.block - rank;
    if (extra > 0) out = drop_smallest(out, extra);
    return out;
}

ApproxSvd truncate_to_tolerance(const ApproxSvd& svd, double eps_rel,
                                double norm_a) {
    if (eps_rel < 0.0 || norm_a < 0.0)
        throw ConfigError("truncate_to_tolerance: negative tolerance or norm");
    const double target = eps_rel * norm_a;
    // Slack absorbs the rounding in residual_sq + sum sigma^2 ~ ||A||_F^2 so
    // eps_rel = 1 collapses to rank 0.
    const double budget = target * target * (1.0 + 1e-12);
    const int l = svd.rank();
    double acc = svd.residual_sq;
    int drop = 0;
    while (drop < l) {
        double next = acc + svd.sigma[drop] * svd.sigma[drop];
        if (next > budget) break;
        acc = next;
        ++drop;
    }
    return drop == 0 ? svd : drop_smallest(svd, drop);
}

CostEstimate estimate_cost(double m, double n, double l, int power, int block,
                           double p, SketchKind kind) {
    if (m < 1 || n < 1 || l < 1 || block < 1 || power < 0)
        throw ConfigError("estimate_cost: arguments must be positive");
    double pw = power, b = block;
    double common = 1.5 * (m + n) * l * l +
                    pw * (2.0 * m * n * l + n * l * l + 2.0 * n * l * b);
    double dense = 2.0 * m * n * l + common;
    double accel = dense;
    if (kind != SketchKind::Gaussian)
        accel = m * n * l + m * n * l * p + m * std::sqrt(n * l) + common;
    return {dense, accel, accel / dense};
}

double default_density(SketchKind kind, int n) {
    if (kind == SketchKind::Gaussian) return 0.0;
    double nn = double(n);
    if (kind == SketchKind::StdBernoulli)
        return std::max(1e-3, std::log(nn) / nn);
    return std::max(1e-3, 10.0 / nn);
}

int default_block(int m, int n) {
    int mn = std::min(m, n);
    // Clamped to the matrix size so the heuristic stays usable below the
    // scales it was tuned for.
    return std::min(std::min(std::max(20, mn / 100), 50), mn);
}

int default_max_iters(int n, int b) {
    return (n + 2 * b - 1) / (2 * b);
}

}  // namespace rsvd
