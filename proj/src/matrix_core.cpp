#include "rsvd/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsvd/kernels.hpp"

namespace rsvd {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw DimensionError(msg);
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.rows, "matmul: inner dimensions differ");
    DenseMatrix c(a.rows, b.cols);
    if (!a.empty() && !b.empty())
        kern::active_ops().gemm_nn(a.rows, b.cols, a.cols, a.data.data(), a.rows,
                                   b.data.data(), b.rows, c.data.data(), c.rows);
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows == b.rows, "matmul_tn: inner dimensions differ");
    DenseMatrix c(a.cols, b.cols);
    if (!a.empty() && !b.empty())
        kern::active_ops().gemm_tn(a.cols, b.cols, a.rows, a.data.data(), a.rows,
                                   b.data.data(), b.rows, c.data.data(), c.rows);
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.cols, "matmul_nt: inner dimensions differ");
    DenseMatrix c(a.rows, b.rows);
    if (!a.empty() && !b.empty())
        kern::active_ops().gemm_nt(a.rows, b.rows, a.cols, a.data.data(), a.rows,
                                   b.data.data(), b.rows, c.data.data(), c.rows);
    return c;
}

double frob_norm_sq(const DenseMatrix& m) {
    return kern::active_ops().sum_sq(int(m.data.size()), m.data.data());
}

SymEigResult sym_eig(const DenseMatrix& m) {
    require(m.rows == m.cols, "sym_eig: matrix not square");
    int n = m.rows;
    double fro = std::sqrt(frob_norm_sq(m));
    for (int j = 0; j < n; ++j)
        for (int i = j + 1; i < n; ++i)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(fro, 1.0))
                throw DimensionError("sym_eig: input not symmetric");

    DenseMatrix a = m;
    DenseMatrix v = DenseMatrix::identity(n);
    const auto& ops = kern::active_ops();
    const double stop = 1e-14 * fro;
    const int max_sweeps = 30;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = j + 1; i < n; ++i) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    if (n > 1) {
        for (; sweep < max_sweeps; ++sweep) {
            if (off_norm() <= stop) break;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    double apq = a(p, q);
                    if (std::abs(apq) <= stop / (double(n) * n)) continue;
                    double app = a(p, p), aqq = a(q, q);
                    double tau = (aqq - app) / (2.0 * apq);
                    double t = (tau >= 0.0 ? 1.0 : -1.0) /
                               (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    double c = 1.0 / std::sqrt(1.0 + t * t);
                    double s = t * c;
                    // Two-sided rotation: columns are contiguous, rows strided.
                    ops.rot(n, a.col(p), a.col(q), c, s);
                    for (int i = 0; i < n; ++i) {
                        double xp = a(p, i), xq = a(q, i);
                        a(p, i) = c * xp - s * xq;
                        a(q, i) = s * xp + c * xq;
                    }
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    ops.rot(n, v.col(p), v.col(q), c, s);
                }
            }
        }
        if (sweep == max_sweeps && off_norm() > stop)
            throw ConvergenceFailure("sym_eig: jacobi sweeps exhausted");
    }

    SymEigResult res;
    res.values.resize(n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return a(x, x) < a(y, y); });
    res.vectors = DenseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        res.values[j] = a(order[j], order[j]);
        std::copy(v.col(order[j]), v.col(order[j]) + n, res.vectors.col(j));
    }
    return res;
}

DenseMatrix chol_factor(const DenseMatrix& z, double pivot_tol, double diag_ref) {
    require(z.rows == z.cols, "chol_factor: matrix not square");
    int n = z.rows;
    DenseMatrix l(n, n);
    double max_diag = diag_ref;
    if (max_diag <= 0.0)
        for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, z(i, i));
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) l(i, j) = z(i, j);
    const auto& ops = kern::active_ops();
    // Right-looking: every trailing update is an axpy on a contiguous column
    // segment.
    for (int j = 0; j < n; ++j) {
        double d = l(j, j);
        if (d <= pivot_tol * max_diag)
            throw RankDeficient("chol_factor: non-positive pivot");
        double ljj = std::sqrt(d);
        l(j, j) = ljj;
        if (j + 1 < n) ops.scale(n - j - 1, 1.0 / ljj, l.col(j) + j + 1);
        for (int c = j + 1; c < n; ++c)
            ops.axpy(n - c, -l(c, j), l.col(j) + c, l.col(c) + c);
    }
    return l;
}

void trsm_lower(const DenseMatrix& l, DenseMatrix& x) {
    int n = l.rows;
    const auto& ops = kern::active_ops();
    for (int c = 0; c < x.cols; ++c) {
        double* xc = x.col(c);
        for (int j = 0; j < n; ++j) {
            xc[j] /= l(j, j);
            if (j + 1 < n) ops.axpy(n - j - 1, -xc[j], l.col(j) + j + 1, xc + j + 1);
        }
    }
}

void trsm_lower_trans(const DenseMatrix& l, DenseMatrix& x) {
    int n = l.rows;
    const auto& ops = kern::active_ops();
    for (int c = 0; c < x.cols; ++c) {
        double* xc = x.col(c);
        for (int j = n - 1; j >= 0; --j) {
            const double* lj = l.col(j);
            double s = xc[j] - ops.dot(n - j - 1, lj + j + 1, xc + j + 1);
            xc[j] = s / lj[j];
        }
    }
}

void trsm_right_lower_trans(const DenseMatrix& l, DenseMatrix& x) {
    // x <- x l'^{-1}: forward sweep over columns, each update is an axpy on a
    // full column so the traffic stays vectorized.
    int b = l.rows;
    require(x.cols == b, "trsm_right_lower_trans: dimension mismatch");
    const auto& ops = kern::active_ops();
    for (int c = 0; c < b; ++c) {
        double* xc = x.col(c);
        for (int p = 0; p < c; ++p)
            ops.axpy(x.rows, -l(c, p), x.col(p), xc);
        ops.scale(x.rows, 1.0 / l(c, c), xc);
    }
}

DenseMatrix chol_solve_factored(const DenseMatrix& l, const DenseMatrix& rhs) {
    require(l.rows == rhs.rows, "chol_solve: dimension mismatch");
    DenseMatrix x = rhs;
    trsm_lower(l, x);
    trsm_lower_trans(l, x);
    return x;
}

DenseMatrix chol_solve(const DenseMatrix& z, const DenseMatrix& rhs) {
    return chol_solve_factored(chol_factor(z), rhs);
}

EigSvdResult eig_svd(const DenseMatrix& w, double eig_tol) {
    require(w.rows >= w.cols, "eig_svd: matrix must be tall");
    require(w.cols >= 1, "eig_svd: empty input");
    DenseMatrix m = matmul_tn(w, w);
    SymEigResult eig = sym_eig(m);
    int b = w.cols;
    double lmax = eig.values[b - 1];
    if (lmax <= 0.0 || (eig_tol > 0.0 && eig.values[0] <= eig_tol * lmax))
        throw RankDeficient("eig_svd: gram matrix numerically rank deficient");

    EigSvdResult res;
    res.sigma.resize(b);
    // Relative floor keeps sigma positive when a tiny eigenvalue rounds below
    // zero while still within the eig_tol acceptance.
    double floor = lmax * 1e-31;
    for (int i = 0; i < b; ++i) res.sigma[i] = std::sqrt(std::max(eig.values[i], floor));
    res.v = std::move(eig.vectors);
    DenseMatrix vs = res.v;
    const auto& ops = kern::active_ops();
    for (int j = 0; j < b; ++j) ops.scale(b, 1.0 / res.sigma[j], vs.col(j));
    res.u = matmul(w, vs);
    return res;
}

double trace_of_product_solve(const DenseMatrix& t, const DenseMatrix& z) {
    require(t.rows == t.cols && z.rows == z.cols && t.rows == z.rows,
            "trace_of_product_solve: dimension mismatch");
    DenseMatrix x = chol_solve(z, t);
    double tr = 0.0;
    for (int i = 0; i < x.rows; ++i) tr += x(i, i);
    return tr;
}

}  // namespace rsvd
