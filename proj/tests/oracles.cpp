#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsvd/errors.hpp"
#include "rsvd/rng.hpp"

namespace oracle {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows, b.cols);
    for (int j = 0; j < b.cols; ++j)
        for (int k = 0; k < a.cols; ++k)
            for (int i = 0; i < a.rows; ++i) c(i, j) += a(i, k) * b(k, j);
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.cols, b.cols);
    for (int j = 0; j < b.cols; ++j)
        for (int i = 0; i < a.cols; ++i) {
            double s = 0.0;
            for (int k = 0; k < a.rows; ++k) s += a(k, i) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows, b.rows);
    for (int j = 0; j < b.rows; ++j)
        for (int k = 0; k < a.cols; ++k)
            for (int i = 0; i < a.rows; ++i) c(i, j) += a(i, k) * b(j, k);
    return c;
}

DenseMatrix gram_schmidt(const DenseMatrix& a) {
    DenseMatrix q = a;
    for (int j = 0; j < q.cols; ++j) {
        for (int rep = 0; rep < 2; ++rep)
            for (int k = 0; k < j; ++k) {
                double d = 0.0;
                for (int i = 0; i < q.rows; ++i) d += q(i, k) * q(i, j);
                for (int i = 0; i < q.rows; ++i) q(i, j) -= d * q(i, k);
            }
        double nrm = 0.0;
        for (int i = 0; i < q.rows; ++i) nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-300)
            throw rsvd::RankDeficient("gram_schmidt: dependent columns");
        for (int i = 0; i < q.rows; ++i) q(i, j) /= nrm;
    }
    return q;
}

SvdResult svd(const DenseMatrix& a) {
    if (a.rows < a.cols)
        throw rsvd::DimensionError("oracle svd wants rows >= cols");
    const int m = a.rows, n = a.cols;
    DenseMatrix u = a;
    DenseMatrix v = DenseMatrix::identity(n);
    for (int sweep = 0; sweep < 60; ++sweep) {
        double worst = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int i = 0; i < m; ++i) {
                    app += u(i, p) * u(i, p);
                    aqq += u(i, q) * u(i, q);
                    apq += u(i, p) * u(i, q);
                }
                const double denom = std::sqrt(app * aqq);
                if (denom > 0.0) worst = std::max(worst, std::abs(apq) / denom);
                if (std::abs(apq) <= 1e-15 * denom || apq == 0.0) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < m; ++i) {
                    const double x = u(i, p), y = u(i, q);
                    u(i, p) = c * x - s * y;
                    u(i, q) = s * x + c * y;
                }
                for (int i = 0; i < n; ++i) {
                    const double x = v(i, p), y = v(i, q);
                    v(i, p) = c * x - s * y;
                    v(i, q) = s * x + c * y;
                }
            }
        if (worst < 1e-14) break;
    }
    SvdResult r;
    r.sigma.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (int i = 0; i < m; ++i) nrm += u(i, j) * u(i, j);
        r.sigma[std::size_t(j)] = std::sqrt(nrm);
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return r.sigma[std::size_t(x)] > r.sigma[std::size_t(y)];
    });
    SvdResult out;
    out.u = DenseMatrix(m, n);
    out.v = DenseMatrix(n, n);
    out.sigma.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) {
        const int src = order[std::size_t(j)];
        const double sg = r.sigma[std::size_t(src)];
        out.sigma[std::size_t(j)] = sg;
        const double inv = sg > 0.0 ? 1.0 / sg : 0.0;
        for (int i = 0; i < m; ++i) out.u(i, j) = u(i, src) * inv;
        for (int i = 0; i < n; ++i) out.v(i, j) = v(i, src);
    }
    return out;
}

DenseMatrix inverse(const DenseMatrix& a) {
    if (a.rows != a.cols)
        throw rsvd::DimensionError("inverse wants a square matrix");
    const int n = a.rows;
    DenseMatrix w = a;
    DenseMatrix inv = DenseMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(w(i, col)) > std::abs(w(piv, col))) piv = i;
        if (w(piv, col) == 0.0)
            throw rsvd::RankDeficient("inverse: singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double d = 1.0 / w(col, col);
        for (int j = 0; j < n; ++j) {
            w(col, j) *= d;
            inv(col, j) *= d;
        }
        for (int i = 0; i < n; ++i) {
            if (i == col) continue;
            const double f = w(i, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                w(i, j) -= f * w(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

DenseMatrix standardized_dense(const rsvd::SparseSketch& b, double p) {
    const double scale = 1.0 / std::sqrt(p * (1.0 - p));
    DenseMatrix d(b.rows, b.cols);
    for (int j = 0; j < b.cols; ++j) {
        for (int i = 0; i < b.rows; ++i) d(i, j) = -p * scale;
        for (int idx = b.col_ptr[std::size_t(j)];
             idx < b.col_ptr[std::size_t(j) + 1]; ++idx)
            d(b.row_idx[std::size_t(idx)], j) = (1.0 - p) * scale;
    }
    return d;
}

double frob(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k)
        worst = std::max(worst, std::abs(a.data[k] - b.data[k]));
    return worst;
}

double subspace_distance(const DenseMatrix& a, const DenseMatrix& b) {
    const DenseMatrix q1 = gram_schmidt(a);
    const DenseMatrix q2 = gram_schmidt(b);
    const SvdResult s = svd(matmul_tn(q1, q2));
    double smin = std::min(1.0, s.sigma.back());
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

DenseMatrix random_dense(int rows, int cols, std::uint64_t seed) {
    DenseMatrix a(rows, cols);
    for (int j = 0; j < cols; ++j) {
        rsvd::Philox rng(seed, 0x7E57u, std::uint32_t(j));
        for (int i = 0; i < rows; ++i) a(i, j) = rng.next_gaussian();
    }
    return a;
}

}  // namespace oracle
