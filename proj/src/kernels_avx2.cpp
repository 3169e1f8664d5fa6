#include <algorithm>
#include <cstddef>
#include <cstring>

#include "rsvd/kernels.hpp"

// AVX2/FMA kernel variants. This is the only translation unit compiled with
// -mavx2 -mfma; it must not be entered unless the dispatcher verified CPU
// support at runtime.

#ifdef RSVD_BUILD_AVX2

#include <immintrin.h>

namespace rsvd::kern {
namespace {

constexpr int MR = 8;   // micro tile rows (two 4-wide vectors)
constexpr int NR = 4;   // micro tile cols
constexpr int KC = 256; // k panel: A micro panel 8*256*8 = 16 KB, L1 resident
constexpr int MC = 256; // m panel: packed A 256*256*8 = 512 KB, L2 resident
constexpr int NC = 128; // n panel: packed B 256*128*8 = 256 KB

// C tile (8 x 4) += packed A panel times packed B panel.
inline void micro_8x4(int kc, const double* ap, const double* bp,
                      double* c, int ldc) {
    __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
    __m256d c02 = _mm256_setzero_pd(), c03 = _mm256_setzero_pd();
    __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c12 = _mm256_setzero_pd(), c13 = _mm256_setzero_pd();
    for (int p = 0; p < kc; ++p) {
        __m256d a0 = _mm256_load_pd(ap);
        __m256d a1 = _mm256_load_pd(ap + 4);
        __m256d b0 = _mm256_broadcast_sd(bp + 0);
        __m256d b1 = _mm256_broadcast_sd(bp + 1);
        c00 = _mm256_fmadd_pd(a0, b0, c00);
        c10 = _mm256_fmadd_pd(a1, b0, c10);
        c01 = _mm256_fmadd_pd(a0, b1, c01);
        c11 = _mm256_fmadd_pd(a1, b1, c11);
        __m256d b2 = _mm256_broadcast_sd(bp + 2);
        __m256d b3 = _mm256_broadcast_sd(bp + 3);
        c02 = _mm256_fmadd_pd(a0, b2, c02);
        c12 = _mm256_fmadd_pd(a1, b2, c12);
        c03 = _mm256_fmadd_pd(a0, b3, c03);
        c13 = _mm256_fmadd_pd(a1, b3, c13);
        ap += MR;
        bp += NR;
    }
    double* c0 = c;
    double* c1 = c + ldc;
    double* c2 = c + 2 * std::size_t(ldc);
    double* c3 = c + 3 * std::size_t(ldc);
    _mm256_storeu_pd(c0, _mm256_add_pd(_mm256_loadu_pd(c0), c00));
    _mm256_storeu_pd(c0 + 4, _mm256_add_pd(_mm256_loadu_pd(c0 + 4), c10));
    _mm256_storeu_pd(c1, _mm256_add_pd(_mm256_loadu_pd(c1), c01));
    _mm256_storeu_pd(c1 + 4, _mm256_add_pd(_mm256_loadu_pd(c1 + 4), c11));
    _mm256_storeu_pd(c2, _mm256_add_pd(_mm256_loadu_pd(c2), c02));
    _mm256_storeu_pd(c2 + 4, _mm256_add_pd(_mm256_loadu_pd(c2 + 4), c12));
    _mm256_storeu_pd(c3, _mm256_add_pd(_mm256_loadu_pd(c3), c03));
    _mm256_storeu_pd(c3 + 4, _mm256_add_pd(_mm256_loadu_pd(c3 + 4), c13));
}

// Same micro kernel but lands in a scratch tile first; used for edge tiles so
// stores never touch rows/cols outside the matrix.
inline void micro_8x4_edge(int kc, const double* ap, const double* bp,
                           double* c, int ldc, int mr, int nr) {
    alignas(32) double buf[MR * NR];
    std::memset(buf, 0, sizeof buf);
    micro_8x4(kc, ap, bp, buf, MR);
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < mr; ++i) c[std::size_t(j) * ldc + i] += buf[j * MR + i];
}

// Packs an mc x kc block of A into MR-row strips, zero padded.
void pack_a(int mc, int kc, const double* a, int lda, double* ap) {
    for (int i0 = 0; i0 < mc; i0 += MR) {
        int mr = std::min(MR, mc - i0);
        for (int p = 0; p < kc; ++p) {
            const double* src = a + std::size_t(p) * lda + i0;
            double* dst = ap + std::size_t(i0) * kc + std::size_t(p) * MR;
            int i = 0;
            for (; i < mr; ++i) dst[i] = src[i];
            for (; i < MR; ++i) dst[i] = 0.0;
        }
    }
}

// Packs a kc x nc block of B into NR-col strips, zero padded.
void pack_b(int kc, int nc, const double* b, int ldb, double* bp) {
    for (int j0 = 0; j0 < nc; j0 += NR) {
        int nr = std::min(NR, nc - j0);
        for (int p = 0; p < kc; ++p) {
            double* dst = bp + std::size_t(j0) * kc + std::size_t(p) * NR;
            int j = 0;
            for (; j < nr; ++j) dst[j] = b[std::size_t(j0 + j) * ldb + p];
            for (; j < NR; ++j) dst[j] = 0.0;
        }
    }
}

void gemm_nn_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc) {
    if (m <= 0 || n <= 0 || k <= 0) return;
    alignas(32) static thread_local double ap[MC * KC];
    alignas(32) static thread_local double bp[KC * NC];
    for (int jc = 0; jc < n; jc += NC) {
        int nc = std::min(NC, n - jc);
        for (int pc = 0; pc < k; pc += KC) {
            int kc = std::min(KC, k - pc);
            pack_b(kc, nc, b + std::size_t(jc) * ldb + pc, ldb, bp);
            for (int ic = 0; ic < m; ic += MC) {
                int mc = std::min(MC, m - ic);
                pack_a(mc, kc, a + std::size_t(pc) * lda + ic, lda, ap);
                for (int jr = 0; jr < nc; jr += NR) {
                    int nr = std::min(NR, nc - jr);
                    for (int ir = 0; ir < mc; ir += MR) {
                        int mr = std::min(MR, mc - ir);
                        double* ct = c + std::size_t(jc + jr) * ldc + ic + ir;
                        const double* at = ap + std::size_t(ir) * kc;
                        const double* bt = bp + std::size_t(jr) * kc;
                        if (mr == MR && nr == NR)
                            micro_8x4(kc, at, bt, ct, ldc);
                        else
                            micro_8x4_edge(kc, at, bt, ct, ldc, mr, nr);
                    }
                }
            }
        }
    }
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
}

// A'B via 4x2 tiles of dot products; columns of both operands are contiguous.
void gemm_tn_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc) {
    int j = 0;
    for (; j + 2 <= n; j += 2) {
        const double* b0 = b + std::size_t(j) * ldb;
        const double* b1 = b0 + ldb;
        double* c0 = c + std::size_t(j) * ldc;
        double* c1 = c0 + ldc;
        int i = 0;
        for (; i + 4 <= m; i += 4) {
            const double* a0 = a + std::size_t(i) * lda;
            const double* a1 = a0 + lda;
            const double* a2 = a1 + lda;
            const double* a3 = a2 + lda;
            __m256d s00 = _mm256_setzero_pd(), s10 = _mm256_setzero_pd();
            __m256d s20 = _mm256_setzero_pd(), s30 = _mm256_setzero_pd();
            __m256d s01 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
            __m256d s21 = _mm256_setzero_pd(), s31 = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4) {
                __m256d vb0 = _mm256_loadu_pd(b0 + p);
                __m256d vb1 = _mm256_loadu_pd(b1 + p);
                s00 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + p), vb0, s00);
                s01 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + p), vb1, s01);
                s10 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + p), vb0, s10);
                s11 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + p), vb1, s11);
                s20 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + p), vb0, s20);
                s21 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + p), vb1, s21);
                s30 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + p), vb0, s30);
                s31 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + p), vb1, s31);
            }
            double t00 = hsum(s00), t10 = hsum(s10), t20 = hsum(s20), t30 = hsum(s30);
            double t01 = hsum(s01), t11 = hsum(s11), t21 = hsum(s21), t31 = hsum(s31);
            for (; p < k; ++p) {
                t00 += a0[p] * b0[p];
                t10 += a1[p] * b0[p];
                t20 += a2[p] * b0[p];
                t30 += a3[p] * b0[p];
                t01 += a0[p] * b1[p];
                t11 += a1[p] * b1[p];
                t21 += a2[p] * b1[p];
                t31 += a3[p] * b1[p];
            }
            c0[i] += t00;
            c0[i + 1] += t10;
            c0[i + 2] += t20;
            c0[i + 3] += t30;
            c1[i] += t01;
            c1[i + 1] += t11;
            c1[i + 2] += t21;
            c1[i + 3] += t31;
        }
        for (; i < m; ++i) {
            const double* ai = a + std::size_t(i) * lda;
            double t0 = 0.0, t1 = 0.0;
            for (int p = 0; p < k; ++p) {
                t0 += ai[p] * b0[p];
                t1 += ai[p] * b1[p];
            }
            c0[i] += t0;
            c1[i] += t1;
        }
    }
    for (; j < n; ++j) {
        const double* bj = b + std::size_t(j) * ldb;
        double* cj = c + std::size_t(j) * ldc;
        for (int i = 0; i < m; ++i) {
            const double* ai = a + std::size_t(i) * lda;
            __m256d s = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4)
                s = _mm256_fmadd_pd(_mm256_loadu_pd(ai + p),
                                    _mm256_loadu_pd(bj + p), s);
            double t = hsum(s);
            for (; p < k; ++p) t += ai[p] * bj[p];
            cj[i] += t;
        }
    }
}

inline void axpy_body(int n, double alpha, const double* x, double* y) {
    __m256d va = _mm256_set1_pd(alpha);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                         _mm256_loadu_pd(y + i + 4)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// A B' as blocked column updates: C(:,j) accumulates axpys over a k tile, so
// each C column is touched once per tile instead of once per k step.
void gemm_nt_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc) {
    constexpr int kt = 64;
    constexpr int mt = 2048;
    for (int i0 = 0; i0 < m; i0 += mt) {
        int mb = std::min(mt, m - i0);
        for (int p0 = 0; p0 < k; p0 += kt) {
            int pe = std::min(k, p0 + kt);
            for (int j = 0; j < n; ++j) {
                double* cj = c + std::size_t(j) * ldc + i0;
                for (int p = p0; p < pe; ++p) {
                    double bv = b[std::size_t(p) * ldb + j];
                    if (bv == 0.0) continue;
                    axpy_body(mb, bv, a + std::size_t(p) * lda + i0, cj);
                }
            }
        }
    }
}

void axpy_avx2(int n, double alpha, const double* x, double* y) {
    axpy_body(n, alpha, x, y);
}

double dot_avx2(int n, const double* x, const double* y) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    int i = 0;
    for (; i + 16 <= n; i += 16) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
        s2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), s2);
        s3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), s3);
    }
    double t = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
    for (; i < n; ++i) t += x[i] * y[i];
    return t;
}

double sum_sq_avx2(int n, const double* x) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v1 = _mm256_loadu_pd(x + i + 4);
        s0 = _mm256_fmadd_pd(v0, v0, s0);
        s1 = _mm256_fmadd_pd(v1, v1, s1);
    }
    double t = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) t += x[i] * x[i];
    return t;
}

void scale_avx2(int n, double alpha, double* x) {
    __m256d va = _mm256_set1_pd(alpha);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void sub_vec_avx2(int n, const double* z, double* col) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(col + i, _mm256_sub_pd(_mm256_loadu_pd(col + i),
                                                _mm256_loadu_pd(z + i)));
    for (; i < n; ++i) col[i] -= z[i];
}

void rot_avx2(int n, double* x, double* y, double c, double s) {
    __m256d vc = _mm256_set1_pd(c), vs = _mm256_set1_pd(s);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, vx, _mm256_mul_pd(vs, vy)));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vx, _mm256_mul_pd(vc, vy)));
    }
    for (; i < n; ++i) {
        double xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

}  // namespace

const Ops* avx2_ops_or_null() {
    static const Ops table = {gemm_nn_avx2, gemm_tn_avx2, gemm_nt_avx2,
                              axpy_avx2,    dot_avx2,     sum_sq_avx2,
                              scale_avx2,   sub_vec_avx2, rot_avx2};
    return &table;
}

}  // namespace rsvd::kern

#else

namespace rsvd::kern {
const Ops* avx2_ops_or_null() { return nullptr; }
}  // namespace rsvd::kern

#endif
