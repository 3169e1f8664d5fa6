#pragma once

namespace rsvd::kern {

// Low-level kernels behind every dense operation. Two implementations exist:
// a portable scalar one and an AVX2/FMA one; the active table is chosen once
// at startup from CPU capabilities. All kernels are single-threaded and have
// a fixed reduction order, so results are reproducible run to run.
struct Ops {
    // c (m x n) += a (m x k) * b (k x n), all column-major with leading dims.
    void (*gemm_nn)(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc);
    // c (m x n) += a' * b where a is stored k x m.
    void (*gemm_tn)(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc);
    // c (m x n) += a * b' where b is stored n x k.
    void (*gemm_nt)(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc);
    void (*axpy)(int n, double alpha, const double* x, double* y);
    double (*dot)(int n, const double* x, const double* y);
    double (*sum_sq)(int n, const double* x);
    void (*scale)(int n, double alpha, double* x);
    // col -= z, the broadcast subtraction used by the centering trick.
    void (*sub_vec)(int n, const double* z, double* col);
    // Plane rotation: (x, y) <- (c*x - s*y, s*x + c*y).
    void (*rot)(int n, double* x, double* y, double c, double s);
};

const Ops& scalar_ops();
const Ops& active_ops();
bool simd_available();
// Test hook: forces the scalar table regardless of CPU support.
void force_scalar(bool on);

}  // namespace rsvd::kern
