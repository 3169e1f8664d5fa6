#include "rsvd/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "rsvd/errors.hpp"
#include "rsvd/kernels.hpp"
#include "rsvd/matrix_core.hpp"
#include "rsvd/rng.hpp"

namespace rsvd {
namespace {

// Factor streams sit far above any sketch block id, so a config reusing one
// seed for the matrix and the sketches still gets independent draws.
constexpr std::uint32_t kStreamU = 0xFA000001u;
constexpr std::uint32_t kStreamV = 0xFA000002u;
constexpr double kSigmaCutoff = 1e-18;
constexpr int kPanel = 64;

void fill_gaussian(DenseMatrix& panel, std::uint64_t seed,
                   std::uint32_t stream, int first_col) {
    for (int j = 0; j < panel.cols; ++j) {
        Philox rng(seed, stream, std::uint32_t(first_col + j));
        double* c = panel.col(j);
        for (int i = 0; i < panel.rows; ++i) c[i] = rng.next_gaussian();
    }
}

// Orthonormalizes panel against q(:, 0:done) and itself. Two rounds of
// project-then-CholeskyQR; the repeat restores orthogonality the single
// pass loses to cancellation.
void bcgs2_step(const DenseMatrix& q, int done, DenseMatrix& panel) {
    const kern::Ops& ops = kern::active_ops();
    const int n = panel.rows;
    const int w = panel.cols;
    for (int pass = 0; pass < 2; ++pass) {
        if (done > 0) {
            DenseMatrix c(done, w);
            ops.gemm_tn(done, w, n, q.data.data(), n, panel.data.data(), n,
                        c.data.data(), done);
            ops.scale(done * w, -1.0, c.data.data());
            ops.gemm_nn(n, w, done, q.data.data(), n, c.data.data(), done,
                        panel.data.data(), n);
        }
        DenseMatrix g = matmul_tn(panel, panel);
        DenseMatrix l = chol_factor(g);
        trsm_right_lower_trans(l, panel);
    }
}

DenseMatrix orthonormalize(int n, int r, std::uint64_t seed,
                           std::uint32_t stream, int first_col) {
    DenseMatrix q(n, r);
    for (int s = 0; s < r; s += kPanel) {
        const int w = std::min(kPanel, r - s);
        DenseMatrix panel(n, w);
        fill_gaussian(panel, seed, stream, first_col + s);
        bcgs2_step(q, s, panel);
        std::memcpy(q.col(s), panel.data.data(),
                    sizeof(double) * std::size_t(n) * std::size_t(w));
    }
    return q;
}

std::size_t estimate_bytes(int n, int r) {
    const std::size_t nn = std::size_t(n);
    const std::size_t rr = std::size_t(r);
    // A, two factors, the scaled-factor temporary, panel workspace.
    return 8 * (nn * nn + 3 * nn * rr + 2 * nn * std::size_t(kPanel));
}

void check_cap(int n, int r, std::size_t memory_cap) {
    const std::size_t need = estimate_bytes(n, r);
    if (need > memory_cap)
        throw ConfigError("gen_synthetic: n=" + std::to_string(n) +
                          " rank=" + std::to_string(r) + " needs about " +
                          std::to_string(need) + " bytes but the cap is " +
                          std::to_string(memory_cap) +
                          " bytes; raise the cap to generate at this size");
}

}  // namespace

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    std::string s;
    for (char ch : name)
        s.push_back(char(std::tolower(static_cast<unsigned char>(ch))));
    if (s == "slow" || s == "slowdecay") return SyntheticKind::SlowDecay;
    if (s == "fast" || s == "fastdecay") return SyntheticKind::FastDecay;
    if (s == "blockv" || s == "stability" || s == "blockvstability")
        return SyntheticKind::BlockVStability;
    throw ConfigError("unknown synthetic matrix kind: " + name);
}

const char* synthetic_kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::SlowDecay: return "slowdecay";
        case SyntheticKind::FastDecay: return "fastdecay";
        case SyntheticKind::BlockVStability: return "blockvstability";
    }
    return "unknown";
}

std::vector<double> synthetic_spectrum(SyntheticKind kind, int n) {
    if (n < 1) throw ConfigError("synthetic_spectrum: n must be positive");
    std::vector<double> s(static_cast<std::size_t>(n));
    if (kind == SyntheticKind::FastDecay) {
        for (int j = 1; j <= n; ++j)
            s[std::size_t(j - 1)] = std::exp(-double(j) / 20.0);
    } else {
        for (int j = 1; j <= n; ++j)
            s[std::size_t(j - 1)] = 1.0 / (double(j) * double(j));
    }
    return s;
}

DenseMatrix random_orthonormal(int n, int r, std::uint64_t seed,
                               std::uint32_t stream) {
    if (n < 1 || r < 1 || r > n)
        throw ConfigError("random_orthonormal: need 1 <= r <= n");
    return orthonormalize(n, r, seed, stream, 0);
}

SyntheticFactors gen_synthetic_factors(const SyntheticSpec& spec,
                                       std::size_t memory_cap) {
    if (spec.n < 1) throw ConfigError("gen_synthetic: n must be positive");
    const int n = spec.n;
    std::vector<double> sigma = synthetic_spectrum(spec.kind, n);
    int r = n;
    while (r > 1 && sigma[std::size_t(r - 1)] < sigma[0] * kSigmaCutoff) --r;
    sigma.resize(std::size_t(r));
    check_cap(n, r, memory_cap);

    SyntheticFactors f;
    f.sigma = std::move(sigma);
    f.u = orthonormalize(n, r, spec.seed, kStreamU, 0);
    if (spec.kind == SyntheticKind::BlockVStability) {
        if (spec.d < 1 || n % spec.d != 0)
            throw ConfigError("gen_synthetic: d must divide n");
        const int nb = n / spec.d;
        f.v = DenseMatrix(n, n);
        for (int i = 0; i < spec.d; ++i) {
            const int bs = i * nb;
            DenseMatrix blk = orthonormalize(nb, nb, spec.seed, kStreamV, bs);
            for (int j = 0; j < nb; ++j)
                std::memcpy(f.v.col(bs + j) + bs, blk.col(j),
                            sizeof(double) * std::size_t(nb));
        }
    } else {
        f.v = orthonormalize(n, r, spec.seed, kStreamV, 0);
    }
    return f;
}

DenseMatrix gen_synthetic(const SyntheticSpec& spec, std::size_t memory_cap) {
    SyntheticFactors f = gen_synthetic_factors(spec, memory_cap);
    const kern::Ops& ops = kern::active_ops();
    const int n = spec.n;
    const int r = int(f.sigma.size());
    DenseMatrix us = f.u;
    for (int j = 0; j < r; ++j) ops.scale(n, f.sigma[std::size_t(j)], us.col(j));
    DenseMatrix a(n, n);
    if (spec.kind == SyntheticKind::BlockVStability) {
        // V is block diagonal, so A assembles block column by block column.
        const int nb = n / spec.d;
        for (int i = 0; i < spec.d; ++i) {
            const int bs = i * nb;
            ops.gemm_nt(n, nb, nb, us.col(bs), n, f.v.col(bs) + bs, n,
                        a.col(bs), n);
        }
    } else {
        ops.gemm_nt(n, n, r, us.data.data(), n, f.v.data.data(), n,
                    a.data.data(), n);
    }
    return a;
}

}  // namespace rsvd
