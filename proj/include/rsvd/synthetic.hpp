#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsvd/dense_matrix.hpp"

namespace rsvd {

enum class SyntheticKind { SlowDecay, FastDecay, BlockVStability };

// Accepts "slow", "slowdecay", "fast", "fastdecay", "blockv", "stability".
SyntheticKind synthetic_kind_from_name(const std::string& name);
const char* synthetic_kind_name(SyntheticKind kind);

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::SlowDecay;
    int n = 0;
    int d = 1;  // right-factor block count, BlockVStability only
    std::uint64_t seed = 0;
};

struct SyntheticFactors {
    DenseMatrix u;              // n x r, orthonormal columns
    std::vector<double> sigma;  // descending, length r
    DenseMatrix v;              // n x r, orthonormal columns
};

// Allocation budget for one generated matrix plus factors and workspace.
inline constexpr std::size_t kSyntheticMemoryCap = std::size_t(3) << 30;

// sigma_1..sigma_n of the decay profile. SlowDecay and BlockVStability use
// 1/j^2, FastDecay uses e^{-j/20}.
std::vector<double> synthetic_spectrum(SyntheticKind kind, int n);

// Orthonormal basis of a seeded Gaussian matrix via block Gram-Schmidt with
// a full reorthogonalization pass. stream selects an independent generator
// lane so distinct factors never share draws.
DenseMatrix random_orthonormal(int n, int r, std::uint64_t seed,
                               std::uint32_t stream);

// Factors of the test matrix. Trailing singular values below
// sigma_1 * 1e-18 carry no signal representable next to the leading
// directions and are dropped together with their factor columns.
// BlockVStability builds v block diagonal with d blocks of size n/d, each an
// orthonormalized Gaussian; d = n degenerates to a +-1 diagonal.
SyntheticFactors gen_synthetic_factors(
    const SyntheticSpec& spec, std::size_t memory_cap = kSyntheticMemoryCap);

// A = U Sigma V', dense n x n. Same spec always reproduces the same bits.
DenseMatrix gen_synthetic(const SyntheticSpec& spec,
                          std::size_t memory_cap = kSyntheticMemoryCap);

}  // namespace rsvd
