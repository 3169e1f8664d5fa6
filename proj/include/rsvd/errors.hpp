#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsvd {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-positive pivot in a Cholesky factorization or a numerically rank
// deficient Gram matrix; the factorization driver reacts by redrawing the
// sketch block.
struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sketch block stayed degenerate through all redraw attempts.
struct BlockDegenerate : std::runtime_error {
    BlockDegenerate(std::string msg, int blocks_accepted, double residual_sq,
                    double norm_a_sq)
        : std::runtime_error(std::move(msg)),
          blocks_accepted(blocks_accepted),
          residual_sq(residual_sq),
          norm_a_sq(norm_a_sq) {}
    int blocks_accepted;
    double residual_sq;
    double norm_a_sq;
};

// File parsing failure; byte_offset points at the offending position.
struct FormatError : std::runtime_error {
    FormatError(std::string msg, std::size_t byte_offset)
        : std::runtime_error(std::move(msg)), byte_offset(byte_offset) {}
    std::size_t byte_offset;
};

}  // namespace rsvd
