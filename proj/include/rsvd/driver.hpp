#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rsvd/dense_matrix.hpp"
#include "rsvd/errors.hpp"
#include "rsvd/sketch.hpp"

namespace rsvd {

// Which diagonal entry of the ascending singular-value array feeds the shift
// update. LastDiagonal reads the largest value, FirstDiagonal the smallest;
// the shift only engages for power >= 3, so both pass the same accuracy bar.
enum class ShiftConvention { LastDiagonal, FirstDiagonal };

struct FarpcaConfig {
    double eps = 0.0;       // Frobenius tolerance; relative flag below
    int power = 0;          // power-iteration passes P
    int block = 0;          // block size b; 0 picks the size heuristic
    SketchSpec sketch;      // kind, density, seed
    int max_iters = 0;      // 0 picks ceil(n / (2b))
    ShiftConvention shift_convention = ShiftConvention::LastDiagonal;
    bool relative = false;  // eps is a fraction of ||A||_F
};

// Running factorization state. Invariants: z = y'y, t = w'w, lz lower
// Cholesky factor of z, residual() non-increasing across accepted blocks.
struct FactorState {
    int m = 0, n = 0, b = 0;
    DenseMatrix y;          // m x jb
    DenseMatrix w;          // n x jb
    DenseMatrix z;          // jb x jb
    DenseMatrix t;          // jb x jb
    DenseMatrix lz;         // jb x jb, lower triangular
    double norm_a_sq = 0.0;
    double trace_acc = 0.0; // running tr(t z^-1), grows as blocks land
    double alpha = 0.0;     // shift, reset at each new block
    int blocks = 0;

    double residual() const { return norm_a_sq - trace_acc; }
};

struct ApproxSvd {
    DenseMatrix u;              // m x r, orthonormal columns
    std::vector<double> sigma;  // ascending, non-negative
    DenseMatrix v;              // n x r
    double residual_sq = 0.0;
    double norm_a_sq = 0.0;
    int blocks = 0;
    bool converged = false;
    // Columns of v whose singular value fell below 1e-14 of the largest get a
    // pseudo-inverse zero scale instead of 1/sigma; marked here.
    std::vector<char> v_flagged;

    int rank() const { return int(sigma.size()); }
};

class ToleranceNotReached : public std::runtime_error {
public:
    ApproxSvd partial;
    ToleranceNotReached(std::string msg, ApproxSvd p)
        : std::runtime_error(std::move(msg)), partial(std::move(p)) {}
};

// Supplies the raw test block for each (n, b, block_id); the default draws
// from gen_sketch, tests may inject precomputed dense blocks.
class BlockSource {
public:
    virtual ~BlockSource() = default;
    virtual SketchBlock next(int n, int b, int block_id) = 0;
};

FactorState make_state(const DenseMatrix& a, int block);

// Precomputed centering column z = A (p 1_n); empty when centering is off.
std::vector<double> centering_column(const DenseMatrix& a, double p);

// Runs `power` deflated passes over the block and returns the dense iterate
// with orthonormal columns; power = 0 returns the dense input unchanged.
// Updates state.alpha per the halving rule. The first pass consumes the raw
// (possibly sparse, possibly centered) block; later passes are dense.
DenseMatrix power_iterate_block(FactorState& state, const DenseMatrix& a,
                                const SketchBlock& block, int power,
                                ShiftConvention conv,
                                const std::vector<double>& z_center);

// Computes Y_j, W_j from the block, appends them, extends z/t and the
// Cholesky factor by their border, and accumulates tr(t z^-1) incrementally.
// Throws BlockDegenerate when the new border makes z numerically singular.
void accept_block(FactorState& state, const DenseMatrix& a,
                  const SketchBlock& block,
                  const std::vector<double>& z_center);

ApproxSvd assemble_svd(const FactorState& state);

ApproxSvd run_fixed_precision(const DenseMatrix& a, const FarpcaConfig& cfg,
                              BlockSource* source = nullptr);

ApproxSvd run_fixed_rank(const DenseMatrix& a, int rank,
                         const FarpcaConfig& cfg,
                         BlockSource* source = nullptr);

// Drops the smallest singular triplets while the discarded energy keeps the
// residual within (eps_rel * norm_a)^2; returns the reduced factorization.
ApproxSvd truncate_to_tolerance(const ApproxSvd& svd, double eps_rel,
                                double norm_a);

struct CostEstimate {
    double dense_flops = 0.0;  // Gaussian-sketch baseline
    double accel_flops = 0.0;  // sparse-sketch variant
    double ratio = 0.0;        // accel / dense
};

CostEstimate estimate_cost(double m, double n, double l, int power, int block,
                           double p, SketchKind kind);

double default_density(SketchKind kind, int n);
int default_block(int m, int n);
int default_max_iters(int n, int b);

}  // namespace rsvd
