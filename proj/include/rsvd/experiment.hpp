#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsvd/dense_matrix.hpp"
#include "rsvd/driver.hpp"
#include "rsvd/matrix_io.hpp"
#include "rsvd/sketch.hpp"
#include "rsvd/synthetic.hpp"

namespace rsvd {

struct ExperimentConfig {
    SyntheticSpec matrix;  // used when matrix_path is empty
    std::string matrix_path;
    MatrixFormat matrix_format = MatrixFormat::RawF64;
    std::vector<SketchKind> algorithms;
    std::vector<double> eps;    // tolerance sweep (fixed-precision mode)
    std::vector<int> ranks;     // rank sweep (fixed-rank mode); excludes eps
    std::vector<int> powers = {1};
    std::vector<double> densities = {0.0};  // 0 picks the recommended default
    bool relative = true;
    int block = 0;  // 0 picks the size heuristic
    int max_iters = 0;
    int trials = 1;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_prefix;  // empty disables file emission
};

struct ExperimentRecord {
    std::string algorithm;
    int n = 0;
    double p = 0.0;
    int power = 0;
    int block = 0;
    double eps = 0.0;
    int l = 0;       // output rank
    int r = 0;       // rank after tolerance truncation
    double err = 0.0;
    double time_sec = 0.0;
    bool success = false;
    std::string note;  // failure detail; not part of the CSV schema
};

// Per grid cell aggregate; rank is 0 outside rank sweeps.
struct ExperimentCell {
    std::string algorithm;
    double eps = 0.0;
    int rank = 0;
    int power = 0;
    double p = 0.0;
    int trials = 0;
    double mean_err = 0.0;  // over runs with a finite error
    double mean_time = 0.0;
    double mean_l = 0.0;
    double mean_r = 0.0;
    double success_rate = 0.0;
};

struct ExperimentReport {
    std::vector<ExperimentRecord> records;
    std::vector<ExperimentCell> cells;
};

ExperimentConfig load_experiment_config(const std::string& path);

// Executes the grid over algorithms x targets x power x density x trials.
// Per-run failures land in the record's note and success flag; they never
// abort the grid. With out_prefix set, emits <prefix>.csv, <prefix>.json
// and <prefix>_series.json.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Exact relative error ||a - u diag(sigma) v'||_F / ||a||_F, accumulated
// over column strips so the approximation is never materialized whole.
double relative_error(const DenseMatrix& a, const ApproxSvd& svd);

void write_report_csv(const std::vector<ExperimentRecord>& records,
                      const std::string& path);
std::vector<ExperimentRecord> read_report_csv(const std::string& path);
void write_report_json(const ExperimentReport& report,
                       const std::string& path);
// x-y series per algorithm along the swept grid axis, for plotting.
void write_series_json(const ExperimentReport& report,
                       const std::string& path);

struct TimingResult {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Monotonic-clock wall time of op over reps runs after warmups.
TimingResult time_kernel(const std::function<void()>& op, int warmups,
                         int reps);

}  // namespace rsvd
