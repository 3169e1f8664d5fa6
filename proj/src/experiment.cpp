#include "rsvd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <thread>

#include <json.hpp>

#include "rsvd/errors.hpp"
#include "rsvd/kernels.hpp"
#include "rsvd/matrix_core.hpp"

namespace rsvd {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;
const char kCsvHeader[] = "algorithm,n,p,P,b,eps,l,r,err,t,success";

struct RunSpec {
    SketchKind kind = SketchKind::Gaussian;
    double eps = 0.0;
    int rank = 0;  // 0 means fixed-precision mode
    int power = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
};

std::vector<double> list_of_doubles(const json& j, const char* key) {
    std::vector<double> v;
    if (!j.contains(key)) return v;
    const json& x = j.at(key);
    if (x.is_array())
        for (const auto& e : x) v.push_back(e.get<double>());
    else
        v.push_back(x.get<double>());
    return v;
}

std::vector<int> list_of_ints(const json& j, const char* key) {
    std::vector<int> v;
    if (!j.contains(key)) return v;
    const json& x = j.at(key);
    if (x.is_array())
        for (const auto& e : x) v.push_back(e.get<int>());
    else
        v.push_back(x.get<int>());
    return v;
}

void validate_config(const ExperimentConfig& cfg) {
    if (!cfg.eps.empty() && !cfg.ranks.empty())
        throw ConfigError("config: choose an eps sweep or a rank sweep, not both");
    if (cfg.eps.empty() && cfg.ranks.empty())
        throw ConfigError("config: needs an eps sweep or a rank sweep");
    for (double e : cfg.eps)
        if (!(e > 0.0)) throw ConfigError("config: eps must be positive");
    for (int r : cfg.ranks)
        if (r < 1) throw ConfigError("config: ranks must be positive");
    for (int pw : cfg.powers)
        if (pw < 0) throw ConfigError("config: power must be non-negative");
    for (double p : cfg.densities)
        if (p < 0.0 || p >= 1.0)
            throw ConfigError("config: density must lie in [0, 1)");
    if (cfg.trials < 0) throw ConfigError("config: trials must be non-negative");
    if (cfg.workers < 1) throw ConfigError("config: workers must be positive");
    if (cfg.block < 0) throw ConfigError("config: block must be non-negative");
    if (cfg.max_iters < 0)
        throw ConfigError("config: max_iters must be non-negative");
}

std::vector<RunSpec> build_grid(const ExperimentConfig& cfg) {
    std::vector<RunSpec> runs;
    const bool rank_mode = !cfg.ranks.empty();
    const std::vector<double> epss =
        rank_mode ? std::vector<double>{0.0} : cfg.eps;
    const std::vector<int> rks = rank_mode ? cfg.ranks : std::vector<int>{0};
    const std::vector<double> no_density = {0.0};
    for (SketchKind kind : cfg.algorithms)
        for (double eps : epss)
            for (int rank : rks)
                for (int power : cfg.powers)
                    for (double p : kind == SketchKind::Gaussian
                                        ? no_density
                                        : cfg.densities)
                        for (int trial = 0; trial < cfg.trials; ++trial) {
                            RunSpec rs;
                            rs.kind = kind;
                            rs.eps = eps;
                            rs.rank = rank;
                            rs.power = power;
                            rs.p = p;
                            rs.seed = cfg.seed +
                                      kSeedStride * (runs.size() + 1);
                            runs.push_back(rs);
                        }
    return runs;
}

double elapsed_sec(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

ExperimentRecord execute_run(const DenseMatrix& a, const ExperimentConfig& cfg,
                             const RunSpec& rs) {
    ExperimentRecord rec;
    rec.algorithm = sketch_kind_name(rs.kind);
    rec.n = a.cols;
    rec.power = rs.power;
    const int b = cfg.block > 0 ? cfg.block : default_block(a.rows, a.cols);
    rec.block = b;
    rec.p = rs.kind == SketchKind::Gaussian
                ? 0.0
                : (rs.p > 0.0 ? rs.p : default_density(rs.kind, a.cols));
    rec.eps = rs.eps;
    const double norm_a = std::sqrt(frob_norm_sq(a));
    const int max_iters =
        cfg.max_iters > 0 ? cfg.max_iters : default_max_iters(a.cols, b);

    FarpcaConfig fc;
    fc.eps = rs.eps;
    fc.relative = cfg.relative;
    fc.power = rs.power;
    fc.block = b;
    fc.max_iters = max_iters;
    fc.sketch.kind = rs.kind;
    fc.sketch.p = rec.p;
    fc.sketch.seed = rs.seed;

    const auto t0 = std::chrono::steady_clock::now();
    ApproxSvd svd;
    try {
        svd = rs.rank > 0 ? run_fixed_rank(a, rs.rank, fc)
                          : run_fixed_precision(a, fc);
    } catch (const ToleranceNotReached& e) {
        svd = e.partial;
        rec.note = e.what();
    } catch (const std::exception& e) {
        rec.time_sec = elapsed_sec(t0);
        rec.err = std::numeric_limits<double>::quiet_NaN();
        rec.note = e.what();
        return rec;
    }
    rec.l = svd.rank();
    if (rs.rank > 0) {
        rec.time_sec = elapsed_sec(t0);
        rec.err = relative_error(a, svd);
        rec.r = rec.l;
        rec.success = rec.note.empty() && svd.blocks < max_iters;
        return rec;
    }
    const double eps_rel =
        cfg.relative ? rs.eps : (norm_a > 0.0 ? rs.eps / norm_a : 0.0);
    const ApproxSvd truncated = truncate_to_tolerance(svd, eps_rel, norm_a);
    rec.r = truncated.rank();
    rec.time_sec = elapsed_sec(t0);
    rec.err = relative_error(a, svd);
    rec.success = rec.err <= eps_rel && svd.blocks < max_iters;
    return rec;
}

void aggregate(ExperimentReport& report, const std::vector<RunSpec>& runs) {
    // Cells keep first-occurrence order; grids are small, linear scan is fine.
    std::vector<int> err_counts;
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const ExperimentRecord& rec = report.records[i];
        const int rank = runs[i].rank;
        std::size_t idx = 0;
        while (idx < report.cells.size()) {
            const ExperimentCell& c = report.cells[idx];
            if (c.algorithm == rec.algorithm && c.eps == rec.eps &&
                c.rank == rank && c.power == rec.power && c.p == rec.p)
                break;
            ++idx;
        }
        if (idx == report.cells.size()) {
            ExperimentCell c;
            c.algorithm = rec.algorithm;
            c.eps = rec.eps;
            c.rank = rank;
            c.power = rec.power;
            c.p = rec.p;
            report.cells.push_back(c);
            err_counts.push_back(0);
        }
        ExperimentCell& cell = report.cells[idx];
        cell.trials += 1;
        cell.mean_time += rec.time_sec;
        cell.mean_l += rec.l;
        cell.mean_r += rec.r;
        cell.success_rate += rec.success ? 1.0 : 0.0;
        if (std::isfinite(rec.err)) {
            cell.mean_err += rec.err;
            err_counts[idx] += 1;
        }
    }
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        ExperimentCell& cc = report.cells[c];
        cc.mean_err = err_counts[c] > 0 ? cc.mean_err / err_counts[c] : 0.0;
        cc.mean_time /= cc.trials;
        cc.mean_l /= cc.trials;
        cc.mean_r /= cc.trials;
        cc.success_rate /= cc.trials;
    }
}

json cell_to_json(const ExperimentCell& c) {
    json j;
    j["algorithm"] = c.algorithm;
    j["eps"] = c.eps;
    j["rank"] = c.rank;
    j["power"] = c.power;
    j["p"] = c.p;
    j["trials"] = c.trials;
    j["mean_err"] = c.mean_err;
    j["mean_time"] = c.mean_time;
    j["mean_l"] = c.mean_l;
    j["mean_r"] = c.mean_r;
    j["success_rate"] = c.success_rate;
    return j;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("matrix")) {
            const json& m = j.at("matrix");
            if (m.contains("path")) {
                cfg.matrix_path = m.at("path").get<std::string>();
                cfg.matrix_format = matrix_format_from_name(
                    m.value("format", std::string("raw")));
            } else {
                cfg.matrix.kind = synthetic_kind_from_name(
                    m.value("kind", std::string("slow")));
                cfg.matrix.n = m.value("n", 0);
                cfg.matrix.d = m.value("d", 1);
                cfg.matrix.seed = m.value("seed", std::uint64_t(0));
            }
        }
        if (j.contains("algorithms"))
            for (const auto& s : j.at("algorithms"))
                cfg.algorithms.push_back(
                    sketch_kind_from_name(s.get<std::string>()));
        cfg.eps = list_of_doubles(j, "eps");
        cfg.ranks = list_of_ints(j, "ranks");
        if (j.contains("power")) cfg.powers = list_of_ints(j, "power");
        if (j.contains("p")) cfg.densities = list_of_doubles(j, "p");
        cfg.relative = j.value("relative", true);
        cfg.block = j.value("block", 0);
        cfg.max_iters = j.value("max_iters", 0);
        cfg.trials = j.value("trials", 1);
        cfg.seed = j.value("seed", std::uint64_t(0));
        cfg.workers = j.value("workers", 1);
        cfg.out_prefix = j.value("out_prefix", std::string());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::vector<RunSpec> runs = build_grid(cfg);
    ExperimentReport report;
    if (!runs.empty()) {
        // One shared input; every run reads it, nobody writes.
        const DenseMatrix a =
            cfg.matrix_path.empty()
                ? gen_synthetic(cfg.matrix)
                : load_matrix(cfg.matrix_path, cfg.matrix_format);
        report.records.assign(runs.size(), ExperimentRecord{});
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= runs.size()) return;
                report.records[i] = execute_run(a, cfg, runs[i]);
            }
        };
        const int extra =
            std::max(0, std::min<int>(cfg.workers, int(runs.size())) - 1);
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(extra));
        for (int t = 0; t < extra; ++t) pool.emplace_back(work);
        work();
        for (std::thread& th : pool) th.join();
    }
    aggregate(report, runs);
    if (!cfg.out_prefix.empty()) {
        write_report_csv(report.records, cfg.out_prefix + ".csv");
        write_report_json(report, cfg.out_prefix + ".json");
        write_series_json(report, cfg.out_prefix + "_series.json");
    }
    return report;
}

double relative_error(const DenseMatrix& a, const ApproxSvd& svd) {
    const kern::Ops& ops = kern::active_ops();
    const double norm_sq = frob_norm_sq(a);
    if (norm_sq == 0.0) return 0.0;
    const int m = a.rows, n = a.cols, r = svd.rank();
    if (r == 0) return 1.0;
    if (svd.u.rows != m || svd.v.rows != n)
        throw DimensionError("relative_error: factor shape mismatch");
    DenseMatrix vs = svd.v;
    for (int j = 0; j < r; ++j)
        ops.scale(n, svd.sigma[std::size_t(j)], vs.col(j));
    const int strip = std::min(n, std::max(1, (1 << 21) / std::max(1, m)));
    double err_sq = 0.0;
    DenseMatrix diff(m, strip);
    for (int s = 0; s < n; s += strip) {
        const int w = std::min(strip, n - s);
        std::memcpy(diff.data.data(), a.col(s),
                    sizeof(double) * std::size_t(m) * std::size_t(w));
        ops.scale(m * w, -1.0, diff.data.data());
        // diff += u * vs(s:s+w, :)' using the row offset as the b pointer.
        ops.gemm_nt(m, w, r, svd.u.data.data(), m, vs.data.data() + s, n,
                    diff.data.data(), m);
        err_sq += ops.sum_sq(m * w, diff.data.data());
    }
    return std::sqrt(err_sq / norm_sq);
}

void write_report_csv(const std::vector<ExperimentRecord>& records,
                      const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path + " for writing", 0);
    f << kCsvHeader << "\n";
    char line[320];
    for (const ExperimentRecord& rec : records) {
        std::snprintf(line, sizeof line,
                      "%s,%d,%.17g,%d,%d,%.17g,%d,%d,%.17g,%.17g,%d\n",
                      rec.algorithm.c_str(), rec.n, rec.p, rec.power,
                      rec.block, rec.eps, rec.l, rec.r, rec.err, rec.time_sec,
                      rec.success ? 1 : 0);
        f << line;
    }
    f.flush();
    if (!f) throw FormatError("write failed: " + path, 0);
}

std::vector<ExperimentRecord> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path, 0);
    std::string buf(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>{});
    std::vector<ExperimentRecord> records;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < buf.size()) {
        std::size_t eol = buf.find('\n', pos);
        if (eol == std::string::npos) eol = buf.size();
        const std::string line = buf.substr(pos, eol - pos);
        const std::size_t line_off = pos;
        pos = eol + 1;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw FormatError("unexpected report header", line_off);
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 11)
            throw FormatError("expected 11 report columns", line_off);
        try {
            ExperimentRecord rec;
            rec.algorithm = fields[0];
            rec.n = std::stoi(fields[1]);
            rec.p = std::stod(fields[2]);
            rec.power = std::stoi(fields[3]);
            rec.block = std::stoi(fields[4]);
            rec.eps = std::stod(fields[5]);
            rec.l = std::stoi(fields[6]);
            rec.r = std::stoi(fields[7]);
            rec.err = std::stod(fields[8]);
            rec.time_sec = std::stod(fields[9]);
            rec.success = std::stoi(fields[10]) != 0;
            records.push_back(std::move(rec));
        } catch (const std::exception&) {
            throw FormatError("malformed report row", line_off);
        }
    }
    if (!header_seen) throw FormatError("empty report file", 0);
    return records;
}

void write_report_json(const ExperimentReport& report,
                       const std::string& path) {
    json j;
    j["runs"] = json::array();
    for (const ExperimentRecord& rec : report.records) {
        json r;
        r["algorithm"] = rec.algorithm;
        r["n"] = rec.n;
        r["p"] = rec.p;
        r["P"] = rec.power;
        r["b"] = rec.block;
        r["eps"] = rec.eps;
        r["l"] = rec.l;
        r["r"] = rec.r;
        r["err"] = std::isfinite(rec.err) ? json(rec.err) : json();
        r["t"] = rec.time_sec;
        r["success"] = rec.success;
        if (!rec.note.empty()) r["note"] = rec.note;
        j["runs"].push_back(std::move(r));
    }
    j["cells"] = json::array();
    for (const ExperimentCell& c : report.cells)
        j["cells"].push_back(cell_to_json(c));
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path + " for writing", 0);
    f << j.dump(2) << "\n";
    if (!f) throw FormatError("write failed: " + path, 0);
}

void write_series_json(const ExperimentReport& report,
                       const std::string& path) {
    // The swept axis is the grid dimension that actually varies.
    auto distinct = [&](auto get) {
        std::vector<double> vals;
        for (const ExperimentCell& c : report.cells) {
            const double v = get(c);
            if (std::find(vals.begin(), vals.end(), v) == vals.end())
                vals.push_back(v);
        }
        return vals.size();
    };
    std::string axis = "eps";
    auto value_of = [&](const ExperimentCell& c) {
        if (axis == "rank") return double(c.rank);
        if (axis == "p") return c.p;
        if (axis == "power") return double(c.power);
        return c.eps;
    };
    if (distinct([](const ExperimentCell& c) { return double(c.rank); }) > 1)
        axis = "rank";
    else if (distinct([](const ExperimentCell& c) { return c.p; }) > 1)
        axis = "p";
    else if (distinct([](const ExperimentCell& c) { return c.eps; }) > 1)
        axis = "eps";
    else if (distinct([](const ExperimentCell& c) { return double(c.power); }) > 1)
        axis = "power";

    json series = json::object();
    for (const ExperimentCell& c : report.cells) {
        json pt;
        pt["x"] = value_of(c);
        pt["err"] = c.mean_err;
        pt["time"] = c.mean_time;
        pt["l"] = c.mean_l;
        pt["success_rate"] = c.success_rate;
        series[c.algorithm].push_back(std::move(pt));
    }
    for (auto& [name, pts] : series.items()) {
        std::sort(pts.begin(), pts.end(), [](const json& a, const json& b) {
            return a.at("x").get<double>() < b.at("x").get<double>();
        });
    }
    json j;
    j["x"] = axis;
    j["series"] = std::move(series);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path + " for writing", 0);
    f << j.dump(2) << "\n";
    if (!f) throw FormatError("write failed: " + path, 0);
}

TimingResult time_kernel(const std::function<void()>& op, int warmups,
                         int reps) {
    if (reps < 1) throw ConfigError("time_kernel: reps must be at least 1");
    if (warmups < 0) throw ConfigError("time_kernel: warmups must be >= 0");
    for (int i = 0; i < warmups; ++i) op();
    std::vector<double> t(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        op();
        t[std::size_t(i)] = elapsed_sec(t0);
    }
    std::sort(t.begin(), t.end());
    TimingResult r;
    r.min = t.front();
    r.max = t.back();
    r.median = reps % 2 ? t[std::size_t(reps / 2)]
                        : 0.5 * (t[std::size_t(reps / 2 - 1)] +
                                 t[std::size_t(reps / 2)]);
    return r;
}

}  // namespace rsvd
