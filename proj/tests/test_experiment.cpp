#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "rsvd/experiment.hpp"

using namespace rsvd;

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/rsvd_test_") + name;
}

ExperimentConfig base_config(int n) {
    ExperimentConfig cfg;
    cfg.matrix.kind = SyntheticKind::SlowDecay;
    cfg.matrix.n = n;
    cfg.matrix.seed = 13;
    cfg.algorithms = {SketchKind::Gaussian, SketchKind::StdBernoulli};
    cfg.ranks = {20, 40};
    cfg.powers = {1};
    cfg.block = 10;
    cfg.trials = 2;
    cfg.seed = 40;
    return cfg;
}

}  // namespace

TEST_CASE("relative_error matches a direct reconstruction") {
    DenseMatrix a = oracle::random_dense(45, 30, 100);
    FarpcaConfig fc;
    fc.sketch.seed = 101;
    fc.block = 10;
    fc.power = 1;
    ApproxSvd svd = run_fixed_rank(a, 10, fc);

    DenseMatrix us = svd.u;
    for (int j = 0; j < svd.rank(); ++j)
        for (int i = 0; i < us.rows; ++i) us(i, j) *= svd.sigma[j];
    DenseMatrix recon = oracle::matmul_nt(us, svd.v);
    for (std::size_t i = 0; i < recon.data.size(); ++i)
        recon.data[i] -= a.data[i];
    double want = oracle::frob(recon) / oracle::frob(a);

    CHECK(relative_error(a, svd) == doctest::Approx(want).epsilon(1e-12));

    ApproxSvd empty;
    empty.u = DenseMatrix(45, 0);
    empty.v = DenseMatrix(30, 0);
    CHECK(relative_error(a, empty) == 1.0);

    ApproxSvd wrong = svd;
    wrong.u = DenseMatrix(44, svd.rank());
    CHECK_THROWS_AS(relative_error(a, wrong), DimensionError);
}

TEST_CASE("csv reports round trip") {
    std::vector<ExperimentRecord> recs(2);
    recs[0].algorithm = "gaussian";
    recs[0].n = 500;
    recs[0].p = 0.0;
    recs[0].power = 1;
    recs[0].block = 20;
    recs[0].eps = 1e-3;
    recs[0].l = 40;
    recs[0].r = 37;
    recs[0].err = 0.000912345678901234;
    recs[0].time_sec = 1.25;
    recs[0].success = true;
    recs[1].algorithm = "sparsesign";
    recs[1].n = 500;
    recs[1].p = 0.01;
    recs[1].power = 2;
    recs[1].block = 25;
    recs[1].eps = 0.0;
    recs[1].l = 50;
    recs[1].r = 50;
    recs[1].err = 0.25;
    recs[1].time_sec = 0.5;
    recs[1].success = false;

    std::string path = tmp_path("report.csv");
    write_report_csv(recs, path);
    std::vector<ExperimentRecord> back = read_report_csv(path);
    REQUIRE(back.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(back[i].algorithm == recs[i].algorithm);
        CHECK(back[i].n == recs[i].n);
        CHECK(back[i].p == recs[i].p);
        CHECK(back[i].power == recs[i].power);
        CHECK(back[i].block == recs[i].block);
        CHECK(back[i].eps == recs[i].eps);
        CHECK(back[i].l == recs[i].l);
        CHECK(back[i].r == recs[i].r);
        CHECK(back[i].err == recs[i].err);  // %.17g exact round trip
        CHECK(back[i].time_sec == recs[i].time_sec);
        CHECK(back[i].success == recs[i].success);
    }
    std::remove(path.c_str());
}

TEST_CASE("csv reader rejects malformed input") {
    std::string path = tmp_path("bad.csv");
    auto write = [&](const std::string& s) {
        std::ofstream out(path, std::ios::trunc);
        out << s;
    };

    write("algo,n\n");
    CHECK_THROWS_AS(read_report_csv(path), FormatError);

    write("algorithm,n,p,P,b,eps,l,r,err,t,success\ngaussian,1,2,3\n");
    CHECK_THROWS_AS(read_report_csv(path), FormatError);

    write("algorithm,n,p,P,b,eps,l,r,err,t,success\n");
    CHECK(read_report_csv(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("an empty grid yields an empty report") {
    ExperimentConfig cfg = base_config(50);
    cfg.trials = 0;
    ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.records.empty());
    CHECK(rep.cells.empty());
}

TEST_CASE("a small rank sweep runs, aggregates and emits files") {
    ExperimentConfig cfg = base_config(150);
    cfg.out_prefix = tmp_path("grid");
    ExperimentReport rep = run_experiment(cfg);

    REQUIRE(rep.records.size() == 8);  // 2 algos x 2 ranks x 2 trials
    REQUIRE(rep.cells.size() == 4);
    for (const ExperimentRecord& r : rep.records) {
        CHECK(r.success);
        CHECK(r.note.empty());
        CHECK(r.n == 150);
        CHECK(r.err > 0.0);
        CHECK((r.l == 20 || r.l == 40));
        CHECK(r.r == r.l);  // rank mode reports what it computed
    }
    for (const ExperimentCell& c : rep.cells) {
        CHECK(c.trials == 2);
        CHECK(c.success_rate == 1.0);
        CHECK(c.mean_err > 0.0);
    }
    // More rank means less error, per algorithm.
    CHECK(rep.cells[1].mean_err < rep.cells[0].mean_err);
    CHECK(rep.cells[3].mean_err < rep.cells[2].mean_err);

    std::vector<ExperimentRecord> csv = read_report_csv(cfg.out_prefix + ".csv");
    REQUIRE(csv.size() == rep.records.size());
    for (std::size_t i = 0; i < csv.size(); ++i) {
        CHECK(csv[i].algorithm == rep.records[i].algorithm);
        CHECK(csv[i].err == rep.records[i].err);
    }

    std::ifstream jin(cfg.out_prefix + ".json");
    REQUIRE(jin.good());
    nlohmann::json j = nlohmann::json::parse(jin);
    CHECK(j["runs"].size() == 8);
    CHECK(j["cells"].size() == 4);

    std::ifstream sin(cfg.out_prefix + "_series.json");
    REQUIRE(sin.good());
    nlohmann::json s = nlohmann::json::parse(sin);
    REQUIRE(s["series"].size() == 2);
    for (auto& [name, pts] : s["series"].items()) {
        REQUIRE(pts.size() == 2);
        CHECK(pts[0]["x"] == 20.0);
        CHECK(pts[1]["x"] == 40.0);
        CHECK(double(pts[1]["err"]) < double(pts[0]["err"]));
    }

    std::remove((cfg.out_prefix + ".csv").c_str());
    std::remove((cfg.out_prefix + ".json").c_str());
    std::remove((cfg.out_prefix + "_series.json").c_str());
}

TEST_CASE("worker count does not change the results") {
    ExperimentConfig cfg = base_config(120);
    ExperimentReport one = run_experiment(cfg);
    cfg.workers = 3;
    ExperimentReport many = run_experiment(cfg);

    REQUIRE(one.records.size() == many.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        CHECK(one.records[i].algorithm == many.records[i].algorithm);
        CHECK(one.records[i].err == many.records[i].err);  // bitwise equal
        CHECK(one.records[i].l == many.records[i].l);
        CHECK(one.records[i].success == many.records[i].success);
    }
}

TEST_CASE("density rescues the sketch on adversarially local right factors") {
    // With V = +-I every direction lives in one coordinate; an ultra-sparse
    // sign sketch misses most of them and the run fails, while a denser one
    // succeeds. Failures must be recorded, not thrown.
    ExperimentConfig cfg;
    cfg.matrix.kind = SyntheticKind::BlockVStability;
    cfg.matrix.n = 600;
    cfg.matrix.d = 600;
    cfg.matrix.seed = 14;
    cfg.algorithms = {SketchKind::SparseSign};
    cfg.eps = {0.3};
    cfg.densities = {0.002, 0.2};
    cfg.block = 20;
    cfg.trials = 4;
    cfg.seed = 41;

    ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.cells.size() == 2);
    CHECK(rep.cells[0].p == 0.002);
    CHECK(rep.cells[1].p == 0.2);
    CHECK(rep.cells[0].success_rate < rep.cells[1].success_rate);
    CHECK(rep.cells[1].success_rate == 1.0);
    for (const ExperimentRecord& r : rep.records)
        if (!r.success) CHECK(!r.note.empty());
}

TEST_CASE("config files parse into the full grid description") {
    std::string path = tmp_path("cfg.json");
    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({
            "matrix": {"kind": "fastdecay", "n": 300, "seed": 7},
            "algorithms": ["gaussian", "sparsegaussian"],
            "eps": [0.01, 0.001],
            "power": 2,
            "p": [0.05],
            "relative": false,
            "block": 25,
            "max_iters": 9,
            "trials": 3,
            "seed": 99,
            "workers": 2,
            "out_prefix": "/tmp/foo"
        })";
    }
    ExperimentConfig cfg = load_experiment_config(path);
    CHECK(cfg.matrix.kind == SyntheticKind::FastDecay);
    CHECK(cfg.matrix.n == 300);
    CHECK(cfg.matrix.seed == 7);
    REQUIRE(cfg.algorithms.size() == 2);
    CHECK(cfg.algorithms[1] == SketchKind::SparseGaussian);
    CHECK(cfg.eps == std::vector<double>{0.01, 0.001});
    CHECK(cfg.ranks.empty());
    CHECK(cfg.powers == std::vector<int>{2});
    CHECK(cfg.densities == std::vector<double>{0.05});
    CHECK(!cfg.relative);
    CHECK(cfg.block == 25);
    CHECK(cfg.max_iters == 9);
    CHECK(cfg.trials == 3);
    CHECK(cfg.seed == 99);
    CHECK(cfg.workers == 2);
    CHECK(cfg.out_prefix == "/tmp/foo");
    std::remove(path.c_str());
}

TEST_CASE("config validation rejects inconsistent grids") {
    std::string path = tmp_path("badcfg.json");
    auto write = [&](const std::string& s) {
        std::ofstream out(path, std::ios::trunc);
        out << s;
    };

    write("{ not json");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

    // Both a tolerance sweep and a rank sweep.
    write(R"({"matrix": {"kind": "slowdecay", "n": 100},
              "algorithms": ["gaussian"], "eps": 0.01, "ranks": [5]})");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

    // Neither sweep.
    write(R"({"matrix": {"kind": "slowdecay", "n": 100},
              "algorithms": ["gaussian"]})");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

    write(R"({"matrix": {"kind": "slowdecay", "n": 100},
              "algorithms": ["gaussian"], "eps": -1})");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

    write(R"({"matrix": {"kind": "slowdecay", "n": 100},
              "algorithms": ["gaussian"], "ranks": [0]})");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

    write(R"({"matrix": {"kind": "slowdecay", "n": 100},
              "algorithms": ["gaussian"], "eps": 0.01, "p": 1.5})");
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("time_kernel reports ordered wall-clock statistics") {
    std::atomic<int> calls{0};
    TimingResult t = time_kernel([&] { calls++; }, 2, 1);
    CHECK(calls.load() == 3);
    CHECK(t.median == t.min);
    CHECK(t.median == t.max);
    CHECK(t.min >= 0.0);
    CHECK(t.median < 1e-3);

    calls = 0;
    TimingResult t5 = time_kernel([&] { calls++; }, 0, 5);
    CHECK(calls.load() == 5);
    CHECK(t5.min <= t5.median);
    CHECK(t5.median <= t5.max);

    CHECK_THROWS_AS(time_kernel([] {}, 0, 0), ConfigError);
}
