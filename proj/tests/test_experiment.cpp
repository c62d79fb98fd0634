#include <doctest.h>

#include <cmath>
#include <sstream>

#include "slrt/cli.hpp"
#include "slrt/errors.hpp"
#include "slrt/experiment.hpp"
#include "slrt/report.hpp"

using namespace slrt;

namespace {

ExperimentSpec small_size_spec() {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Size;
    spec.settings = {Setting::I, Setting::II};
    spec.ns = {60};
    spec.ds = {3};
    spec.reps = 12;
    spec.seed = 5;
    spec.em.n_starts = 2;
    return spec;
}

std::string files_of(const ExperimentResult& r) {
    std::ostringstream os;
    write_table_csv(os, r);
    write_records(os, r);
    return os.str();
}

}  // namespace

TEST_CASE("fit_tuning_coefficients") {
    std::vector<TuningPoint> pts;
    for (long n : {100, 250, 500, 1000}) {
        for (long d : {10, 50, 100}) pts.push_back({n, d, 5.0});
    }
    TuningFit f = fit_tuning_coefficients(pts);
    CHECK(f.a == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(f.b) <= 1e-12);

    for (auto& p : pts) p.pen = tuning_pen(p.n, p.d);
    f = fit_tuning_coefficients(pts);
    CHECK(std::abs(f.a - 6.3383) < 5e-5);
    CHECK(std::abs(f.b - 0.0086) < 5e-5);

    const std::vector<TuningPoint> two{{100, 10, 7.0}, {1000, 10, 9.0}};
    f = fit_tuning_coefficients(two);
    for (const auto& p : two) {
        const double r = std::pow(static_cast<double>(p.n), 0.875) * std::sqrt(std::log(p.d));
        CHECK(f.a + f.b * r == doctest::Approx(p.pen).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fit_tuning_coefficients({{100, 10, 7.0}, {100, 10, 8.0}}),
                    DegenerateDesignError);
}

TEST_CASE("empirical_quantile and rejection_frequency") {
    CHECK(empirical_quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(empirical_quantile({1, 2, 3, 4, 5}, 0.9) == doctest::Approx(4.6));
    CHECK(empirical_quantile({7}, 0.95) == 7.0);
    CHECK(empirical_quantile({1, NAN, 3}, 1.0) == 3.0);
    CHECK(rejection_frequency({0.0, 1.0, 3.0, NAN}, 2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(rejection_frequency({2.0}, 2.0) == 0.0);
}

TEST_CASE("PenRule") {
    CHECK(PenRule::parse("formula").pen_for(100, 10) == tuning_pen(100, 10));
    CHECK(PenRule::parse("formula_log10").pen_for(100, 10) ==
          tuning_pen(100, 10, LogBase::Log10));
    CHECK(PenRule::parse("fixed:3.5").pen_for(100, 10) == 3.5);
    CHECK(PenRule::parse("benchmark_zero").kind == PenRule::Kind::BenchmarkZero);
    CHECK_THROWS_AS(PenRule::parse("fixed:abc"), std::invalid_argument);
    CHECK_THROWS_AS(PenRule::parse("bic"), std::invalid_argument);
}

TEST_CASE("replication seeds depend only on the cell coordinates") {
    const auto s = replication_seed(20, Phase::Null, Setting::I, 500, 10, 3);
    CHECK(s == replication_seed(20, Phase::Null, Setting::I, 500, 10, 3));
    CHECK(s != replication_seed(20, Phase::Alternative, Setting::I, 500, 10, 3));
    CHECK(s != replication_seed(20, Phase::Null, Setting::II, 500, 10, 3));
    CHECK(s != replication_seed(20, Phase::Null, Setting::I, 500, 10, 4));
    CHECK(s != replication_seed(21, Phase::Null, Setting::I, 500, 10, 3));
    CHECK(sigma_seed(20, 10) != sigma_seed(20, 50));
}

TEST_CASE("run_size: single replication") {
    ExperimentSpec spec = small_size_spec();
    spec.settings = {Setting::I};
    spec.reps = 1;
    const ExperimentResult r = run_size(spec);
    REQUIRE(r.cells.size() == 2);
    for (const CellResult& c : r.cells) {
        CHECK((c.frequency == 0.0 || c.frequency == 1.0));
        CHECK(c.mc_stderr == 0.0);
        CHECK(c.reps == 1);
    }
}

TEST_CASE("run_size: cells, stderr and thread-independent output") {
    ExperimentSpec spec = small_size_spec();
    spec.threads = 1;
    const ExperimentResult one = run_size(spec);
    spec.threads = 3;
    const ExperimentResult three = run_size(spec);
    CHECK(files_of(one) == files_of(three));
    REQUIRE(one.cells.size() == 4);
    for (const CellResult& c : one.cells) {
        CHECK(c.frequency >= 0.0);
        CHECK(c.frequency <= 1.0);
        CHECK(c.mc_stderr == doctest::Approx(std::sqrt(c.frequency * (1 - c.frequency) / c.reps)));
        CHECK(c.critical_value == doctest::Approx(half_chisq_critical(0.05)));
    }
    CHECK(one.provenance.find("reps=12") != std::string::npos);

    // Adding a cell does not disturb the existing ones.
    spec.ds = {3, 4};
    const ExperimentResult more = run_size(spec);
    for (const CellResult& c : one.cells) {
        bool found = false;
        for (const CellResult& m : more.cells) {
            if (m.setting == c.setting && m.n == c.n && m.d == c.d && m.method == c.method) {
                CHECK(m.frequency == c.frequency);
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("run_size: benchmark_zero runs only the benchmark") {
    ExperimentSpec spec = small_size_spec();
    spec.settings = {Setting::III};
    spec.pen_rule = PenRule::parse("benchmark_zero");
    const ExperimentResult r = run_size(spec);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].method == Method::Benchmark);
}

TEST_CASE("run_power: lambda_true = 0 behaves like size") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Power;
    spec.ns = {80};
    spec.ds = {3};
    spec.reps = 400;
    spec.seed = 11;
    spec.lambda_true = 0.0;
    spec.em.n_starts = 2;
    const ExperimentResult r = run_power(spec);
    REQUIRE(r.cells.size() == 2);
    for (const CellResult& c : r.cells) {
        const double se = std::sqrt(0.05 * 0.95 / c.reps);
        CHECK(std::abs(c.frequency - 0.05) <= 3 * se);
    }
}

TEST_CASE("calibrate_formula: first candidate inside the window wins") {
    // A window of 1 admits any frequency, so every cell resolves to the first candidate.
    const CalibrationResult r =
        calibrate_formula({60, 120}, {3, 6}, {5.0, 9.0}, 4, 1.0, 3, 0.05, EmConfig{}, 1);
    REQUIRE(r.cells.size() == 4);
    for (const CalibrationCell& c : r.cells) {
        REQUIRE(c.pen.has_value());
        CHECK(*c.pen == 5.0);
        CHECK(c.slrt_frequencies.size() == 1);
    }
    REQUIRE(r.fit.has_value());
    CHECK(r.fit->a == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(r.fit->b) <= 1e-12);
    CHECK(r.warnings.empty());
}

TEST_CASE("calibrate_formula: unresolved cells are flagged") {
    const CalibrationResult r =
        calibrate_formula({60}, {3, 6}, {0.0, 0.5}, 8, 1e-12, 4, 0.05, EmConfig{}, 1);
    for (const CalibrationCell& c : r.cells) {
        if (c.pen) continue;
        CHECK(c.slrt_frequencies.size() == 2);
        const std::string tag = "n=60 d=" + std::to_string(c.d);
        bool warned = false;
        for (const std::string& w : r.warnings) warned = warned || w.find(tag) != std::string::npos;
        CHECK(warned);
    }
}

TEST_CASE("apply_config") {
    ExperimentConfig cfg;
    std::istringstream in(
        "# size run\n"
        "kind = power\n"
        "settings = I, III\n"
        "ns = 100,200\n"
        "ds = 10\n"
        "reps = 50\n"
        "level = 0.1\n"
        "seed = 7\n"
        "pen_rule = fixed:4\n"
        "size_adjust = false\n"
        "em.n_starts = 3\n"
        "em.boundary_candidate = true\n"
        "pens = 1,2,3\n"
        "window = 0.01\n");
    apply_config(in, cfg);
    CHECK(cfg.spec.kind == ExperimentKind::Power);
    CHECK(cfg.spec.settings == std::vector<Setting>{Setting::I, Setting::III});
    CHECK(cfg.spec.ns == std::vector<long>{100, 200});
    CHECK(cfg.spec.reps == 50);
    CHECK(cfg.spec.level == 0.1);
    CHECK(cfg.spec.seed == 7);
    CHECK(cfg.spec.pen_rule.kind == PenRule::Kind::Fixed);
    CHECK_FALSE(cfg.spec.size_adjust);
    CHECK(cfg.spec.em.n_starts == 3);
    CHECK(cfg.pens == std::vector<double>{1, 2, 3});
    CHECK(cfg.window == 0.01);

    std::istringstream unknown("colour = red\n");
    CHECK_THROWS_AS(apply_config(unknown, cfg), std::invalid_argument);
    std::istringstream bad("reps = many\n");
    CHECK_THROWS_AS(apply_config(bad, cfg), std::invalid_argument);
}
