#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slrt/em.hpp"
#include "slrt/inference.hpp"
#include "slrt/simgen.hpp"

namespace slrt {

// Worker count: $SLRT_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

// Runs body(i) for i in [0, count) on `threads` workers (0 = default).
// Exceptions from body propagate after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

enum class ExperimentKind { Size, Power, Calibrate };

struct PenRule {
    enum class Kind { Formula, Fixed, BenchmarkZero };
    Kind kind = Kind::Formula;
    double value = 0.0;  // Fixed only
    LogBase log_base = LogBase::Natural;

    double pen_for(long n, long d) const;
    std::string describe() const;
    // "formula", "fixed:<value>" or "benchmark_zero"; throws std::invalid_argument.
    static PenRule parse(const std::string& text);
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Size;
    std::vector<Setting> settings{Setting::I};
    std::vector<long> ns{500};
    std::vector<long> ds{10};
    int reps = 2000;
    double level = 0.05;
    std::uint64_t seed = 20;
    PenRule pen_rule;
    bool size_adjust = true;   // power only
    double lambda_true = 1.0;  // power only
    EmConfig em;
    unsigned threads = 0;

    void validate() const;
    std::string describe() const;  // flat key=value echo
};

enum class Method { Benchmark, Slrt };
std::string method_name(Method m);

struct CellResult {
    Setting setting = Setting::I;
    long n = 0;
    long d = 0;
    Method method = Method::Slrt;
    double level = 0.05;
    double frequency = 0.0;
    double mc_stderr = 0.0;
    double critical_value = 0.0;
    double mean_runtime = 0.0;  // seconds per fit; not written to result files
    double pen = 0.0;
    int reps = 0;  // successful replications
    int failures = 0;
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::string provenance;
};

// Per-replication statistics of one simulation cell.
struct ReplicationStats {
    std::vector<double> slrt;  // NaN where the replication failed
    std::vector<double> lrt0;
    double slrt_seconds = 0.0;
    double lrt0_seconds = 0.0;
    int failures = 0;
};

enum class Phase : std::uint64_t { Null = 0, Alternative = 1 };

// Replication seed: a function of (seed, phase, setting, n, d, rep) only, so
// cells never share or perturb each other's streams.
std::uint64_t replication_seed(std::uint64_t seed, Phase phase, Setting setting, long n, long d,
                               long rep);
// Setting II's Sigma is drawn once per (seed, d).
std::uint64_t sigma_seed(std::uint64_t seed, long d);

struct CellSpec {
    Setting setting = Setting::I;
    long n = 0;
    long d = 0;
    Phase phase = Phase::Null;
    double lambda_true = 1.0;
};

// Simulates `reps` datasets for the cell and computes SLRT (when pen is set)
// and the gamma = 0 benchmark statistic (when run_benchmark).
ReplicationStats simulate_cell(const CellSpec& cell, int reps, std::uint64_t seed,
                               std::optional<double> pen, bool run_benchmark,
                               const EmConfig& em, unsigned threads);

// Rejection frequency of stat > critical over the finite entries.
double rejection_frequency(const std::vector<double>& stats, double critical);

// Sample quantile with linear interpolation between order statistics (Hyndman-Fan type 7).
double empirical_quantile(std::vector<double> values, double prob);

ExperimentResult run_size(const ExperimentSpec& spec);
ExperimentResult run_power(const ExperimentSpec& spec);

struct TuningPoint {
    long n = 0;
    long d = 0;
    double pen = 0.0;
};

struct TuningFit {
    double a = 0.0;
    double b = 0.0;
};

// Least squares of pen on (1, n^{7/8} sqrt(ln d)). Throws DegenerateDesignError
// when the regressor does not vary across points.
TuningFit fit_tuning_coefficients(const std::vector<TuningPoint>& points);

struct CalibrationCell {
    long n = 0;
    long d = 0;
    double benchmark_frequency = 0.0;
    std::vector<double> slrt_frequencies;  // candidates in order, up to the selected one
    std::optional<double> pen;             // smallest candidate within the window
};

struct CalibrationResult {
    std::vector<double> candidate_pens;
    std::vector<CalibrationCell> cells;
    std::optional<TuningFit> fit;
    std::vector<std::string> warnings;
};

// For each n the benchmark rejection frequency is computed; for each (n, d) the
// smallest candidate pen whose SLRT frequency is within `window` of it is
// selected, and (a, b) is fitted on the resolved cells. Unresolved cells are
// excluded with a warning.
CalibrationResult calibrate_formula(const std::vector<long>& ns, const std::vector<long>& ds,
                                    const std::vector<double>& candidate_pens, int reps,
                                    double window, std::uint64_t seed, double level = 0.05,
                                    const EmConfig& em = {}, unsigned threads = 0);

}  // namespace slrt
