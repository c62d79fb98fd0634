#include "slrt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "slrt/errors.hpp"
#include "slrt/numeric.hpp"
#include "slrt/version.hpp"

namespace slrt {

unsigned default_thread_count() {
    if (const char* env = std::getenv("SLRT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double PenRule::pen_for(long n, long d) const {
    switch (kind) {
        case Kind::Formula: return tuning_pen(n, d, log_base);
        case Kind::Fixed: return value;
        case Kind::BenchmarkZero: return 0.0;
    }
    return 0.0;
}

std::string PenRule::describe() const {
    switch (kind) {
        case Kind::Formula: return log_base == LogBase::Natural ? "formula" : "formula_log10";
        case Kind::Fixed: {
            return "fixed:" + format_double(value);
        }
        case Kind::BenchmarkZero: return "benchmark_zero";
    }
    return "?";
}

PenRule PenRule::parse(const std::string& text) {
    PenRule r;
    if (text == "formula") return r;
    if (text == "formula_log10") {
        r.log_base = LogBase::Log10;
        return r;
    }
    if (text == "benchmark_zero") {
        r.kind = Kind::BenchmarkZero;
        return r;
    }
    if (text.rfind("fixed:", 0) == 0) {
        r.kind = Kind::Fixed;
        try {
            r.value = std::stod(text.substr(6));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad pen rule '" + text + "'");
        }
        if (!(r.value >= 0)) throw std::invalid_argument("fixed pen must be >= 0");
        return r;
    }
    throw std::invalid_argument("bad pen rule '" + text +
                                "' (expected formula, formula_log10, fixed:<value>, benchmark_zero)");
}

void ExperimentSpec::validate() const {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (!(level > 0.0 && level < 0.5)) throw std::invalid_argument("level must lie in (0, 0.5)");
    if (settings.empty() || ns.empty() || ds.empty()) {
        throw std::invalid_argument("settings, ns and ds must be non-empty");
    }
    for (long n : ns) {
        if (n < 2) throw std::invalid_argument("every n must be >= 2");
    }
    for (long d : ds) {
        if (d < 2) throw std::invalid_argument("every d must be >= 2");
    }
    if (!(lambda_true >= 0)) throw std::invalid_argument("lambda_true must be >= 0");
    em.validate();
}

namespace {

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << f(v[i]);
    return os.str();
}

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Size: return "size";
        case ExperimentKind::Power: return "power";
        case ExperimentKind::Calibrate: return "calibrate";
    }
    return "?";
}

}  // namespace

std::string ExperimentSpec::describe() const {
    auto f = [](double v) { return format_double(v); };
    std::ostringstream os;
    os << "code_version=" << kVersion << " kind=" << kind_name(kind)
       << " settings=" << join(settings, [](Setting s) { return to_string(s); })
       << " ns=" << join(ns, [](long v) { return v; })
       << " ds=" << join(ds, [](long v) { return v; }) << " reps=" << reps << " level=" << f(level)
       << " seed=" << seed << " pen_rule=" << pen_rule.describe()
       << " size_adjust=" << (size_adjust ? 1 : 0) << " lambda_true=" << f(lambda_true)
       << " em.max_iter=" << em.max_iter << " em.tol=" << f(em.tol)
       << " em.n_starts=" << em.n_starts << " em.cd_max_iter=" << em.cd_max_iter
       << " em.cd_tol=" << f(em.cd_tol) << " em.seed=" << em.seed
       << " em.sigma2_floor=" << f(em.sigma2_floor) << " em.u_lambda_scale=" << f(em.u_lambda_scale)
       << " em.boundary_candidate=" << (em.boundary_candidate ? 1 : 0);
    return os.str();
}

std::string method_name(Method m) { return m == Method::Slrt ? "SLRT" : "benchmark"; }

std::uint64_t replication_seed(std::uint64_t seed, Phase phase, Setting setting, long n, long d,
                               long rep) {
    return derive_seed(seed, {static_cast<std::uint64_t>(phase),
                              static_cast<std::uint64_t>(setting), static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(rep)});
}

std::uint64_t sigma_seed(std::uint64_t seed, long d) {
    return derive_seed(seed, {0x5161, static_cast<std::uint64_t>(d)});
}

ReplicationStats simulate_cell(const CellSpec& cell, int reps, std::uint64_t seed,
                               std::optional<double> pen, bool run_benchmark,
                               const EmConfig& em, unsigned threads) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ReplicationStats out;
    out.slrt.assign(static_cast<std::size_t>(reps), nan);
    out.lrt0.assign(static_cast<std::size_t>(reps), nan);
    std::vector<double> t_slrt(static_cast<std::size_t>(reps), 0.0);
    std::vector<double> t_lrt0(static_cast<std::size_t>(reps), 0.0);
    std::vector<char> failed(static_cast<std::size_t>(reps), 0);

    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
        using clock = std::chrono::steady_clock;
        DgpSpec dgp;
        dgp.setting = cell.setting;
        dgp.n = cell.n;
        dgp.d = cell.d;
        dgp.alternative = cell.phase == Phase::Alternative;
        dgp.lambda_true = cell.lambda_true;
        dgp.seed = replication_seed(seed, cell.phase, cell.setting, cell.n, cell.d,
                                    static_cast<long>(r));
        dgp.sigma_seed = sigma_seed(seed, cell.d);
        try {
            const Dataset ds = gen_dataset(dgp);
            const NullFit null_fit = fit_null(ds, em.sigma2_floor);
            if (pen) {
                const auto t0 = clock::now();
                const FitResult fit = fit_penalized(ds, *pen, em, null_fit);
                t_slrt[r] = std::chrono::duration<double>(clock::now() - t0).count();
                out.slrt[r] = 2.0 * (fit.loglik - null_fit.loglik);
            }
            if (run_benchmark) {
                const auto t0 = clock::now();
                out.lrt0[r] = benchmark_lrt(ds, em, null_fit);
                t_lrt0[r] = std::chrono::duration<double>(clock::now() - t0).count();
            }
        } catch (const FitError&) {
            failed[r] = 1;
        } catch (const DegenerateDesignError&) {
            failed[r] = 1;
        } catch (const DataError&) {
            failed[r] = 1;
        }
        if (failed[r]) {
            out.slrt[r] = nan;
            out.lrt0[r] = nan;
        }
    });

    for (std::size_t r = 0; r < failed.size(); ++r) {
        out.failures += failed[r];
        out.slrt_seconds += t_slrt[r];
        out.lrt0_seconds += t_lrt0[r];
    }
    return out;
}

double rejection_frequency(const std::vector<double>& stats, double critical) {
    long valid = 0;
    long rejected = 0;
    for (double s : stats) {
        if (std::isnan(s)) continue;
        ++valid;
        if (s > critical) ++rejected;
    }
    return valid == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(valid);
}

double empirical_quantile(std::vector<double> values, double prob) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("prob must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

void check_failures(const ReplicationStats& stats, int reps, const CellSpec& cell) {
    if (static_cast<double>(stats.failures) > 0.01 * reps) {
        throw FitError("cell setting=" + to_string(cell.setting) + " n=" +
                       std::to_string(cell.n) + " d=" + std::to_string(cell.d) + ": " +
                       std::to_string(stats.failures) + " of " + std::to_string(reps) +
                       " replications failed (> 1%)");
    }
}

CellResult make_cell(const CellSpec& cell, Method method, const std::vector<double>& stats,
                     double critical, double seconds, double pen, const ExperimentSpec& spec,
                     int failures) {
    CellResult c;
    c.setting = cell.setting;
    c.n = cell.n;
    c.d = cell.d;
    c.method = method;
    c.level = spec.level;
    c.critical_value = critical;
    c.pen = pen;
    c.failures = failures;
    c.seed = spec.seed;
    c.reps = static_cast<int>(std::count_if(stats.begin(), stats.end(),
                                            [](double s) { return !std::isnan(s); }));
    c.frequency = rejection_frequency(stats, critical);
    c.mc_stderr = c.reps > 0 ? std::sqrt(c.frequency * (1.0 - c.frequency) / c.reps) : 0.0;
    c.mean_runtime = c.reps > 0 ? seconds / c.reps : 0.0;
    return c;
}

}  // namespace

ExperimentResult run_size(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult result;
    result.provenance = spec.describe();
    const double critical = half_chisq_critical(spec.level);
    const bool with_slrt = spec.pen_rule.kind != PenRule::Kind::BenchmarkZero;

    for (Setting setting : spec.settings) {
        for (long d : spec.ds) {
            for (long n : spec.ns) {
                const CellSpec cell{setting, n, d, Phase::Null, 0.0};
                const std::optional<double> pen =
                    with_slrt ? std::optional<double>(spec.pen_rule.pen_for(n, d)) : std::nullopt;
                const ReplicationStats stats =
                    simulate_cell(cell, spec.reps, spec.seed, pen, true, spec.em, spec.threads);
                check_failures(stats, spec.reps, cell);
                result.cells.push_back(make_cell(cell, Method::Benchmark, stats.lrt0, critical,
                                                 stats.lrt0_seconds, 0.0, spec, stats.failures));
                if (with_slrt) {
                    result.cells.push_back(make_cell(cell, Method::Slrt, stats.slrt, critical,
                                                     stats.slrt_seconds, *pen, spec,
                                                     stats.failures));
                }
            }
        }
    }
    return result;
}

ExperimentResult run_power(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult result;
    result.provenance = spec.describe();
    const bool with_slrt = spec.pen_rule.kind != PenRule::Kind::BenchmarkZero;

    for (Setting setting : spec.settings) {
        for (long d : spec.ds) {
            for (long n : spec.ns) {
                const std::optional<double> pen =
                    with_slrt ? std::optional<double>(spec.pen_rule.pen_for(n, d)) : std::nullopt;
                double crit_b = half_chisq_critical(spec.level);
                double crit_s = crit_b;
                if (spec.size_adjust) {
                    const CellSpec null_cell{setting, n, d, Phase::Null, 0.0};
                    const ReplicationStats null_stats = simulate_cell(
                        null_cell, spec.reps, spec.seed, pen, true, spec.em, spec.threads);
                    check_failures(null_stats, spec.reps, null_cell);
                    crit_b = empirical_quantile(null_stats.lrt0, 1.0 - spec.level);
                    if (with_slrt) crit_s = empirical_quantile(null_stats.slrt, 1.0 - spec.level);
                }
                const CellSpec alt{setting, n, d, Phase::Alternative, spec.lambda_true};
                const ReplicationStats stats =
                    simulate_cell(alt, spec.reps, spec.seed, pen, true, spec.em, spec.threads);
                check_failures(stats, spec.reps, alt);
                result.cells.push_back(make_cell(alt, Method::Benchmark, stats.lrt0, crit_b,
                                                 stats.lrt0_seconds, 0.0, spec, stats.failures));
                if (with_slrt) {
                    result.cells.push_back(make_cell(alt, Method::Slrt, stats.slrt, crit_s,
                                                     stats.slrt_seconds, *pen, spec,
                                                     stats.failures));
                }
            }
        }
    }
    return result;
}

TuningFit fit_tuning_coefficients(const std::vector<TuningPoint>& points) {
    const auto m = static_cast<Index>(points.size());
    MatrixXd a(m, 2);
    VectorXd b(m);
    for (Index i = 0; i < m; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (p.n < 2 || p.d < 2) throw std::invalid_argument("tuning points need n, d >= 2");
        a(i, 0) = 1.0;
        a(i, 1) = std::pow(static_cast<double>(p.n), 7.0 / 8.0) *
                  std::sqrt(std::log(static_cast<double>(p.d)));
        b(i) = p.pen;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (m < 2 || qr.rank() < 2) {
        throw DegenerateDesignError("tuning regression needs two distinct n^{7/8} sqrt(log d) values");
    }
    const VectorXd coef = qr.solve(b);
    return TuningFit{coef(0), coef(1)};
}

CalibrationResult calibrate_formula(const std::vector<long>& ns, const std::vector<long>& ds,
                                    const std::vector<double>& candidate_pens, int reps,
                                    double window, std::uint64_t seed, double level,
                                    const EmConfig& em, unsigned threads) {
    if (candidate_pens.empty()) throw std::invalid_argument("candidate_pens must be non-empty");
    if (!std::is_sorted(candidate_pens.begin(), candidate_pens.end())) {
        throw std::invalid_argument("candidate_pens must be sorted ascending");
    }
    if (!(window > 0)) throw std::invalid_argument("window must be > 0");
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (ns.empty() || ds.empty()) throw std::invalid_argument("ns and ds must be non-empty");

    CalibrationResult out;
    out.candidate_pens = candidate_pens;
    const double critical = half_chisq_critical(level);

    for (long n : ns) {
        // Under the null (y, x, D) does not depend on d, so one benchmark per n.
        const CellSpec bench_cell{Setting::I, n, ds.front(), Phase::Null, 0.0};
        const ReplicationStats bench =
            simulate_cell(bench_cell, reps, seed, std::nullopt, true, em, threads);
        check_failures(bench, reps, bench_cell);
        const double f_bench = rejection_frequency(bench.lrt0, critical);

        for (long d : ds) {
            CalibrationCell cc;
            cc.n = n;
            cc.d = d;
            cc.benchmark_frequency = f_bench;
            const CellSpec cell{Setting::I, n, d, Phase::Null, 0.0};
            for (double pen : candidate_pens) {
                const ReplicationStats s =
                    simulate_cell(cell, reps, seed, pen, false, em, threads);
                check_failures(s, reps, cell);
                const double f = rejection_frequency(s.slrt, critical);
                cc.slrt_frequencies.push_back(f);
                if (!cc.pen && std::abs(f - f_bench) <= window) {
                    cc.pen = pen;
                    break;
                }
            }
            if (!cc.pen) {
                out.warnings.push_back("n=" + std::to_string(n) + " d=" + std::to_string(d) +
                                       ": no candidate pen within the window; cell excluded");
            }
            out.cells.push_back(std::move(cc));
        }
    }

    std::vector<TuningPoint> points;
    for (const auto& c : out.cells) {
        if (c.pen) points.push_back({c.n, c.d, *c.pen});
    }
    try {
        out.fit = fit_tuning_coefficients(points);
    } catch (const DegenerateDesignError& e) {
        out.warnings.push_back(std::string("regression not fitted: ") + e.what());
    }
    return out;
}

}  // namespace slrt
