#include "slrt/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "slrt/csv.hpp"
#include "slrt/errors.hpp"
#include "slrt/inference.hpp"
#include "slrt/numeric.hpp"
#include "slrt/report.hpp"
#include "slrt/simgen.hpp"
#include "slrt/version.hpp"

namespace slrt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    std::istringstream is(v);
    T out{};
    is >> out;
    if (is.fail() || !is.eof()) throw std::invalid_argument("bad value for '" + key + "': " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("bad boolean for '" + key + "': " + v);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
    return out;
}

ExperimentKind parse_kind(const std::string& v) {
    if (v == "size") return ExperimentKind::Size;
    if (v == "power") return ExperimentKind::Power;
    if (v == "calibrate") return ExperimentKind::Calibrate;
    throw std::invalid_argument("bad kind: " + v);
}

std::vector<Setting> parse_settings(const std::vector<std::string>& items) {
    std::vector<Setting> out;
    for (const auto& s : items) out.push_back(parse_setting(s));
    return out;
}

// Options shared by the EM-driven subcommands.
struct EmFlags {
    CLI::Option* starts = nullptr;
    CLI::Option* max_iter = nullptr;
    CLI::Option* tol = nullptr;
    CLI::Option* em_seed = nullptr;
    int starts_v = 0;
    int max_iter_v = 0;
    double tol_v = 0.0;
    std::uint64_t em_seed_v = 0;

    void add(CLI::App* app) {
        starts = app->add_option("--starts", starts_v, "EM initializations per fit");
        max_iter = app->add_option("--max-iter", max_iter_v, "EM iteration cap");
        tol = app->add_option("--tol", tol_v, "EM tolerance per observation");
        em_seed = app->add_option("--em-seed", em_seed_v, "seed for perturbed EM starts");
    }
    void apply(EmConfig& em) const {
        if (starts->count()) em.n_starts = starts_v;
        if (max_iter->count()) em.max_iter = max_iter_v;
        if (tol->count()) em.tol = tol_v;
        if (em_seed->count()) em.seed = em_seed_v;
    }
};

struct ExperimentFlags {
    std::string config_path;
    std::vector<std::string> settings;
    std::vector<long> ns, ds;
    int reps = 0;
    std::uint64_t seed = 0;
    double level = 0.0;
    std::string pen_rule;
    double lambda_true = 1.0;
    bool no_size_adjust = false;
    unsigned threads = 0;
    std::vector<double> pens;
    double window = 0.0;
    std::string out_path;
    std::string record_path;

    CLI::Option *o_settings{}, *o_ns{}, *o_ds{}, *o_reps{}, *o_seed{}, *o_level{}, *o_pen{},
        *o_lambda{}, *o_nsa{}, *o_threads{}, *o_pens{}, *o_window{};
    EmFlags em;

    void add(CLI::App* app, ExperimentKind kind) {
        app->add_option("--config", config_path, "flat key = value experiment file");
        if (kind != ExperimentKind::Calibrate) {
            o_settings = app->add_option("--setting", settings, "settings (I, II, III, IV)")
                             ->delimiter(',');
        }
        o_ns = app->add_option("--n", ns, "sample sizes")->delimiter(',');
        o_ds = app->add_option("--d", ds, "Z dimensions, intercept included")->delimiter(',');
        o_reps = app->add_option("--reps", reps, "replications per cell");
        o_seed = app->add_option("--seed", seed, "experiment seed");
        o_level = app->add_option("--level", level, "test level in (0, 0.5)");
        o_threads = app->add_option("--threads", threads, "worker threads (default: $SLRT_THREADS or all cores)");
        if (kind != ExperimentKind::Calibrate) {
            o_pen = app->add_option("--pen-rule", pen_rule,
                                    "formula | formula_log10 | fixed:<value> | benchmark_zero");
        }
        if (kind == ExperimentKind::Power) {
            o_lambda = app->add_option("--lambda-true", lambda_true, "subgroup effect under H1");
            o_nsa = app->add_flag("--no-size-adjust", no_size_adjust,
                                  "use asymptotic critical values");
        }
        if (kind == ExperimentKind::Calibrate) {
            o_pens = app->add_option("--pens", pens, "candidate penalties, ascending")
                         ->delimiter(',');
            o_window = app->add_option("--window", window, "allowed |SLRT - benchmark| frequency gap");
        }
        app->add_option("--out", out_path, "CSV table output file");
        app->add_option("--record", record_path, "key=value record output file");
        em.add(app);
    }

    ExperimentConfig build(ExperimentKind kind) const {
        ExperimentConfig cfg;
        if (kind == ExperimentKind::Power) cfg.spec.reps = 1000;
        if (kind == ExperimentKind::Calibrate) {
            cfg.spec.seed = 10;
            cfg.spec.ns = {100, 250, 500, 750, 1000};
            cfg.spec.ds = {10, 25, 50, 75, 100};
        }
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
            apply_config(in, cfg);
        }
        cfg.spec.kind = kind;
        if (o_settings && o_settings->count()) cfg.spec.settings = parse_settings(settings);
        if (o_ns->count()) cfg.spec.ns = ns;
        if (o_ds->count()) cfg.spec.ds = ds;
        if (o_reps->count()) cfg.spec.reps = reps;
        if (o_seed->count()) cfg.spec.seed = seed;
        if (o_level->count()) cfg.spec.level = level;
        if (o_threads->count()) cfg.spec.threads = threads;
        if (o_pen && o_pen->count()) cfg.spec.pen_rule = PenRule::parse(pen_rule);
        if (o_lambda && o_lambda->count()) cfg.spec.lambda_true = lambda_true;
        if (o_nsa && o_nsa->count()) cfg.spec.size_adjust = !no_size_adjust;
        if (o_pens && o_pens->count()) cfg.pens = pens;
        if (o_window && o_window->count()) cfg.window = window;
        em.apply(cfg.spec.em);
        cfg.spec.validate();
        return cfg;
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    f << content;
}

}  // namespace

void apply_config(std::istream& in, ExperimentConfig& cfg) {
    std::string line;
    int lineno = 0;
    auto& s = cfg.spec;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (key == "kind") s.kind = parse_kind(v);
        else if (key == "settings") s.settings = parse_settings(split_list(v));
        else if (key == "ns") s.ns = parse_list<long>(key, v);
        else if (key == "ds") s.ds = parse_list<long>(key, v);
        else if (key == "reps") s.reps = parse_number<int>(key, v);
        else if (key == "level") s.level = parse_number<double>(key, v);
        else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "pen_rule") s.pen_rule = PenRule::parse(v);
        else if (key == "size_adjust") s.size_adjust = parse_bool(key, v);
        else if (key == "lambda_true") s.lambda_true = parse_number<double>(key, v);
        else if (key == "threads") s.threads = parse_number<unsigned>(key, v);
        else if (key == "pens") cfg.pens = parse_list<double>(key, v);
        else if (key == "window") cfg.window = parse_number<double>(key, v);
        else if (key == "em.max_iter") s.em.max_iter = parse_number<int>(key, v);
        else if (key == "em.tol") s.em.tol = parse_number<double>(key, v);
        else if (key == "em.n_starts") s.em.n_starts = parse_number<int>(key, v);
        else if (key == "em.cd_max_iter") s.em.cd_max_iter = parse_number<int>(key, v);
        else if (key == "em.cd_tol") s.em.cd_tol = parse_number<double>(key, v);
        else if (key == "em.seed") s.em.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "em.sigma2_floor") s.em.sigma2_floor = parse_number<double>(key, v);
        else if (key == "em.u_lambda_scale") s.em.u_lambda_scale = parse_number<double>(key, v);
        else if (key == "em.boundary_candidate") s.em.boundary_candidate = parse_bool(key, v);
        else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shrinkage likelihood ratio test for a treatment-effect subgroup"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // test
    auto* test = app.add_subcommand("test", "run the SLRT on a CSV dataset");
    IngestSchema schema;
    std::string input;
    double level = 0.05;
    std::optional<double> pen;
    bool log10 = false;
    std::string test_record;
    EmFlags test_em;
    test->add_option("--input", input, "CSV file with a header row")->required();
    test->add_option("--y", schema.y_col, "outcome column")->required();
    test->add_option("--d", schema.d_col, "treatment column")->required();
    test->add_option("--x", schema.x_cols, "confounder columns")->delimiter(',');
    test->add_option("--z", schema.z_cols, "classification columns")->delimiter(',');
    test->add_flag("--standardize-z", schema.standardize_z, "standardize Z columns");
    test->add_option("--level", level, "test level");
    test->add_option("--pen", pen, "L1 penalty (default: tuning formula)");
    test->add_flag("--log10", log10, "use log10 in the tuning formula");
    test->add_option("--record", test_record, "append the key=value record to this file");
    test_em.add(test);

    ExperimentFlags size_flags, power_flags, cal_flags;
    auto* size = app.add_subcommand("simulate-size", "Monte Carlo type I error");
    size_flags.add(size, ExperimentKind::Size);
    auto* power = app.add_subcommand("simulate-power", "Monte Carlo (size-adjusted) power");
    power_flags.add(power, ExperimentKind::Power);
    auto* cal = app.add_subcommand("calibrate", "recalibrate the tuning formula");
    cal_flags.add(cal, ExperimentKind::Calibrate);

    // gen
    auto* gen = app.add_subcommand("gen", "write a synthetic dataset as CSV");
    DgpSpec dgp;
    std::string gen_setting = "I";
    std::string gen_out;
    gen->add_option("--setting", gen_setting, "I, II, III or IV");
    gen->add_option("--n", dgp.n, "rows");
    gen->add_option("--d", dgp.d, "Z columns including the intercept");
    gen->add_option("--seed", dgp.seed, "seed");
    gen->add_flag("--alternative", dgp.alternative, "draw from the subgroup alternative");
    gen->add_option("--lambda-true", dgp.lambda_true, "subgroup effect");
    gen->add_option("--out", gen_out, "output file (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*test) {
            EmConfig em;
            test_em.apply(em);
            em.validate();
            if (!(level > 0 && level < 0.5)) throw std::invalid_argument("level must lie in (0, 0.5)");
            const IngestResult ing = ingest_csv_file(input, schema);
            if (ing.dropped_rows > 0) {
                err << "dropped " << ing.dropped_rows << " row(s) with missing values\n";
            }
            const Dataset& ds = ing.dataset;
            const double p = pen ? *pen : tuning_pen(ds.n(), std::max<Index>(ds.dz(), 2),
                                                     log10 ? LogBase::Log10 : LogBase::Natural);
            if (!(p >= 0)) throw std::invalid_argument("--pen must be >= 0");
            const TestOutcome outcome = compute_slrt(ds, p, em, level);
            print_outcome(out, outcome);
            write_outcome_record(out, outcome);
            if (!test_record.empty()) {
                std::ostringstream rec;
                write_outcome_record(rec, outcome);
                std::ofstream f(test_record, std::ios::app);
                if (!f) throw DataError("cannot write '" + test_record + "'");
                f << rec.str();
            }
            return kExitOk;
        }
        if (*size || *power) {
            const ExperimentKind kind = *size ? ExperimentKind::Size : ExperimentKind::Power;
            const ExperimentFlags& flags = *size ? size_flags : power_flags;
            const ExperimentConfig cfg = flags.build(kind);
            const ExperimentResult res =
                kind == ExperimentKind::Size ? run_size(cfg.spec) : run_power(cfg.spec);
            print_table(out, res);
            write_records(out, res);
            if (!flags.out_path.empty()) {
                std::ostringstream os;
                write_table_csv(os, res);
                write_file(flags.out_path, os.str());
            }
            if (!flags.record_path.empty()) {
                std::ostringstream os;
                write_records(os, res);
                write_file(flags.record_path, os.str());
            }
            return kExitOk;
        }
        if (*cal) {
            const ExperimentConfig cfg = cal_flags.build(ExperimentKind::Calibrate);
            if (cfg.pens.empty()) throw std::invalid_argument("calibrate needs --pens or pens = ...");
            const CalibrationResult res =
                calibrate_formula(cfg.spec.ns, cfg.spec.ds, cfg.pens, cfg.spec.reps, cfg.window,
                                  cfg.spec.seed, cfg.spec.level, cfg.spec.em, cfg.spec.threads);
            print_calibration(out, res);
            if (res.fit) {
                out << "a=" << format_double(res.fit->a) << " b=" << format_double(res.fit->b)
                    << '\n';
            }
            if (!cal_flags.out_path.empty()) {
                std::ostringstream os;
                write_calibration_csv(os, res);
                write_file(cal_flags.out_path, os.str());
            }
            return kExitOk;
        }
        if (*gen) {
            dgp.setting = parse_setting(gen_setting);
            const Dataset ds = gen_dataset(dgp);
            if (gen_out.empty()) {
                write_dataset_csv(out, ds);
            } else {
                std::ostringstream os;
                write_dataset_csv(os, ds);
                write_file(gen_out, os.str());
            }
            return kExitOk;
        }
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DegenerateDesignError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const FitError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace slrt
