#include "slrt/report.hpp"

#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "slrt/numeric.hpp"

namespace slrt {

namespace {

std::string full(double v) { return format_double(v); }

std::string join_params(const VectorXd& v) {
    std::ostringstream os;
    for (Index i = 0; i < v.size(); ++i) os << (i ? ";" : "") << full(v(i));
    return os.str();
}

}  // namespace

void write_table_csv(std::ostream& out, const ExperimentResult& result) {
    std::ostringstream os;
    os << "setting,n,d,method,level,frequency,stderr,reps,seed\n";
    for (const auto& c : result.cells) {
        os << to_string(c.setting) << ',' << c.n << ',' << c.d << ',' << method_name(c.method)
           << ',' << full(c.level) << ',' << full(c.frequency) << ',' << full(c.mc_stderr) << ','
           << c.reps << ',' << c.seed << '\n';
    }
    out << os.str();
}

void write_records(std::ostream& out, const ExperimentResult& result) {
    std::ostringstream os;
    os << result.provenance << '\n';
    for (const auto& c : result.cells) {
        os << "setting=" << to_string(c.setting) << " n=" << c.n << " d=" << c.d
           << " method=" << method_name(c.method) << " level=" << full(c.level)
           << " frequency=" << full(c.frequency) << " stderr=" << full(c.mc_stderr)
           << " critical=" << full(c.critical_value) << " pen=" << full(c.pen)
           << " reps=" << c.reps << " failures=" << c.failures << " seed=" << c.seed << '\n';
    }
    out << os.str();
}

void print_table(std::ostream& out, const ExperimentResult& result) {
    using Key = std::tuple<Setting, long, long>;
    std::map<Key, std::map<Method, const CellResult*>> rows;
    for (const auto& c : result.cells) rows[{c.setting, c.d, c.n}][c.method] = &c;

    std::ostringstream os;
    os << std::fixed;
    os << std::left << std::setw(8) << "setting" << std::right << std::setw(6) << "d"
       << std::setw(7) << "n" << std::setw(12) << "B" << std::setw(12) << "S" << std::setw(12)
       << "crit(B)" << std::setw(12) << "crit(S)" << std::setw(11) << "sec/fit\n";
    for (const auto& [key, methods] : rows) {
        const auto& [setting, d, n] = key;
        os << std::left << std::setw(8) << to_string(setting) << std::right << std::setw(6) << d
           << std::setw(7) << n;
        auto col = [&](Method m, auto field, int prec) {
            auto it = methods.find(m);
            os << std::setw(12) << std::setprecision(prec);
            if (it == methods.end()) {
                os << "-";
            } else {
                os << field(*it->second);
            }
        };
        col(Method::Benchmark, [](const CellResult& c) { return c.frequency; }, 4);
        col(Method::Slrt, [](const CellResult& c) { return c.frequency; }, 4);
        col(Method::Benchmark, [](const CellResult& c) { return c.critical_value; }, 4);
        col(Method::Slrt, [](const CellResult& c) { return c.critical_value; }, 4);
        double secs = 0.0;
        for (const auto& [m, c] : methods) secs += c->mean_runtime;
        os << std::setw(10) << std::setprecision(3) << secs << '\n';
    }
    out << os.str();
}

void print_outcome(std::ostream& out, const TestOutcome& o) {
    std::ostringstream os;
    const auto& p = o.alt_fit.params;
    os << std::setprecision(6);
    os << "SLRT            " << o.slrt << '\n'
       << "p-value         " << o.p_value << '\n'
       << "penalty         " << o.pen_used << '\n'
       << "level           " << o.level << '\n'
       << "decision        " << (o.reject ? "reject H0 (subgroup present)" : "do not reject H0")
       << '\n'
       << "null loglik     " << o.null_fit.loglik << '\n'
       << "alt loglik      " << o.alt_fit.loglik << '\n'
       << "alt beta        " << p.beta << '\n'
       << "alt lambda      " << p.lambda << '\n'
       << "alt sigma2      " << p.sigma2 << '\n'
       << "alt ||gamma||_1 " << p.gamma.lpNorm<1>() << '\n'
       << "EM iterations   " << o.alt_fit.iterations << (o.alt_fit.converged ? "" : " (not converged)")
       << '\n';
    out << os.str();
}

void write_outcome_record(std::ostream& out, const TestOutcome& o) {
    const auto& p = o.alt_fit.params;
    std::ostringstream os;
    os << "slrt=" << full(o.slrt) << " p_value=" << full(o.p_value) << " pen=" << full(o.pen_used)
       << " level=" << full(o.level) << " reject=" << (o.reject ? 1 : 0)
       << " null_loglik=" << full(o.null_fit.loglik)
       << " null_alpha=" << join_params(o.null_fit.params.alpha)
       << " null_beta=" << full(o.null_fit.params.beta)
       << " null_sigma2=" << full(o.null_fit.params.sigma2)
       << " alt_loglik=" << full(o.alt_fit.loglik)
       << " alt_penalized_loglik=" << full(o.alt_fit.penalized_loglik)
       << " alt_alpha=" << join_params(p.alpha) << " alt_beta=" << full(p.beta)
       << " alt_lambda=" << full(p.lambda) << " alt_sigma2=" << full(p.sigma2)
       << " alt_gamma=" << join_params(p.gamma) << " iterations=" << o.alt_fit.iterations
       << " converged=" << (o.alt_fit.converged ? 1 : 0)
       << " start_index=" << o.alt_fit.start_index << '\n';
    out << os.str();
}

void print_calibration(std::ostream& out, const CalibrationResult& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << std::setw(7) << "n" << std::setw(6) << "d" << std::setw(12) << "bench" << std::setw(12)
       << "p_nd" << '\n';
    for (const auto& c : r.cells) {
        os << std::setw(7) << c.n << std::setw(6) << c.d << std::setw(12) << c.benchmark_frequency
           << std::setw(12);
        if (c.pen) {
            os << *c.pen;
        } else {
            os << "unresolved";
        }
        os << '\n';
    }
    if (r.fit) {
        os << "fit: p = " << r.fit->a << " + " << r.fit->b << " n^{7/8} sqrt(log d)\n";
    }
    for (const auto& w : r.warnings) os << "warning: " << w << '\n';
    out << os.str();
}

void write_calibration_csv(std::ostream& out, const CalibrationResult& r) {
    std::ostringstream os;
    os << "n,d,benchmark_frequency,pen,resolved\n";
    for (const auto& c : r.cells) {
        os << c.n << ',' << c.d << ',' << full(c.benchmark_frequency) << ','
           << (c.pen ? full(*c.pen) : "") << ',' << (c.pen ? 1 : 0) << '\n';
    }
    out << os.str();
}

}  // namespace slrt
