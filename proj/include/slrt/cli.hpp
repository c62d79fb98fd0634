#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slrt/experiment.hpp"

namespace slrt {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

struct ExperimentConfig {
    ExperimentSpec spec;
    std::vector<double> pens;  // calibrate candidates
    double window = 0.003;     // calibrate
};

// Flat "key = value" file; '#' starts a comment. Lists are comma separated.
// Keys: kind, settings, ns, ds, reps, level, seed, pen_rule, size_adjust,
// lambda_true, threads, pens, window, em.max_iter, em.tol, em.n_starts,
// em.cd_max_iter, em.cd_tol, em.seed, em.sigma2_floor, em.u_lambda_scale,
// em.boundary_candidate. Unknown keys or bad values throw std::invalid_argument.
void apply_config(std::istream& in, ExperimentConfig& cfg);

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace slrt
