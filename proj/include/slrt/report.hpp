#pragma once

#include <iosfwd>

#include "slrt/experiment.hpp"
#include "slrt/inference.hpp"

namespace slrt {

// CSV with columns setting,n,d,method,level,frequency,stderr,reps,seed at full precision.
void write_table_csv(std::ostream& out, const ExperimentResult& result);

// Flat key=value records: a provenance line, then one line per cell.
void write_records(std::ostream& out, const ExperimentResult& result);

// Human-readable table, one row per (setting, d, n) with B/S columns, 4 decimals.
void print_table(std::ostream& out, const ExperimentResult& result);

void print_outcome(std::ostream& out, const TestOutcome& outcome);
// Single key=value line for a test outcome.
void write_outcome_record(std::ostream& out, const TestOutcome& outcome);

void print_calibration(std::ostream& out, const CalibrationResult& result);
void write_calibration_csv(std::ostream& out, const CalibrationResult& result);

}  // namespace slrt
