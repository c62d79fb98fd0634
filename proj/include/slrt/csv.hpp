#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "slrt/dataset.hpp"

namespace slrt {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180: comma separated, optional double-quoted fields with "" escapes,
// CRLF or LF line endings, first record is the header. Throws DataError on
// unterminated quotes or rows whose width differs from the header.
CsvTable parse_csv(std::istream& in);

struct IngestSchema {
    std::string y_col;
    std::string d_col;
    std::vector<std::string> x_cols;
    std::vector<std::string> z_cols;
    bool standardize_z = false;
};

struct IngestResult {
    Dataset dataset;
    std::size_t dropped_rows = 0;  // rows with an empty or NA cell in a used column
};

// Builds a Dataset from named columns, prepending intercepts to X and Z.
// With standardize_z each non-intercept Z column is centered and scaled to unit
// sample standard deviation (divisor n - 1). Errors are DataError: missing
// column, non-numeric cell (reported with line and column), zero-variance Z
// column under standardization, or a violated Dataset invariant.
IngestResult ingest_csv(std::istream& in, const IngestSchema& schema);
IngestResult ingest_csv_file(const std::string& path, const IngestSchema& schema);

// Writes y, d, x1.., z1.. (intercept columns omitted) with round-trip precision.
void write_dataset_csv(std::ostream& out, const Dataset& ds);

}  // namespace slrt
