#include "slrt/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "slrt/errors.hpp"
#include "slrt/numeric.hpp"

namespace slrt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
    const std::string t = trim(cell);
    return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan";
}

std::size_t column_index(const CsvTable& t, const std::string& name) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j] == name) return j;
    }
    throw DataError("column '" + name + "' not found in CSV header");
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& col) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw DataError("non-numeric value '" + cell + "' at line " + std::to_string(line) +
                        ", column '" + col + "'");
    }
    return v;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) throw DataError("stray quote at line " + std::to_string(line));
                quoted = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted field");
    if (!field.empty() || !record.empty()) end_record();

    if (records.empty()) throw DataError("CSV has no header row");
    CsvTable table;
    table.header = std::move(records.front());
    for (auto& h : table.header) h = trim(h);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw DataError("record " + std::to_string(r + 1) + " has " +
                            std::to_string(records[r].size()) + " fields, header has " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

IngestResult ingest_csv(std::istream& in, const IngestSchema& schema) {
    const CsvTable table = parse_csv(in);
    const std::size_t yj = column_index(table, schema.y_col);
    const std::size_t dj = column_index(table, schema.d_col);
    std::vector<std::size_t> xj, zj;
    for (const auto& c : schema.x_cols) xj.push_back(column_index(table, c));
    for (const auto& c : schema.z_cols) zj.push_back(column_index(table, c));

    std::vector<std::size_t> used{yj, dj};
    used.insert(used.end(), xj.begin(), xj.end());
    used.insert(used.end(), zj.begin(), zj.end());

    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        bool missing = false;
        for (std::size_t j : used) missing = missing || is_missing(table.rows[r][j]);
        if (!missing) keep.push_back(r);
    }

    const auto n = static_cast<Index>(keep.size());
    VectorXd y(n), d(n);
    MatrixXd x(n, static_cast<Index>(xj.size()));
    MatrixXd z(n, static_cast<Index>(zj.size()));
    for (Index i = 0; i < n; ++i) {
        const auto& row = table.rows[keep[i]];
        const std::size_t line = keep[i] + 2;
        y(i) = parse_cell(row[yj], line, schema.y_col);
        d(i) = parse_cell(row[dj], line, schema.d_col);
        for (std::size_t k = 0; k < xj.size(); ++k) {
            x(i, static_cast<Index>(k)) = parse_cell(row[xj[k]], line, schema.x_cols[k]);
        }
        for (std::size_t k = 0; k < zj.size(); ++k) {
            z(i, static_cast<Index>(k)) = parse_cell(row[zj[k]], line, schema.z_cols[k]);
        }
    }

    if (schema.standardize_z && n >= 2) {
        for (Index k = 0; k < z.cols(); ++k) {
            const double mean = z.col(k).mean();
            const double sd =
                std::sqrt((z.col(k).array() - mean).square().sum() / static_cast<double>(n - 1));
            if (!(sd > 0.0)) {
                throw DataError("Z column '" + schema.z_cols[static_cast<std::size_t>(k)] +
                                "' has zero variance and cannot be standardized");
            }
            z.col(k) = (z.col(k).array() - mean) / sd;
        }
    }

    return IngestResult{Dataset::with_intercepts(std::move(y), x, std::move(d), z),
                        table.rows.size() - keep.size()};
}

IngestResult ingest_csv_file(const std::string& path, const IngestSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return ingest_csv(in, schema);
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    std::ostringstream buf;
    buf << "y,d";
    for (Index j = 1; j < ds.q(); ++j) buf << ",x" << j;
    for (Index j = 1; j < ds.dz(); ++j) buf << ",z" << j;
    buf << '\n';
    for (Index i = 0; i < ds.n(); ++i) {
        buf << format_double(ds.y()(i)) << ',' << format_double(ds.d()(i));
        for (Index j = 1; j < ds.q(); ++j) buf << ',' << format_double(ds.x()(i, j));
        for (Index j = 1; j < ds.dz(); ++j) buf << ',' << format_double(ds.z()(i, j));
        buf << '\n';
    }
    out << buf.str();
}

}  // namespace slrt
