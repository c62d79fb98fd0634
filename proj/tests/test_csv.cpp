#include <doctest.h>

#include <sstream>

#include "slrt/csv.hpp"
#include "slrt/errors.hpp"

using namespace slrt;

namespace {

IngestResult ingest(const std::string& text, const IngestSchema& schema) {
    std::istringstream in(text);
    return ingest_csv(in, schema);
}

std::string error_of(const std::string& text, const IngestSchema& schema) {
    try {
        ingest(text, schema);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse_csv: quoting and line endings") {
    std::istringstream in("a,\"b,c\",d\r\n1,\"say \"\"hi\"\"\",3\r\n\"\",x,\n");
    const CsvTable t = parse_csv(in);
    REQUIRE(t.header.size() == 3);
    CHECK(t.header[1] == "b,c");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(t.rows[1][0].empty());
    CHECK(t.rows[1][2].empty());

    std::istringstream ragged("a,b\n1\n");
    CHECK_THROWS_AS(parse_csv(ragged), DataError);
    std::istringstream open_quote("a,b\n\"1,2\n");
    CHECK_THROWS_AS(parse_csv(open_quote), DataError);
}

TEST_CASE("ingest_csv: standardized z") {
    const IngestResult r = ingest("y,trt,z\n1,0,2\n2,1,4\n3,0,6\n", {"y", "trt", {}, {"z"}, true});
    const Dataset& ds = r.dataset;
    CHECK(ds.q() == 1);
    CHECK(ds.dz() == 2);
    CHECK(ds.z()(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(ds.z()(1, 1) == doctest::Approx(0.0));
    CHECK(ds.z()(2, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.dropped_rows == 0);
}

TEST_CASE("ingest_csv: the same column may enter X and Z") {
    const IngestResult r =
        ingest("y,d,age\n1,0,30\n2,1,40\n0,1,50\n", {"y", "d", {"age"}, {"age"}, false});
    CHECK(r.dataset.x()(2, 1) == 50.0);
    CHECK(r.dataset.z()(2, 1) == 50.0);
}

TEST_CASE("ingest_csv: missing cells drop rows") {
    const IngestResult r = ingest("y,d,x,unused\n1,0,1,\n,1,2,5\n2,1,NA,5\n3,1,4,5\n0,0,5,x\n",
                                  {"y", "d", {"x"}, {}, false});
    CHECK(r.dropped_rows == 2);
    CHECK(r.dataset.n() == 3);
}

TEST_CASE("ingest_csv: errors") {
    CHECK(error_of("y,d\n1,0\n2,1\n", {"y", "trt", {}, {}, false}).find("trt") != std::string::npos);
    CHECK(error_of("y,d\n1,1\n2,1\n3,1\n", {"y", "d", {}, {}, false}).find("treatment") != std::string::npos);
    const std::string bad = error_of("y,d\n1,0\nabc,1\n", {"y", "d", {}, {}, false});
    CHECK(bad.find("line 3") != std::string::npos);
    CHECK(bad.find("y") != std::string::npos);
    CHECK(error_of("y,d,z\n1,0,5\n2,1,5\n", {"y", "d", {}, {"z"}, true}).find("z") !=
          std::string::npos);
    CHECK_THROWS_AS(ingest_csv_file("/nonexistent/file.csv", {"y", "d", {}, {}, false}), DataError);
}

TEST_CASE("write_dataset_csv round-trips") {
    const IngestResult r = ingest("y,d,x,z\n0.1,0,1.5,2\n0.30000000000000004,1,-2.25,3\n7,1,1e-300,9\n",
                                  {"y", "d", {"x"}, {"z"}, false});
    std::stringstream buf;
    write_dataset_csv(buf, r.dataset);
    const IngestResult back = ingest_csv(buf, {"y", "d", {"x1"}, {"z1"}, false});
    CHECK(back.dataset.y() == r.dataset.y());
    CHECK(back.dataset.x() == r.dataset.x());
    CHECK(back.dataset.z() == r.dataset.z());
}
