#include "ordermc/errors.hpp"
#include "ordermc/report.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ordermc;
using namespace ordermc::report;

TEST_SUITE("report") {

TEST_CASE("doubles carry 17 significant digits and round-trip") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    const double v = 0.1234567890123456789;
    CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::nan("")) == "null");
}

TEST_CASE("json lines and csv rows carry identical numeric text") {
    Record r;
    r.add("name", std::string("demo"));
    r.add("value", 1.0 / 7.0);
    r.add("count", std::int64_t{42});
    r.add("flag", true);
    r.add("vec", std::vector<double>{0.25, 1.0 / 3.0});

    const std::string json = to_json_line(r);
    const std::string row = csv_row(r);
    CHECK(json ==
          R"({"name":"demo","value":0.14285714285714285,"count":42,"flag":true,"vec":[0.25,0.33333333333333331]})");
    CHECK(csv_header(r) == "\"name\",\"value\",\"count\",\"flag\",\"vec\"");
    CHECK(row == "\"demo\",0.14285714285714285,42,true,\"0.25;0.33333333333333331\"");
}

TEST_CASE("strings are escaped") {
    Record r;
    r.add("text", std::string("a \"quoted\"\nline"));
    CHECK(to_json_line(r) == R"({"text":"a \"quoted\"\nline"})");
    CHECK(csv_row(r) == "\"a \"\"quoted\"\"\nline\"");
}

TEST_CASE("writer streams json lines and csv with a single header") {
    Record r1;
    r1.add("k", std::int64_t{1});
    Record r2;
    r2.add("k", std::int64_t{2});

    std::ostringstream jout;
    Writer jw(jout, Format::json_lines);
    jw.write(r1);
    jw.write(r2);
    CHECK(jout.str() == "{\"k\":1}\n{\"k\":2}\n");

    std::ostringstream cout;
    Writer cw(cout, Format::csv);
    cw.write(r1);
    cw.write(r2);
    CHECK(cout.str() == "\"k\"\n1\n2\n");
}

TEST_CASE("format names parse strictly") {
    CHECK(parse_format("json-lines") == Format::json_lines);
    CHECK(parse_format("csv") == Format::csv);
    CHECK_THROWS_AS(parse_format("xml"), config_error);
}

} // TEST_SUITE
