#include "censearch/errors.hpp"
#include "censearch/report.hpp"
#include "censearch/scheme.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace censearch;

TEST_SUITE_BEGIN("report");

TEST_CASE("format names round trip") {
    for (auto f : {OutputFormat::Csv, OutputFormat::JsonLines, OutputFormat::Pretty})
        CHECK(format_from_string(to_string(f)) == f);
    CHECK_FALSE(format_from_string("xml").has_value());
}

TEST_CASE("machine formatting round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 0.3798761164252582, -2.5e-13, 1e300, 0.0}) {
        const std::string repr = format_machine(v);
        CHECK(std::strtod(repr.c_str(), nullptr) == v);
    }
    CHECK(format_pretty(0.37987611) == "0.3799");
    CHECK(format_pretty(-1.0) == "-1.0000");
}

TEST_CASE("field constructors") {
    const Field t = Field::text("name", "a,b");
    CHECK(t.key == "name");
    CHECK(t.value == "a,b");
    CHECK(t.kind == Field::Kind::Text);

    const Field n = Field::number("psi", 0.5);
    CHECK(n.value == "0.5");
    CHECK(n.kind == Field::Kind::Number);

    const Field i = Field::integer("n_it", 12345);
    CHECK(i.value == "12345");

    CHECK(Field::boolean("ok", true).value == "true");
    CHECK(Field::boolean("ok", false).value == "false");
}

TEST_CASE("csv output quotes only what needs quoting") {
    const std::vector<Record> records{
        {Field::text("scheme", "0,4,1"), Field::number("psi", 0.25),
         Field::text("note", "plain")},
        {Field::text("scheme", "5,0,0"), Field::number("psi", 0.5),
         Field::text("note", "say \"hi\"")},
    };
    std::ostringstream out;
    write_records(out, OutputFormat::Csv, records);
    CHECK(out.str() ==
          "scheme,psi,note\n"
          "\"0,4,1\",0.25,plain\n"
          "\"5,0,0\",0.5,\"say \"\"hi\"\"\"\n");
}

TEST_CASE("json lines carry a schema version and typed values") {
    const std::vector<Record> records{
        {Field::text("scheme", "0,4,1"), Field::number("psi", 0.25),
         Field::integer("n_it", 7), Field::boolean("extended", false)},
    };
    std::ostringstream out;
    write_records(out, OutputFormat::JsonLines, records);

    const auto parsed = nlohmann::json::parse(out.str());
    CHECK(parsed["schema_version"] == 1);
    CHECK(parsed["scheme"] == "0,4,1");
    CHECK(parsed["psi"] == 0.25);
    CHECK(parsed["n_it"] == 7);
    CHECK(parsed["extended"] == false);
    CHECK(out.str().rfind("{\"schema_version\":1,", 0) == 0);
}

TEST_CASE("non-finite numbers degrade to strings in json") {
    const std::vector<Record> records{
        {Field::number("a", std::numeric_limits<double>::quiet_NaN()),
         Field::number("b", std::numeric_limits<double>::infinity())},
    };
    std::ostringstream out;
    write_records(out, OutputFormat::JsonLines, records);
    const auto parsed = nlohmann::json::parse(out.str());
    CHECK(parsed["a"].is_string());
    CHECK(parsed["b"].is_string());
}

TEST_CASE("pretty output aligns keys and honors display overrides") {
    const std::vector<Record> records{
        {Field::text("scheme", "0,0,0,0,5", "0^4, 5"),
         Field::number("psi", 0.3798761164252582, format_pretty(0.3798761164252582))},
        {Field::text("scheme", "5,0,0,0,0", "5, 0^4"),
         Field::number("psi", 0.5, format_pretty(0.5))},
    };
    std::ostringstream out;
    write_records(out, OutputFormat::Pretty, records);
    CHECK(out.str() ==
          "scheme  0^4, 5\n"
          "psi     0.3799\n"
          "\n"
          "scheme  5, 0^4\n"
          "psi     0.5000\n");
}

TEST_CASE("records must share one layout") {
    const std::vector<Record> records{
        {Field::text("a", "1")},
        {Field::text("a", "1"), Field::text("b", "2")},
    };
    std::ostringstream out;
    CHECK_THROWS_AS(write_records(out, OutputFormat::Csv, records), BadDimensions);
}

TEST_CASE("no records produce no output") {
    std::ostringstream out;
    write_records(out, OutputFormat::Csv, {});
    write_records(out, OutputFormat::JsonLines, {});
    write_records(out, OutputFormat::Pretty, {});
    CHECK(out.str().empty());
}

TEST_CASE("trace format") {
    const Scheme a = Scheme::validate(10, 5, {0, 4, 1, 0, 0});
    const Scheme b = Scheme::validate(10, 5, {0, 5, 0, 0, 0});
    const std::vector<TraceEntry> trace{
        {0, a, 0.3798761164252582, false},
        {1, b, 0.37922105455269639, true},
    };
    std::ostringstream out;
    write_trace(out, trace);
    CHECK(out.str() ==
          "iteration,scheme,psi,accepted\n"
          "0,\"0,4,1,0,0\",0.3798761164252582,false\n"
          "1,\"0,5,0,0,0\",0.37922105455269639,true\n");
}

TEST_CASE("variance table format") {
    const std::vector<VarianceCheckRow> rows{
        {0.5, 0.0105, 0.01, 1.05, 5000, 3},
    };
    std::ostringstream csv_out;
    write_variance_rows(csv_out, OutputFormat::Csv, rows);
    CHECK(csv_out.str() ==
          "s,empirical,asymptotic,ratio,replications,excluded\n"
          "0.5,0.010500000000000001,0.01,1.05,5000,3\n");

    std::ostringstream json_out;
    write_variance_rows(json_out, OutputFormat::JsonLines, rows);
    const auto parsed = nlohmann::json::parse(json_out.str());
    CHECK(parsed["ratio"] == 1.05);
    CHECK(parsed["replications"] == 5000);
}

TEST_SUITE_END();
