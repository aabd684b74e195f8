#include "fraccite/text.hpp"

#include "support/test_support.hpp"

#include <doctest.h>

#include <limits>

using namespace fraccite::text;

TEST_CASE("trim, case and split") {
    CHECK(trim("  a b \t\r\n") == "a b");
    CHECK(trim("   ").empty());
    CHECK(to_lower("Dep CHEM") == "dep chem");
    CHECK(iequals("Article", "ARTICLE"));
    CHECK_FALSE(iequals("Article", "Articles"));
    CHECK(split("a;;b", ';') == std::vector<std::string>{"a", "", "b"});
    CHECK(split("", ';') == std::vector<std::string>{""});
}

TEST_CASE("number parsing is strict") {
    CHECK(parse_int("42") == 42);
    CHECK(parse_int(" 7 ") == 7);
    CHECK(parse_int("-3") == -3);
    CHECK_FALSE(parse_int("4x").has_value());
    CHECK_FALSE(parse_int("").has_value());
    CHECK(parse_double("0.25") == 0.25);
    CHECK(parse_double("1e3") == 1000.0);
    CHECK_FALSE(parse_double("abc").has_value());
    CHECK_FALSE(parse_double("1.5.2").has_value());
}

TEST_CASE("csv fields") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("\"x, y\",\"he said \"\"hi\"\"\",") == std::vector<std::string>{"x, y", "he said \"hi\"", ""});
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"") == "\"q\"\"\"");
}

TEST_CASE("fixed and exact formatting") {
    CHECK(format_fixed(0.4117821782178218, 2) == "0.41");
    CHECK(format_fixed(166.36, 0) == "166");
    CHECK(format_fixed(-0.001, 2) == "0.00");
    CHECK(format_fixed(-1.5, 1) == "-1.5");
    CHECK(format_exact(0.1) == "0.1");
    CHECK(format_exact(2.0) == "2");
}

TEST_CASE("property: csv escape round-trips") {
    testing::Rng rng(7);
    const std::string alphabet = "ab ,\"x\r;";
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> fields(static_cast<std::size_t>(rng.integer(1, 5)));
        for (auto& f : fields) {
            const auto len = rng.integer(0, 6);
            for (std::int64_t c = 0; c < len; ++c) f += alphabet[static_cast<std::size_t>(rng.integer(0, 7))];
        }
        std::string line;
        for (std::size_t k = 0; k < fields.size(); ++k) line += (k ? "," : "") + csv_escape(fields[k]);
        CHECK(split_csv_line(line) == fields);
    }
}

TEST_CASE("property: exact formatting round-trips doubles") {
    testing::Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal(0.0, 1.0) * std::pow(10.0, static_cast<double>(rng.integer(-8, 8)));
        CHECK(*parse_double(format_exact(v)) == v);
    }
}
