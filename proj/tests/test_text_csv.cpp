#include <doctest.h>

#include <sstream>

#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"
#include "newsflow/text.hpp"

using namespace newsflow;

TEST_CASE("normalize_phrase lowercases and collapses whitespace") {
    CHECK(normalize_phrase("  Jussie \t  SMOLLETT ") == "jussie smollett");
    CHECK(normalize_phrase("") == "");
    CHECK(normalize_phrase(" \n ") == "");
}

TEST_CASE("tokenize and token_count agree") {
    for (std::string s : {"a b", "  a  b c ", "", "single", "x\ty\nz"}) {
        CHECK(tokenize(s).size() == token_count(s));
    }
    CHECK(tokenize("a  b") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("split keeps empty fields, trim strips both ends") {
    CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
    CHECK(split("", ',') == std::vector<std::string>{""});
    CHECK(trim("  x y  ") == "x y");
    CHECK(join({"a", "b", "c"}, "|") == "a|b|c");
}

TEST_CASE("csv escaping round-trips through parse_line") {
    std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", ""};
    std::ostringstream out;
    csv::write_row(out, fields);
    std::string line = out.str();
    line.pop_back();
    CHECK(csv::parse_line(line) == fields);
    CHECK_THROWS_AS(csv::parse_line("\"open"), ParseError);
}

TEST_CASE("csv read checks the header and reports line numbers") {
    std::istringstream good("a,b\n1,2\n\n3,4\n");
    csv::Table t = csv::read(good, {"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.line_numbers[1] == 4);

    std::istringstream wrong("x,y\n1,2\n");
    CHECK_THROWS_AS(csv::read(wrong, {"a", "b"}), ParseError);
}

TEST_CASE("numbers round-trip exactly through format_double") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
        CHECK(csv::parse_double(csv::format_double(v), 1) == v);
    }
    CHECK(csv::parse_int("42", 1) == 42);
    try {
        csv::parse_double("abc", 7);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
    }
    CHECK_THROWS_AS(csv::parse_int("4.5", 2), ParseError);
}
