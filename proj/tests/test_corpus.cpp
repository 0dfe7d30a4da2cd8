#include <doctest.h>

#include <numeric>
#include <sstream>

#include "newsflow/corpus.hpp"
#include "newsflow/diagnostics.hpp"

using namespace newsflow;

namespace {

const std::string kData = NEWSFLOW_DATA_DIR;

std::string record(const std::string& head, const std::string& rel, const std::string& tail, const std::string& date,
                   const std::string& source = "nytimes") {
    return R"({"head": ")" + head + R"(", "relation": ")" + rel + R"(", "tail": ")" + tail + R"(", "date": ")" +
           date + R"(", "source": ")" + source + "\"}\n";
}

IngestResult ingest_text(const std::string& text, const std::string& start, const std::string& end) {
    std::istringstream in(text);
    return ingest(in, "mem", parse_date(start), parse_date(end));
}

struct WarningCounter {
    std::vector<std::string> messages;
    ScopedWarningSink sink{[this](std::string_view m) { messages.emplace_back(m); }};
};

}  // namespace

TEST_CASE("dates parse, format and subtract") {
    Date d = parse_date("2019-01-28");
    CHECK(format_date(d) == "2019-01-28");
    CHECK(days_between(d, parse_date("2019-02-01")) == 4);
    CHECK(format_date(parse_date("2019-01-28T10:22:00Z")) == "2019-01-28");
    CHECK_THROWS_AS(parse_date("2019-02-30"), ParseError);
    CHECK_THROWS_AS(parse_date("28/01/2019"), ParseError);
}

TEST_CASE("records on the start date land on day 1") {
    std::string text = record("a", "r", "b", "2020-03-01") + record("c", "r", "d", "2020-03-01") +
                       record("e", "r", "f", "2020-03-01");
    IngestResult res = ingest_text(text, "2020-03-01", "2020-03-10");
    CHECK(res.corpus.horizon() == 10);
    REQUIRE(res.corpus.records().size() == 3);
    for (const auto& r : res.corpus.records()) CHECK(r.day == 1);
    CHECK(res.report.skipped() == 0);
}

TEST_CASE("records outside the window are skipped and counted") {
    std::string text = record("a", "r", "b", "2020-02-29") + record("c", "r", "d", "2020-03-01") +
                       record("e", "r", "f", "2020-03-04");
    IngestResult res = ingest_text(text, "2020-03-01", "2020-03-03");
    CHECK(res.corpus.records().size() == 1);
    CHECK(res.report.out_of_range == 2);
    CHECK(res.report.skipped() == 2);
}

TEST_CASE("a single record before the start date gives skip count 1") {
    std::string text = record("a", "r", "b", "2020-02-29") + record("c", "r", "d", "2020-03-02");
    IngestResult res = ingest_text(text, "2020-03-01", "2020-03-02");
    CHECK(res.report.skipped() == 1);
    CHECK(res.corpus.records().front().day == 2);
}

TEST_CASE("the five-day fixture ingests fully") {
    IngestResult res = ingest(kData + "/toy5/corpus.jsonl", parse_date("2019-01-28"), parse_date("2019-02-01"));
    CHECK(res.corpus.records().size() == 12);
    CHECK(res.corpus.horizon() == 5);
    CHECK(res.report.skipped() == 0);
    CHECK(res.corpus.records().front().head == "jussie smollett");
    CHECK(res.corpus.records().front().source == "tmz");
    std::vector<std::size_t> per_day = res.corpus.records_per_day();
    CHECK(per_day == std::vector<std::size_t>{3, 2, 3, 0, 4});
}

TEST_CASE("malformed lines are reported with their line number and skipped") {
    std::string text = record("a", "r", "b", "2020-03-01") + "{not json\n" +
                       R"({"head": "x", "relation": "r", "tail": "y", "source": "cnn"})" + "\n" +
                       R"({"head": ["x", "y"], "relation": "r", "tail": "  ", "date": "2020-03-01", "source": "cnn"})" +
                       "\n" + record("c", "r", "d", "2020-03-02");
    IngestResult res = ingest_text(text, "2020-03-01", "2020-03-02");
    CHECK(res.corpus.records().size() == 2);
    REQUIRE(res.report.errors.size() == 3);
    CHECK(res.report.errors[0].line == 2);
    CHECK(res.report.errors[1].line == 3);
    CHECK(res.report.errors[1].message.find("date") != std::string::npos);
    CHECK(res.report.errors[2].line == 4);
}

TEST_CASE("token-list phrases are joined and article ids synthesized") {
    std::string text =
        R"({"head": ["Two", "Men"], "relation": "pour", "tail": "bleach", "date": "2020-03-01", "source": "CNN"})"
        "\n";
    IngestResult res = ingest_text(text, "2020-03-01", "2020-03-01");
    const TripleRecord& r = res.corpus.records().front();
    CHECK(r.head == "two men");
    CHECK(r.source == "cnn");
    CHECK(r.article_id == "mem:1");
}

TEST_CASE("a corpus with no valid records is an error") {
    CHECK_THROWS_AS(ingest_text("", "2020-03-01", "2020-03-02"), std::runtime_error);
    CHECK_THROWS_AS(ingest_text(record("a", "r", "b", "2021-01-01"), "2020-03-01", "2020-03-02"),
                    std::runtime_error);
    CHECK_THROWS_AS(ingest_text(record("a", "r", "b", "2020-03-01"), "2020-03-02", "2020-03-01"),
                    std::invalid_argument);
}

TEST_CASE("corpus constructor validates days") {
    std::vector<TripleRecord> recs = {{"a", "r", "b", 3, "cnn", "1"}};
    CHECK_THROWS_AS(Corpus(recs, parse_date("2020-01-01"), 2), std::invalid_argument);
    CHECK_NOTHROW(Corpus(recs, parse_date("2020-01-01"), 3));
}

TEST_CASE("source filtering") {
    Corpus corpus =
        ingest(kData + "/toy5/corpus.jsonl", parse_date("2019-01-28"), parse_date("2019-02-01")).corpus;

    SUBCASE("all sources is the identity") {
        Corpus all = filter_by_sources(corpus, corpus.sources());
        CHECK(all.records() == corpus.records());
        CHECK(all.horizon() == corpus.horizon());
    }
    SUBCASE("tmz only") {
        CHECK(filter_by_sources(corpus, {"tmz"}).records().size() == 4);
    }
    SUBCASE("disjoint group is empty with a warning") {
        WarningCounter w;
        Corpus none = filter_by_sources(corpus, {"bbc"});
        CHECK(none.records().empty());
        CHECK(w.messages.size() == 1);
        CHECK(none.word_counts() == std::vector<long long>(5, 0));
    }
    SUBCASE("empty group is rejected") {
        CHECK_THROWS_AS(filter_by_sources(corpus, {}), std::invalid_argument);
    }
    SUBCASE("disjoint groups partition the records") {
        std::size_t a = filter_by_sources(corpus, {"tmz", "people"}).records().size();
        std::size_t b = filter_by_sources(corpus, {"cnn", "npr", "nytimes"}).records().size();
        std::size_t u = filter_by_sources(corpus, {"tmz", "people", "cnn", "npr", "nytimes"}).records().size();
        CHECK(a + b == u);
        CHECK(u == corpus.records().size());
    }
}

TEST_CASE("daily word counts") {
    SUBCASE("empty corpus is all zeros") {
        Corpus empty({}, parse_date("2020-01-01"), 4);
        CHECK(daily_word_counts(empty) == std::vector<long long>(4, 0));
    }
    SUBCASE("single record on day 2") {
        Corpus c({{"a b", "c", "d e", 2, "cnn", "x"}}, parse_date("2020-01-01"), 3);
        CHECK(daily_word_counts(c) == std::vector<long long>{0, 5, 0});
    }
    SUBCASE("five-day fixture matches the hand tally") {
        Corpus c = ingest(kData + "/toy5/corpus.jsonl", parse_date("2019-01-28"), parse_date("2019-02-01")).corpus;
        std::vector<long long> counts = daily_word_counts(c);
        CHECK(counts == std::vector<long long>{13, 9, 11, 0, 16});
        CHECK(std::accumulate(counts.begin(), counts.end(), 0LL) == 49);
        CHECK(daily_word_counts(c) == counts);

        std::ostringstream csv;
        write_word_counts_csv(csv, counts);
        CHECK(csv.str() == "day,word_count\n1,13\n2,9\n3,11\n4,0\n5,16\n");
    }
}

TEST_CASE("jsonl export re-ingests to the same corpus") {
    Corpus c = ingest(kData + "/toy5/corpus.jsonl", parse_date("2019-01-28"), parse_date("2019-02-01")).corpus;
    std::stringstream buf;
    write_corpus_jsonl(buf, c);
    Corpus back = ingest(buf, "again", parse_date("2019-01-28"), parse_date("2019-02-01")).corpus;
    CHECK(back.records() == c.records());
}

TEST_CASE("scan_date_range finds the extremes") {
    auto [lo, hi] = scan_date_range(kData + "/toy5/corpus.jsonl");
    CHECK(format_date(lo) == "2019-01-28");
    CHECK(format_date(hi) == "2019-02-01");
}
