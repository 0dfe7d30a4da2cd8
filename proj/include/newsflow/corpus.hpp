#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace newsflow {

using Date = std::chrono::year_month_day;

// Parses YYYY-MM-DD. A longer string is accepted when the date is followed by
// 'T' or a space (the time part is ignored, no timezone conversion).
Date parse_date(std::string_view text);
std::string format_date(Date d);
// Number of days from `from` to `to` (negative when `to` is earlier).
long days_between(Date from, Date to);

// One (head, relation, tail) assertion. Phrases are stored normalized:
// lowercase tokens joined by single spaces.
struct TripleRecord {
    std::string head;
    std::string relation;
    std::string tail;
    int day = 1;  // 1-based index relative to the corpus start date
    std::string source;
    std::string article_id;

    friend bool operator==(const TripleRecord&, const TripleRecord&) = default;
};

// Immutable collection of records bucketed by day over [1, horizon].
class Corpus {
public:
    Corpus(std::vector<TripleRecord> records, Date start_date, int horizon);

    const std::vector<TripleRecord>& records() const { return records_; }
    Date start_date() const { return start_date_; }
    int horizon() const { return horizon_; }
    const std::set<std::string>& sources() const { return sources_; }
    // Triple-token counts per day, index 0 is day 1.
    const std::vector<long long>& word_counts() const { return word_counts_; }

    // Number of records on each day, index 0 is day 1.
    std::vector<std::size_t> records_per_day() const;

private:
    std::vector<TripleRecord> records_;
    Date start_date_;
    int horizon_;
    std::set<std::string> sources_;
    std::vector<long long> word_counts_;
};

struct RecordError {
    std::size_t line;
    std::string message;
};

struct SkipReport {
    std::size_t lines_read = 0;
    std::size_t accepted = 0;
    std::size_t out_of_range = 0;
    std::vector<RecordError> errors;

    std::size_t skipped() const { return out_of_range + errors.size(); }
};

void print_skip_report(std::ostream& out, const SkipReport& report, std::string_view name);

struct IngestResult {
    Corpus corpus;
    SkipReport report;
};

// Reads line-delimited JSON objects with fields head, relation, tail, date,
// source and article_id. Bad lines are reported and skipped; zero accepted
// records is an error.
IngestResult ingest(std::istream& in, std::string_view name, Date start_date, Date end_date);
IngestResult ingest(const std::string& path, Date start_date, Date end_date);

// Earliest and latest parseable dates in a record file.
std::pair<Date, Date> scan_date_range(const std::string& path);

// Records whose source is in `group`. An empty result is valid and produces a warning.
Corpus filter_by_sources(const Corpus& corpus, const std::set<std::string>& group);

// Per-day sum of head + relation + tail token counts. This stands in for
// article word counts since raw article text is not part of the input.
std::vector<long long> daily_word_counts(const Corpus& corpus);

void write_word_counts_csv(std::ostream& out, const std::vector<long long>& counts);

// Writes records back out in the ingest format (dates reconstructed from day).
void write_corpus_jsonl(std::ostream& out, const Corpus& corpus);

}  // namespace newsflow
