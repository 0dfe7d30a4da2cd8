#include "newsflow/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "newsflow/diagnostics.hpp"
#include "newsflow/text.hpp"

namespace newsflow {

using json = nlohmann::json;

namespace {

int parse_fixed_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad date component '" + std::string(s) + "'");
    return v;
}

std::string phrase_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw ParseError(std::string("missing field '") + key + "'");
    std::string raw;
    if (it->is_string()) {
        raw = it->get<std::string>();
    } else if (it->is_array()) {
        std::vector<std::string> parts;
        for (const auto& tok : *it) {
            if (!tok.is_string()) throw ParseError(std::string("non-string token in '") + key + "'");
            parts.push_back(tok.get<std::string>());
        }
        raw = join(parts, " ");
    } else {
        throw ParseError(std::string("field '") + key + "' must be a string or token list");
    }
    std::string phrase = normalize_phrase(raw);
    if (phrase.empty()) throw ParseError(std::string("field '") + key + "' has no tokens");
    return phrase;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() > 10 && (text[10] == 'T' || text[10] == ' ')) text = text.substr(0, 10);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("date '" + std::string(text) + "' is not YYYY-MM-DD");
    }
    Date d{std::chrono::year{parse_fixed_int(text.substr(0, 4))},
           std::chrono::month{static_cast<unsigned>(parse_fixed_int(text.substr(5, 2)))},
           std::chrono::day{static_cast<unsigned>(parse_fixed_int(text.substr(8, 2)))}};
    if (!d.ok()) throw ParseError("date '" + std::string(text) + "' does not exist");
    return d;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

long days_between(Date from, Date to) {
    return static_cast<long>((std::chrono::sys_days{to} - std::chrono::sys_days{from}).count());
}

Corpus::Corpus(std::vector<TripleRecord> records, Date start_date, int horizon)
    : records_(std::move(records)), start_date_(start_date), horizon_(horizon) {
    if (horizon_ < 1) throw std::invalid_argument("corpus horizon must be >= 1");
    word_counts_.assign(static_cast<std::size_t>(horizon_), 0);
    for (const auto& r : records_) {
        if (r.day < 1 || r.day > horizon_) {
            throw std::invalid_argument("record day " + std::to_string(r.day) + " outside [1, " +
                                        std::to_string(horizon_) + "]");
        }
        if (r.head.empty() || r.relation.empty() || r.tail.empty()) {
            throw std::invalid_argument("record with empty phrase");
        }
        sources_.insert(r.source);
        word_counts_[static_cast<std::size_t>(r.day - 1)] += static_cast<long long>(
            token_count(r.head) + token_count(r.relation) + token_count(r.tail));
    }
}

std::vector<std::size_t> Corpus::records_per_day() const {
    std::vector<std::size_t> per_day(static_cast<std::size_t>(horizon_), 0);
    for (const auto& r : records_) ++per_day[static_cast<std::size_t>(r.day - 1)];
    return per_day;
}

void print_skip_report(std::ostream& out, const SkipReport& report, std::string_view name) {
    out << name << ": read " << report.lines_read << " lines, accepted " << report.accepted
        << ", outside date range " << report.out_of_range << ", rejected " << report.errors.size()
        << '\n';
    for (const auto& e : report.errors) out << name << ':' << e.line << ": " << e.message << '\n';
}

IngestResult ingest(std::istream& in, std::string_view name, Date start_date, Date end_date) {
    const long span = days_between(start_date, end_date);
    if (span < 0) throw std::invalid_argument("start date is after end date");
    const int horizon = static_cast<int>(span + 1);

    SkipReport report;
    std::vector<TripleRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++report.lines_read;
        try {
            json obj = json::parse(line);
            if (!obj.is_object()) throw ParseError("record is not a JSON object");
            TripleRecord rec;
            rec.head = phrase_field(obj, "head");
            rec.relation = phrase_field(obj, "relation");
            rec.tail = phrase_field(obj, "tail");

            auto date_it = obj.find("date");
            if (date_it == obj.end() || !date_it->is_string()) throw ParseError("missing field 'date'");
            const long offset = days_between(start_date, parse_date(date_it->get<std::string>()));
            if (offset < 0 || offset > span) {
                ++report.out_of_range;
                continue;
            }
            rec.day = static_cast<int>(offset + 1);

            auto src_it = obj.find("source");
            if (src_it == obj.end() || !src_it->is_string()) throw ParseError("missing field 'source'");
            rec.source = normalize_phrase(src_it->get<std::string>());
            if (rec.source.empty()) throw ParseError("empty source");

            auto id_it = obj.find("article_id");
            if (id_it != obj.end() && id_it->is_string() && !id_it->get<std::string>().empty()) {
                rec.article_id = id_it->get<std::string>();
            } else if (id_it != obj.end() && id_it->is_number_integer()) {
                rec.article_id = std::to_string(id_it->get<long long>());
            } else {
                rec.article_id = std::string(name) + ":" + std::to_string(line_no);
            }
            records.push_back(std::move(rec));
        } catch (const json::exception& e) {
            report.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
        } catch (const ParseError& e) {
            report.errors.push_back({line_no, e.what()});
        }
    }
    report.accepted = records.size();
    if (records.empty()) {
        throw std::runtime_error(std::string(name) + ": no valid records in [" + format_date(start_date) +
                                 ", " + format_date(end_date) + "]");
    }
    return {Corpus(std::move(records), start_date, horizon), std::move(report)};
}

IngestResult ingest(const std::string& path, Date start_date, Date end_date) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return ingest(in, path, start_date, end_date);
}

std::pair<Date, Date> scan_date_range(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    bool any = false;
    Date lo{}, hi{};
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        auto it = obj.find("date");
        if (it == obj.end() || !it->is_string()) continue;
        Date d;
        try {
            d = parse_date(it->get<std::string>());
        } catch (const ParseError&) {
            continue;
        }
        if (!any || std::chrono::sys_days{d} < std::chrono::sys_days{lo}) lo = d;
        if (!any || std::chrono::sys_days{d} > std::chrono::sys_days{hi}) hi = d;
        any = true;
    }
    if (!any) throw std::runtime_error(path + ": no parseable dates");
    return {lo, hi};
}

Corpus filter_by_sources(const Corpus& corpus, const std::set<std::string>& group) {
    if (group.empty()) throw std::invalid_argument("source group must be non-empty");
    std::vector<TripleRecord> kept;
    std::copy_if(corpus.records().begin(), corpus.records().end(), std::back_inserter(kept),
                 [&](const TripleRecord& r) { return group.count(r.source) > 0; });
    if (kept.empty()) warn("source group shares no outlets with the corpus; result is empty");
    return Corpus(std::move(kept), corpus.start_date(), corpus.horizon());
}

std::vector<long long> daily_word_counts(const Corpus& corpus) { return corpus.word_counts(); }

void write_word_counts_csv(std::ostream& out, const std::vector<long long>& counts) {
    out << "day,word_count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) out << (i + 1) << ',' << counts[i] << '\n';
}

void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
    const auto start = std::chrono::sys_days{corpus.start_date()};
    for (const auto& r : corpus.records()) {
        json obj;
        obj["head"] = r.head;
        obj["relation"] = r.relation;
        obj["tail"] = r.tail;
        obj["date"] = format_date(Date{start + std::chrono::days{r.day - 1}});
        obj["source"] = r.source;
        obj["article_id"] = r.article_id;
        out << obj.dump() << '\n';
    }
}

}  // namespace newsflow
