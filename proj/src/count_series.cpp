#include "newsflow/count_series.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"

namespace newsflow {

void write_count_series_csv(std::ostream& out, const std::vector<CountSeries>& series) {
    out << "triple_id,day,append,extend,mutate\n";
    for (const auto& s : series) {
        if (s.types() != kEventTypes) throw std::invalid_argument("count CSV export needs 3 event types");
        for (int n = 0; n < s.horizon(); ++n) {
            out << s.triple_id << ',' << (n + 1);
            for (int m = 0; m < kEventTypes; ++m) out << ',' << csv::format_double(s.counts(m, n));
            out << '\n';
        }
    }
}

std::vector<CountSeries> read_count_series_csv(std::istream& in) {
    csv::Table table = csv::read(in, {"triple_id", "day", "append", "extend", "mutate"});
    std::map<std::size_t, std::map<long long, std::array<double, kEventTypes>>> by_id;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        const std::size_t line = table.line_numbers[k];
        long long id = csv::parse_int(row[0], line);
        long long day = csv::parse_int(row[1], line);
        if (id < 0) throw ParseError("negative triple_id", line);
        if (day < 1) throw ParseError("day must be >= 1", line);
        std::array<double, kEventTypes> v{};
        for (int m = 0; m < kEventTypes; ++m) {
            v[m] = csv::parse_double(row[2 + m], line);
            if (v[m] < 0) throw ParseError("negative count", line);
        }
        if (!by_id[static_cast<std::size_t>(id)].emplace(day, v).second) {
            throw ParseError("duplicate (triple_id, day)", line);
        }
    }
    std::vector<CountSeries> out;
    for (const auto& [id, days] : by_id) {
        const long long horizon = days.rbegin()->first;
        if (static_cast<long long>(days.size()) != horizon) {
            throw ParseError("series " + std::to_string(id) + " does not cover days 1.." + std::to_string(horizon));
        }
        CountSeries s;
        s.triple_id = id;
        s.counts.resize(kEventTypes, horizon);
        for (const auto& [day, v] : days) {
            for (int m = 0; m < kEventTypes; ++m) s.counts(m, day - 1) = v[m];
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CountSeries> read_count_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_count_series_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace newsflow
