#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace newsflow {

// Rows of a structural count series.
enum EventType : int { kAppend = 0, kExtend = 1, kMutate = 2 };
inline constexpr int kEventTypes = 3;
inline constexpr std::array<std::string_view, kEventTypes> kEventTypeNames = {"append", "extend", "mutate"};

// Counts for one initial triple: an M x N matrix, column n-1 holds day n.
// Graph-derived series always have M = 3 rows ordered append, extend, mutate.
struct CountSeries {
    std::size_t triple_id = 0;
    Eigen::MatrixXd counts;

    int types() const { return static_cast<int>(counts.rows()); }
    int horizon() const { return static_cast<int>(counts.cols()); }
};

// CSV with header triple_id,day,append,extend,mutate, one row per (series, day).
void write_count_series_csv(std::ostream& out, const std::vector<CountSeries>& series);
std::vector<CountSeries> read_count_series_csv(std::istream& in);
std::vector<CountSeries> read_count_series_csv(const std::string& path);

}  // namespace newsflow
