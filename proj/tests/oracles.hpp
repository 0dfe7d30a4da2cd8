#pragma once

// Independent reference computations used only by tests. None of these call
// into the library routines they are compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using RawTriple = std::tuple<std::string, std::string, std::string>;

struct DatedTriple {
    RawTriple triple;
    int day;
};

// counts[seed][type][day-1], types ordered append, extend, mutate.
using NaiveCounts = std::vector<std::array<std::vector<int>, 3>>;

// Naive event counter: linear scans over plain vectors, no graph structure.
inline NaiveCounts naive_count_events(const std::vector<DatedTriple>& records, const std::vector<RawTriple>& seeds,
                                      int horizon, int seed_window_end) {
    NaiveCounts out(seeds.size());
    for (auto& per_seed : out) {
        for (auto& row : per_seed) row.assign(horizon, 0);
    }
    auto contains = [](const auto& vec, const auto& x) { return std::find(vec.begin(), vec.end(), x) != vec.end(); };

    std::vector<RawTriple> seen_edges;
    std::vector<std::string> seen_nodes;
    auto absorb = [&](const RawTriple& t) {
        if (!contains(seen_edges, t)) seen_edges.push_back(t);
        if (!contains(seen_nodes, std::get<0>(t))) seen_nodes.push_back(std::get<0>(t));
        if (!contains(seen_nodes, std::get<2>(t))) seen_nodes.push_back(std::get<2>(t));
    };
    for (const auto& r : records) {
        if (r.day <= seed_window_end) absorb(r.triple);
    }
    for (int day = seed_window_end + 1; day <= horizon; ++day) {
        std::vector<RawTriple> fresh;
        for (const auto& r : records) {
            if (r.day == day && !contains(seen_edges, r.triple) && !contains(fresh, r.triple)) fresh.push_back(r.triple);
        }
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const auto& [sh, sr, st] = seeds[s];
            for (const auto& [h, r, t] : fresh) {
                if (h == sh && t == st && r != sr) {
                    ++out[s][2][day - 1];
                    continue;
                }
                int touching = (h == sh || h == st) + (t == sh || t == st);
                if (touching != 1) continue;
                const std::string& other = (h == sh || h == st) ? t : h;
                if (contains(seen_nodes, other)) {
                    ++out[s][1][day - 1];
                } else {
                    ++out[s][0][day - 1];
                }
            }
        }
        for (const auto& t : fresh) absorb(t);
    }
    return out;
}

// lambda(n) = mu + sum_{t<n} A y(t) beta e^{-beta (n - t)}, evaluated term by term.
inline Eigen::MatrixXd direct_intensity(const Eigen::VectorXd& mu, const Eigen::MatrixXd& a, double beta,
                                        const Eigen::MatrixXd& y) {
    Eigen::MatrixXd lambda(y.rows(), y.cols());
    for (Eigen::Index n = 0; n < y.cols(); ++n) {
        Eigen::VectorXd acc = mu;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double lag = static_cast<double>(n - t);
            acc += a * y.col(t) * (beta * std::exp(-beta * lag));
        }
        lambda.col(n) = acc;
    }
    return lambda;
}

inline double poisson_log_pmf(double y, double rate) { return y * std::log(rate) - rate - std::lgamma(y + 1.0); }

// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                 Eigen::Index i, double h) {
    const double x0 = x(i);
    x(i) = x0 + h;
    const double up = f(x);
    x(i) = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

}  // namespace oracle
