#include "newsflow/analysis.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"

namespace newsflow {

NormalizedSeries normalize_series(const std::vector<CountSeries>& series) {
    if (series.empty()) throw std::invalid_argument("normalize_series needs at least one series");
    const int m = series.front().types();
    Eigen::VectorXd totals = Eigen::VectorXd::Zero(m);
    double days = 0.0;
    for (const auto& s : series) {
        if (s.types() != m) throw std::invalid_argument("series disagree on the number of event types");
        totals += s.counts.rowwise().sum();
        days += s.horizon();
    }
    NormalizedSeries out;
    out.scales = Eigen::VectorXd::Ones(m);
    for (int k = 0; k < m; ++k) {
        if (totals(k) > 0) {
            out.scales(k) = totals(k) / days;
        } else {
            std::string name = m == kEventTypes ? std::string(kEventTypeNames[k]) : std::to_string(k + 1);
            warn("event type " + name + " has no events; left unscaled");
        }
    }
    out.series = series;
    for (auto& s : out.series) s.counts = out.scales.cwiseInverse().asDiagonal() * s.counts;
    return out;
}

AverageIntensity average_intensity(const HawkesParams& params, const DelayKernel& kernel,
                                   const std::vector<CountSeries>& series) {
    if (series.empty()) throw std::invalid_argument("average_intensity needs at least one series");
    const int horizon = series.front().horizon();
    AverageIntensity out;
    out.curves = Eigen::MatrixXd::Zero(params.types(), horizon);
    for (const auto& s : series) {
        if (s.horizon() != horizon) throw std::invalid_argument("series have different horizons");
        out.curves += intensity(params, kernel, s).lambda;
    }
    out.curves /= static_cast<double>(series.size());
    out.seed_count = series.size();
    return out;
}

std::string_view to_string(Norm n) { return n == Norm::L1 ? "L1" : "L2"; }

Norm parse_norm(std::string_view text) {
    if (text == "L1" || text == "l1") return Norm::L1;
    if (text == "L2" || text == "l2") return Norm::L2;
    throw std::invalid_argument("unknown norm '" + std::string(text) + "' (expected L1 or L2)");
}

double curve_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                      Norm norm) {
    if (a.size() != b.size()) throw std::invalid_argument("curves have different lengths");
    if (a.size() == 0) return 0.0;
    const auto diff = (a - b).array();
    const double total = norm == Norm::L1 ? diff.abs().sum() : diff.square().sum();
    return total / static_cast<double>(a.size());
}

GroupClassification classify_group(const AverageIntensity& test,
                                   const std::vector<std::pair<std::string, AverageIntensity>>& references,
                                   Norm norm, const std::vector<std::string>& row_names) {
    if (references.size() < 2) throw std::invalid_argument("classification needs at least two references");
    const auto m = test.curves.rows();
    std::vector<std::string> names = row_names;
    if (names.empty()) {
        for (Eigen::Index k = 0; k < m; ++k) {
            names.push_back(m == kEventTypes ? std::string(kEventTypeNames[k]) : "type_" + std::to_string(k + 1));
        }
    }
    if (static_cast<Eigen::Index>(names.size()) != m) throw std::invalid_argument("row name count mismatch");

    GroupClassification out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [label, ref] : references) {
        if (ref.curves.rows() != m || ref.curves.cols() != test.curves.cols()) {
            throw std::invalid_argument("reference '" + label + "' has a different shape from the test curves");
        }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        for (const auto& [label, ref] : references) {
            out.table.push_back({names[k], label, curve_distance(test.curves.row(k), ref.curves.row(k), norm)});
        }
    }
    for (std::size_t r = 0; r < references.size(); ++r) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) total += out.table[k * references.size() + r].distance;
        out.totals.emplace_back(references[r].first, total);
        if (total < best) {
            best = total;
            out.label = references[r].first;
        }
    }
    return out;
}

void write_distance_table_header(std::ostream& out) { out << "dataset,event_type,reference,norm,distance\n"; }

void write_distance_rows(std::ostream& out, const std::string& dataset, Norm norm,
                         const std::vector<DistanceRow>& rows) {
    for (const auto& row : rows) {
        csv::write_row(out, {dataset, row.event_type, row.reference, std::string(to_string(norm)),
                             csv::format_double(row.distance)});
    }
}

void write_intensity_csv(std::ostream& out, const Eigen::MatrixXd& curves) {
    if (curves.rows() != kEventTypes) throw std::invalid_argument("intensity export needs 3 event types");
    out << "day,append,extend,mutate\n";
    for (Eigen::Index n = 0; n < curves.cols(); ++n) {
        out << (n + 1);
        for (int k = 0; k < kEventTypes; ++k) out << ',' << csv::format_double(curves(k, n));
        out << '\n';
    }
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t label : labels) ++sizes[label];
    return sizes;
}

Eigen::VectorXd flatten_series(const CountSeries& s) {
    Eigen::MatrixXd rows_first = s.counts.transpose();
    return Eigen::Map<const Eigen::VectorXd>(rows_first.data(), rows_first.size());
}

namespace {

struct KMeansState {
    const std::vector<Eigen::VectorXd>& points;
    std::size_t k;
    std::vector<std::size_t> labels;
    std::vector<Eigen::VectorXd> centroids;

    void update_centroids() {
        const auto dim = points.front().size();
        std::vector<std::size_t> sizes(k, 0);
        centroids.assign(k, Eigen::VectorXd::Zero(dim));
        for (std::size_t i = 0; i < points.size(); ++i) {
            centroids[labels[i]] += points[i];
            ++sizes[labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c]) centroids[c] /= static_cast<double>(sizes[c]);
        }
    }

    // Moves the point farthest from its centroid (among clusters with >= 2
    // members) into each empty cluster.
    void fill_empty_clusters() {
        while (true) {
            std::vector<std::size_t> sizes(k, 0);
            for (std::size_t label : labels) ++sizes[label];
            auto empty = std::find(sizes.begin(), sizes.end(), 0u);
            if (empty == sizes.end()) return;
            update_centroids();
            std::size_t farthest = points.size();
            double far_dist = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (sizes[labels[i]] < 2) continue;
                double d = (points[i] - centroids[labels[i]]).squaredNorm();
                if (d > far_dist) {
                    far_dist = d;
                    farthest = i;
                }
            }
            labels[farthest] = static_cast<std::size_t>(empty - sizes.begin());
        }
    }

    double inertia() const {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) total += (points[i] - centroids[labels[i]]).squaredNorm();
        return total;
    }

    bool assign() {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::size_t best = labels[i];
            double best_dist = (points[i] - centroids[best]).squaredNorm();
            for (std::size_t c = 0; c < k; ++c) {
                double d = (points[i] - centroids[c]).squaredNorm();
                if (d < best_dist) {
                    best_dist = d;
                    best = c;
                }
            }
            if (best != labels[i]) {
                labels[i] = best;
                changed = true;
            }
        }
        return changed;
    }
};

}  // namespace

ClusterAssignment cluster_seeds(const std::vector<CountSeries>& series, const ClusterOptions& options) {
    if (options.k < 1) throw std::invalid_argument("k must be >= 1");
    if (options.k > series.size()) {
        throw std::invalid_argument("k = " + std::to_string(options.k) + " exceeds the number of series (" +
                                    std::to_string(series.size()) + ")");
    }
    std::vector<Eigen::VectorXd> points;
    points.reserve(series.size());
    for (const auto& s : series) {
        points.push_back(flatten_series(s));
        if (points.back().size() != points.front().size()) {
            throw std::invalid_argument("series must share event types and horizon to be clustered");
        }
    }

    KMeansState state{points, options.k, std::vector<std::size_t>(points.size()), {}};
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, options.k - 1);
    for (auto& label : state.labels) label = pick(rng);
    state.fill_empty_clusters();
    state.update_centroids();

    ClusterAssignment out;
    out.k = options.k;
    out.inertia_history.push_back(state.inertia());
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const bool changed = state.assign();
        out.iterations = iter + 1;
        if (!changed) {
            out.converged = true;
            break;
        }
        state.fill_empty_clusters();
        state.update_centroids();
        out.inertia_history.push_back(state.inertia());
    }
    out.labels = std::move(state.labels);
    out.centroids = std::move(state.centroids);
    out.inertia = out.inertia_history.back();
    return out;
}

std::vector<double> elbow_curve(const std::vector<CountSeries>& series, std::size_t k_max, std::uint64_t seed) {
    std::vector<double> out;
    const std::size_t limit = std::min(k_max, series.size());
    for (std::size_t k = 1; k <= limit; ++k) out.push_back(cluster_seeds(series, {k, seed, 300}).inertia);
    return out;
}

void write_clusters_csv(std::ostream& out, const std::vector<CountSeries>& series, const ClusterAssignment& a) {
    out << "triple_id,cluster\n";
    for (std::size_t i = 0; i < series.size(); ++i) out << series[i].triple_id << ',' << (a.labels[i] + 1) << '\n';
}

}  // namespace newsflow
