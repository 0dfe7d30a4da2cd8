#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "newsflow/count_series.hpp"
#include "newsflow/hawkes.hpp"

namespace newsflow {

struct NormalizedSeries {
    std::vector<CountSeries> series;
    Eigen::VectorXd scales;  // pooled mean per event type; 1 for all-zero types
};

// Divides each event type by its mean over all series and days.
NormalizedSeries normalize_series(const std::vector<CountSeries>& series);

struct AverageIntensity {
    Eigen::MatrixXd curves;  // M x N
    std::size_t seed_count = 0;
};

// Mean over series of the per-series conditional intensity.
AverageIntensity average_intensity(const HawkesParams& params, const DelayKernel& kernel,
                                   const std::vector<CountSeries>& series);

enum class Norm { L1, L2 };

std::string_view to_string(Norm n);
Norm parse_norm(std::string_view text);

// L1: mean absolute difference per day. L2: mean squared difference per day (no root).
double curve_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                      Norm norm);

struct DistanceRow {
    std::string event_type;
    std::string reference;
    double distance = 0.0;
};

struct GroupClassification {
    std::string label;
    std::vector<DistanceRow> table;  // per event type, per reference
    std::vector<std::pair<std::string, double>> totals;  // summed over event types, per reference
};

// Picks the reference whose curves have the smallest distance summed over
// event types. Ties go to the earlier reference.
GroupClassification classify_group(const AverageIntensity& test,
                                   const std::vector<std::pair<std::string, AverageIntensity>>& references,
                                   Norm norm, const std::vector<std::string>& row_names = {});

// CSV with header dataset,event_type,reference,norm,distance.
void write_distance_table_header(std::ostream& out);
void write_distance_rows(std::ostream& out, const std::string& dataset, Norm norm,
                         const std::vector<DistanceRow>& rows);

// CSV day,append,extend,mutate.
void write_intensity_csv(std::ostream& out, const Eigen::MatrixXd& curves);

struct ClusterOptions {
    std::size_t k = 3;
    std::uint64_t seed = 0;
    int max_iterations = 300;
};

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> labels;  // 0-based cluster per series, in input order
    std::vector<Eigen::VectorXd> centroids;  // length 3N, append || extend || mutate
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after initialization and after each iteration
    int iterations = 0;
    bool converged = false;

    std::vector<std::size_t> cluster_sizes() const;
};

// Flattens a series to the rows concatenated in event-type order.
Eigen::VectorXd flatten_series(const CountSeries& s);

// Lloyd's k-means on flattened series, starting from a seeded random
// partition. A cluster that becomes empty takes the point farthest from its
// current centroid.
ClusterAssignment cluster_seeds(const std::vector<CountSeries>& series, const ClusterOptions& options);

// Final inertia for k = 1..k_max with the same seed, for picking k by eye.
std::vector<double> elbow_curve(const std::vector<CountSeries>& series, std::size_t k_max, std::uint64_t seed);

// CSV triple_id,cluster with 1-based cluster numbers.
void write_clusters_csv(std::ostream& out, const std::vector<CountSeries>& series, const ClusterAssignment& a);

}  // namespace newsflow
