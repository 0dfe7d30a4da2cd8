#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace newsflow::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Resolved settings for one pipeline run. Every field has a key=value
// spelling identical to its long flag name (without the leading dashes).
struct PipelineConfig {
    // paths
    std::string corpus, embeddings, seeds, groups, map, counts, params, test, out_dir = ".", out;
    std::vector<std::string> references;  // label=path, in the order given

    // corpus window
    std::string start, end;
    int seed_window = 1;

    // dedup
    double coarse_th = 0.5;
    double fine_th = 0.4;

    // model and optimizer
    double beta = 0.5;
    int max_iter = 5000;
    double tolerance = 1e-8;
    double mu_floor = 1e-8;
    bool normalize = false;
    bool excitation = true;

    // analysis
    std::size_t k = 3;
    std::optional<unsigned long long> seed;
    std::string norm = "both";
    std::string dataset = "dataset";
    std::string group, test_group;

    // simulation
    std::string mu, A;
    int days = 0;
    std::size_t series = 1;

    unsigned threads = 1;

    std::map<std::string, std::set<std::string>> group_outlets;  // label -> outlets

    // Applies one key=value setting; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    // Reads key=value lines ('#' comments, blank lines ignored).
    void load_file(const std::string& path);
    // Reads a groups file of label=outlet,outlet,... lines into group_outlets.
    void load_groups_file(const std::string& path);

    // Canonical key=value lines, sorted by key.
    std::vector<std::string> to_lines() const;
    void check_ranges() const;
};

std::set<std::string> parse_outlet_list(const std::string& value);

}  // namespace newsflow::cli
