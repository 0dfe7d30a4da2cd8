#include "cli/config.hpp"

#include <charconv>
#include <fstream>

#include "newsflow/csv.hpp"
#include "newsflow/text.hpp"

namespace newsflow::cli {

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        return csv::parse_double(value, 0);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + value + "'");
    }
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        return csv::parse_int(value, 0);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    std::string v = normalize_phrase(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::set<std::string> parse_outlet_list(const std::string& value) {
    std::set<std::string> out;
    for (const auto& part : split(value, ',')) {
        std::string outlet = normalize_phrase(part);
        if (!outlet.empty()) out.insert(outlet);
    }
    return out;
}

void PipelineConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key.rfind("group.", 0) == 0) {
        std::string label = normalize_phrase(key.substr(6));
        if (label.empty()) throw ConfigError("empty group label");
        group_outlets[label] = parse_outlet_list(value);
        return;
    }
    if (key == "corpus") corpus = value;
    else if (key == "embeddings") embeddings = value;
    else if (key == "seeds") seeds = value;
    else if (key == "groups") groups = value;
    else if (key == "map") map = value;
    else if (key == "counts") counts = value;
    else if (key == "params") params = value;
    else if (key == "test") test = value;
    else if (key == "out-dir") out_dir = value;
    else if (key == "out") out = value;
    else if (key == "reference") {
        references.clear();
        for (const auto& r : split(value, ';')) {
            if (!trim(r).empty()) references.push_back(trim(r));
        }
    }
    else if (key == "start") start = value;
    else if (key == "end") end = value;
    else if (key == "seed-window") seed_window = static_cast<int>(to_int(key, value));
    else if (key == "coarse-th") coarse_th = to_double(key, value);
    else if (key == "fine-th") fine_th = to_double(key, value);
    else if (key == "beta") beta = to_double(key, value);
    else if (key == "max-iter") max_iter = static_cast<int>(to_int(key, value));
    else if (key == "tolerance") tolerance = to_double(key, value);
    else if (key == "mu-floor") mu_floor = to_double(key, value);
    else if (key == "normalize") normalize = to_bool(key, value);
    else if (key == "excitation") excitation = to_bool(key, value);
    else if (key == "k") {
        long long v = to_int(key, value);
        if (v < 1) throw ConfigError("k must be >= 1");
        k = static_cast<std::size_t>(v);
    }
    else if (key == "seed") {
        long long v = to_int(key, value);
        if (v < 0) throw ConfigError("seed must be nonnegative");
        seed = static_cast<unsigned long long>(v);
    }
    else if (key == "norm") norm = value;
    else if (key == "dataset") dataset = value;
    else if (key == "group") group = normalize_phrase(value);
    else if (key == "test-group") test_group = normalize_phrase(value);
    else if (key == "mu") mu = value;
    else if (key == "A") A = value;
    else if (key == "days") days = static_cast<int>(to_int(key, value));
    else if (key == "series") {
        long long v = to_int(key, value);
        if (v < 1) throw ConfigError("series must be >= 1");
        series = static_cast<std::size_t>(v);
    }
    else if (key == "threads") {
        long long v = to_int(key, value);
        if (v < 1) throw ConfigError("threads must be >= 1");
        threads = static_cast<unsigned>(v);
    }
    else throw ConfigError("unknown configuration key '" + key + "'");
}

void PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        try {
            set(trim(stripped.substr(0, eq)), stripped.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void PipelineConfig::load_groups_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open groups file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected label=outlet,outlet,...");
        }
        std::string label = normalize_phrase(stripped.substr(0, eq));
        if (label.empty()) throw ConfigError(path + ":" + std::to_string(line_no) + ": empty group label");
        auto outlets = parse_outlet_list(stripped.substr(eq + 1));
        group_outlets[label].insert(outlets.begin(), outlets.end());
    }
}

std::vector<std::string> PipelineConfig::to_lines() const {
    std::map<std::string, std::string> kv{
        {"corpus", corpus}, {"embeddings", embeddings}, {"seeds", seeds}, {"groups", groups},
        {"map", map}, {"counts", counts}, {"params", params}, {"test", test},
        {"out-dir", out_dir}, {"out", out}, {"reference", join(references, ";")},
        {"start", start}, {"end", end}, {"seed-window", std::to_string(seed_window)},
        {"coarse-th", csv::format_double(coarse_th)}, {"fine-th", csv::format_double(fine_th)},
        {"beta", csv::format_double(beta)}, {"max-iter", std::to_string(max_iter)},
        {"tolerance", csv::format_double(tolerance)}, {"mu-floor", csv::format_double(mu_floor)},
        {"normalize", bool_text(normalize)}, {"excitation", bool_text(excitation)},
        {"k", std::to_string(k)}, {"norm", norm}, {"dataset", dataset}, {"group", group},
        {"test-group", test_group}, {"mu", mu}, {"A", A}, {"days", std::to_string(days)},
        {"series", std::to_string(series)}, {"threads", std::to_string(threads)}};
    if (seed) kv["seed"] = std::to_string(*seed);
    for (const auto& [label, outlets] : group_outlets) {
        kv["group." + label] = join(std::vector<std::string>(outlets.begin(), outlets.end()), ",");
    }
    std::vector<std::string> lines;
    for (const auto& [key, value] : kv) lines.push_back(key + "=" + value);
    return lines;
}

void PipelineConfig::check_ranges() const {
    if (!(coarse_th > 0 && coarse_th <= 1) || !(fine_th > 0 && fine_th <= 1)) {
        throw ConfigError("coarse-th and fine-th must lie in (0, 1]");
    }
    if (!(beta > 0)) throw ConfigError("beta must be positive");
    if (seed_window < 1) throw ConfigError("seed-window must be >= 1");
    if (max_iter < 0) throw ConfigError("max-iter must be >= 0");
    if (!(tolerance > 0)) throw ConfigError("tolerance must be positive");
    if (!(mu_floor > 0)) throw ConfigError("mu-floor must be positive");
}

}  // namespace newsflow::cli
