#include "cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/manifest.hpp"
#include "newsflow/analysis.hpp"
#include "newsflow/corpus.hpp"
#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"
#include "newsflow/graph_engine.hpp"
#include "newsflow/hawkes.hpp"
#include "newsflow/phrase_dedup.hpp"
#include "newsflow/text.hpp"

namespace newsflow::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kOptionHelp = {
    {"corpus", "line-delimited JSON triple records"},
    {"embeddings", "text embedding file (optional header 'vocab dim')"},
    {"seeds", "initial triples, one head<TAB>relation<TAB>tail per line"},
    {"groups", "group definitions, one label=outlet,outlet,... per line"},
    {"group", "restrict the corpus to this group's outlets"},
    {"test-group", "group compared against the others"},
    {"map", "canonical phrase map CSV (phrase,representative)"},
    {"counts", "count series CSV (triple_id,day,append,extend,mutate)"},
    {"params", "fitted parameter CSV"},
    {"test", "count series CSV of the group to classify"},
    {"out-dir", "output directory"},
    {"out", "output file (overrides the default name in --out-dir)"},
    {"start", "first day of the corpus window, YYYY-MM-DD"},
    {"end", "last day of the corpus window, YYYY-MM-DD"},
    {"seed-window", "initial triples come from days 1..N"},
    {"coarse-th", "coarse (token overlap) similarity threshold"},
    {"fine-th", "fine (embedding) similarity threshold"},
    {"beta", "exponential delay rate"},
    {"max-iter", "optimizer iteration limit"},
    {"tolerance", "optimizer log-likelihood change tolerance"},
    {"mu-floor", "lower bound on baseline rates"},
    {"k", "number of clusters"},
    {"seed", "random seed"},
    {"norm", "L1, L2 or both"},
    {"dataset", "dataset name written to distance tables"},
    {"mu", "baseline rates, comma separated"},
    {"A", "infectivity: diag:x, zero, or M*M comma separated values (row major)"},
    {"days", "simulation horizon in days"},
    {"series", "number of simulated series"},
    {"threads", "worker threads"},
};

struct SubcommandSpec {
    std::string name;
    std::string description;
    std::vector<std::string> keys;
    bool normalize_flag = false;
    bool excitation_flag = false;
    bool references = false;
};

const std::vector<SubcommandSpec>& subcommand_specs() {
    static const std::vector<SubcommandSpec> specs = {
        {"ingest", "read and normalize triple records; export daily word counts", {"corpus", "start", "end"}},
        {"dedup", "merge duplicate phrases into a canonical map",
         {"corpus", "start", "end", "embeddings", "coarse-th", "fine-th"}},
        {"count", "count append/extend/mutate events per initial triple",
         {"corpus", "start", "end", "seeds", "map", "groups", "group", "seed-window", "out"}},
        {"fit", "fit the Hawkes model to count series",
         {"counts", "beta", "max-iter", "tolerance", "mu-floor"}, true, true},
        {"intensity", "average conditional intensity of count series under fitted parameters",
         {"counts", "params", "beta", "out"}, true},
        {"classify", "assign a test group to the closest reference group by intensity distance",
         {"test", "norm", "dataset", "beta", "max-iter", "tolerance", "mu-floor"}, true, true, true},
        {"cluster", "k-means clustering of count series with per-cluster fits",
         {"counts", "k", "seed", "seeds", "beta", "max-iter", "tolerance", "mu-floor"}, true, true},
        {"simulate", "simulate count series from Hawkes parameters",
         {"mu", "A", "params", "beta", "days", "series", "seed", "out"}},
        {"stats", "per-group corpus statistics and word-count distances",
         {"corpus", "start", "end", "groups", "test-group", "map", "norm", "dataset"}},
    };
    return specs;
}

struct BoundSubcommand {
    const SubcommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::vector<std::string> references;
    CLI::Option* references_opt = nullptr;
    bool normalize = false;
    CLI::Option* normalize_opt = nullptr;
    bool no_excitation = false;
    CLI::Option* no_excitation_opt = nullptr;
    std::string config;
    CLI::Option* config_opt = nullptr;
};

// State shared by one subcommand run.
struct Run {
    std::string subcommand;
    PipelineConfig cfg;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::string require(const std::string& value, const std::string& key) const {
        if (value.empty()) throw ConfigError(subcommand + " needs --" + key);
        return value;
    }

    std::string input(const std::string& path) {
        if (!fs::exists(path)) throw ConfigError("input not found: " + path);
        inputs.push_back(path);
        return path;
    }

    fs::path output_path(const std::string& default_name) const {
        return cfg.out.empty() ? fs::path(cfg.out_dir) / default_name : fs::path(cfg.out);
    }

    void write(const fs::path& path, const std::function<void(std::ostream&)>& body) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + path.string());
        body(file);
        if (!file) throw std::runtime_error("error writing " + path.string());
        outputs.push_back(path.string());
    }

    void write_manifest_file() {
        fs::path path = cfg.out.empty() ? fs::path(cfg.out_dir) / (subcommand + ".manifest")
                                        : fs::path(cfg.out + ".manifest");
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        write_manifest(path.string(), subcommand, cfg, inputs, outputs);
    }
};

std::pair<Date, Date> resolve_window(Run& run) {
    const PipelineConfig& cfg = run.cfg;
    if (!cfg.start.empty() && !cfg.end.empty()) return {parse_date(cfg.start), parse_date(cfg.end)};
    auto [lo, hi] = scan_date_range(cfg.corpus);
    return {cfg.start.empty() ? lo : parse_date(cfg.start), cfg.end.empty() ? hi : parse_date(cfg.end)};
}

Corpus load_corpus(Run& run) {
    run.input(run.require(run.cfg.corpus, "corpus"));
    auto [start, end] = resolve_window(run);
    IngestResult result = ingest(run.cfg.corpus, start, end);
    if (result.report.skipped() > 0) print_skip_report(run.err, result.report, run.cfg.corpus);
    return std::move(result.corpus);
}

std::optional<CanonicalMap> load_map(Run& run) {
    if (run.cfg.map.empty()) return std::nullopt;
    return read_canonical_map_csv(run.input(run.cfg.map));
}

void load_groups(Run& run) {
    if (!run.cfg.groups.empty()) run.cfg.load_groups_file(run.input(run.cfg.groups));
}

const std::set<std::string>& group_outlets(const Run& run, const std::string& label) {
    auto it = run.cfg.group_outlets.find(label);
    if (it == run.cfg.group_outlets.end()) throw ConfigError("unknown group '" + label + "'");
    return it->second;
}

std::vector<Norm> selected_norms(const std::string& text) {
    if (text == "both") return {Norm::L1, Norm::L2};
    return {parse_norm(text)};
}

FitOptions fit_options(const PipelineConfig& cfg) {
    FitOptions opts;
    opts.max_iterations = cfg.max_iter;
    opts.tolerance = cfg.tolerance;
    opts.mu_floor = cfg.mu_floor;
    opts.fit_excitation = cfg.excitation;
    opts.threads = cfg.threads;
    return opts;
}

std::vector<CountSeries> load_series(Run& run, const std::string& path, Eigen::VectorXd* scales = nullptr) {
    std::vector<CountSeries> series = read_count_series_csv(run.input(path));
    if (series.empty()) throw std::runtime_error(path + ": no count series");
    if (run.cfg.normalize) {
        NormalizedSeries normalized = normalize_series(series);
        if (scales) *scales = normalized.scales;
        return std::move(normalized.series);
    }
    if (scales) *scales = Eigen::VectorXd::Ones(series.front().types());
    return series;
}

void write_scales(std::ostream& out, const Eigen::VectorXd& scales) {
    out << "event_type,scale\n";
    for (int k = 0; k < scales.size(); ++k) {
        out << (k < kEventTypes ? std::string(kEventTypeNames[k]) : std::to_string(k + 1)) << ','
            << csv::format_double(scales(k)) << '\n';
    }
}

// ---- subcommands ----

void cmd_ingest(Run& run) {
    Corpus corpus = load_corpus(run);
    const fs::path dir(run.cfg.out_dir);
    run.write(dir / "corpus.jsonl", [&](std::ostream& o) { write_corpus_jsonl(o, corpus); });
    run.write(dir / "word_counts.csv", [&](std::ostream& o) { write_word_counts_csv(o, daily_word_counts(corpus)); });
    run.err << "note: word counts are token counts of the extracted triples, not of full article text\n";
    run.out << "records=" << corpus.records().size() << " days=" << corpus.horizon()
            << " sources=" << corpus.sources().size() << " start=" << format_date(corpus.start_date()) << '\n';
}

void cmd_dedup(Run& run) {
    Corpus corpus = load_corpus(run);
    EmbeddingTable emb;
    if (!run.cfg.embeddings.empty()) emb = load_embeddings(run.input(run.cfg.embeddings));
    DedupOptions opts{run.cfg.coarse_th, run.cfg.fine_th, run.cfg.threads};
    DedupStats stats;
    const auto vocabulary = phrase_vocabulary(corpus);
    CanonicalMap map = build_canonical_map(vocabulary, emb, opts, &stats);
    Corpus deduped = apply_canonical_map(corpus, map);
    const fs::path dir(run.cfg.out_dir);
    run.write(dir / "canonical_map.csv", [&](std::ostream& o) { write_canonical_map_csv(o, map); });
    run.write(dir / "corpus_dedup.jsonl", [&](std::ostream& o) { write_corpus_jsonl(o, deduped); });
    run.out << "phrases=" << vocabulary.size() << " clusters=" << map.clusters().size()
            << " coarse_links=" << stats.coarse_links << " fine_links=" << stats.fine_links
            << " records_before=" << corpus.records().size() << " records_after=" << deduped.records().size()
            << '\n';
}

Triple map_triple(const Triple& t, const CanonicalMap& map) {
    return {map.lookup(t.head), map.lookup(t.relation), map.lookup(t.tail)};
}

void cmd_count(Run& run) {
    Corpus corpus = load_corpus(run);
    load_groups(run);
    if (!run.cfg.group.empty()) corpus = filter_by_sources(corpus, group_outlets(run, run.cfg.group));
    std::optional<CanonicalMap> map = load_map(run);
    if (map) corpus = apply_canonical_map(corpus, *map);

    InitialTripleSet seeds;
    const bool derived_seeds = run.cfg.seeds.empty();
    if (derived_seeds) {
        seeds = seeds_from_window(corpus, run.cfg.seed_window);
    } else {
        seeds = read_seed_file(run.input(run.cfg.seeds));
        if (map) {
            std::vector<Triple> mapped;
            for (const auto& t : seeds.triples()) mapped.push_back(map_triple(t, *map));
            seeds = InitialTripleSet(std::move(mapped));
        }
    }
    CountOptions opts{run.cfg.seed_window, run.cfg.threads};
    std::vector<CountSeries> series = count_events(corpus, seeds, opts);

    const fs::path out = run.output_path("counts.csv");
    run.write(out, [&](std::ostream& o) { write_count_series_csv(o, series); });
    if (derived_seeds) {
        fs::path seeds_out = out;
        seeds_out.replace_extension(".seeds.tsv");
        run.write(seeds_out, [&](std::ostream& o) {
            for (const auto& t : seeds.triples()) o << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
        });
    }
    run.out << "seeds=" << seeds.size() << " days=" << corpus.horizon() << " records=" << corpus.records().size()
            << '\n';
}

void cmd_fit(Run& run) {
    Eigen::VectorXd scales;
    std::vector<CountSeries> series = load_series(run, run.require(run.cfg.counts, "counts"), &scales);
    FitResult fit = fit_mle(series, DelayKernel(run.cfg.beta), fit_options(run.cfg));
    const fs::path dir(run.cfg.out_dir);
    run.write(dir / "params.csv", [&](std::ostream& o) { write_params_csv(o, fit.params); });
    run.write(dir / "fit_report.txt", [&](std::ostream& o) { write_fit_report(o, fit.report); });
    if (run.cfg.normalize) run.write(dir / "normalization.csv", [&](std::ostream& o) { write_scales(o, scales); });
    write_fit_report(run.out, fit.report);
}

void cmd_intensity(Run& run) {
    std::vector<CountSeries> series = load_series(run, run.require(run.cfg.counts, "counts"));
    HawkesParams params = read_params_csv(run.input(run.require(run.cfg.params, "params")));
    AverageIntensity avg = average_intensity(params, DelayKernel(run.cfg.beta), series);
    run.write(run.output_path("intensity.csv"), [&](std::ostream& o) { write_intensity_csv(o, avg.curves); });
    run.out << "series=" << avg.seed_count << " days=" << avg.curves.cols() << '\n';
}

std::pair<std::string, std::string> split_reference(const std::string& ref) {
    auto eq = ref.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == ref.size()) {
        throw ConfigError("reference must be label=counts.csv, got '" + ref + "'");
    }
    return {normalize_phrase(ref.substr(0, eq)), trim(ref.substr(eq + 1))};
}

void cmd_classify(Run& run) {
    const PipelineConfig& cfg = run.cfg;
    if (cfg.references.size() < 2) throw ConfigError("classify needs at least two --reference label=counts.csv");
    std::vector<std::pair<std::string, std::string>> groups{{"test", run.require(cfg.test, "test")}};
    for (const auto& ref : cfg.references) groups.push_back(split_reference(ref));

    const DelayKernel kernel(cfg.beta);
    const fs::path dir(cfg.out_dir);
    std::vector<std::pair<std::string, AverageIntensity>> curves;
    for (const auto& [label, path] : groups) {
        std::vector<CountSeries> series = load_series(run, path);
        FitResult fit = fit_mle(series, kernel, fit_options(cfg));
        AverageIntensity avg = average_intensity(fit.params, kernel, series);
        run.write(dir / ("params_" + label + ".csv"), [&](std::ostream& o) { write_params_csv(o, fit.params); });
        run.write(dir / ("fit_report_" + label + ".txt"), [&](std::ostream& o) { write_fit_report(o, fit.report); });
        run.write(dir / ("intensity_" + label + ".csv"), [&](std::ostream& o) { write_intensity_csv(o, avg.curves); });
        curves.emplace_back(label, std::move(avg));
    }
    const AverageIntensity test = curves.front().second;
    std::vector<std::pair<std::string, AverageIntensity>> references(curves.begin() + 1, curves.end());

    std::vector<std::pair<Norm, GroupClassification>> results;
    for (Norm norm : selected_norms(cfg.norm)) results.emplace_back(norm, classify_group(test, references, norm));
    run.write(dir / "distance_table.csv", [&](std::ostream& o) {
        write_distance_table_header(o);
        for (const auto& [norm, result] : results) write_distance_rows(o, cfg.dataset, norm, result.table);
    });
    run.write(dir / "classification.txt", [&](std::ostream& o) {
        for (const auto& [norm, result] : results) {
            o << "norm=" << to_string(norm) << " label=" << result.label;
            for (const auto& [label, total] : result.totals) o << " total_" << label << '=' << csv::format_double(total);
            o << '\n';
        }
    });
    for (const auto& [norm, result] : results) run.out << to_string(norm) << ": test is closest to " << result.label << '\n';
}

void cmd_cluster(Run& run) {
    const PipelineConfig& cfg = run.cfg;
    if (!cfg.seed) throw ConfigError("cluster needs an explicit --seed");
    std::vector<CountSeries> series = load_series(run, run.require(cfg.counts, "counts"));
    ClusterAssignment assignment = cluster_seeds(series, {cfg.k, *cfg.seed, 300});
    std::vector<double> elbow = elbow_curve(series, std::max<std::size_t>(cfg.k, 10), *cfg.seed);

    std::optional<InitialTripleSet> seeds;
    if (!cfg.seeds.empty()) seeds = read_seed_file(run.input(cfg.seeds));

    const fs::path dir(cfg.out_dir);
    run.write(dir / "clusters.csv", [&](std::ostream& o) { write_clusters_csv(o, series, assignment); });
    run.write(dir / "elbow.csv", [&](std::ostream& o) {
        o << "k,inertia\n";
        for (std::size_t k = 0; k < elbow.size(); ++k) o << (k + 1) << ',' << csv::format_double(elbow[k]) << '\n';
    });

    const DelayKernel kernel(cfg.beta);
    const auto sizes = assignment.cluster_sizes();
    for (std::size_t c = 0; c < assignment.k; ++c) {
        std::vector<CountSeries> members;
        std::set<std::size_t> ids;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (assignment.labels[i] == c) {
                members.push_back(series[i]);
                ids.insert(series[i].triple_id);
            }
        }
        const std::string tag = "cluster" + std::to_string(c + 1);
        FitResult fit = fit_mle(members, kernel, fit_options(cfg));
        AverageIntensity avg = average_intensity(fit.params, kernel, members);
        run.write(dir / ("params_" + tag + ".csv"), [&](std::ostream& o) { write_params_csv(o, fit.params); });
        run.write(dir / ("fit_report_" + tag + ".txt"), [&](std::ostream& o) { write_fit_report(o, fit.report); });
        run.write(dir / ("intensity_" + tag + ".csv"), [&](std::ostream& o) { write_intensity_csv(o, avg.curves); });
        if (seeds) {
            RdfGraph sub = extract_seed_subgraph(*seeds, ids, true);
            run.write(dir / ("subgraph_" + tag + ".tsv"), [&](std::ostream& o) { write_edge_list(o, sub); });
            run.write(dir / ("subgraph_" + tag + ".dot"), [&](std::ostream& o) { write_dot(o, sub, tag); });
        }
        run.out << tag << ": size=" << sizes[c] << '\n';
    }
    run.out << "inertia=" << csv::format_double(assignment.inertia) << " iterations=" << assignment.iterations << '\n';
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& key) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        try {
            values.push_back(csv::parse_double(part, 0));
        } catch (const std::exception&) {
            throw ConfigError("invalid value in --" + key + ": '" + part + "'");
        }
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd parse_infectivity(const std::string& text, int m) {
    if (text.empty() || text == "zero") return Eigen::MatrixXd::Zero(m, m);
    if (text.rfind("diag:", 0) == 0) {
        Eigen::VectorXd d = parse_vector(text.substr(5), "A");
        if (d.size() == 1) return d(0) * Eigen::MatrixXd::Identity(m, m);
        if (d.size() != m) throw ConfigError("--A diag: needs 1 or " + std::to_string(m) + " values");
        return d.asDiagonal();
    }
    std::string body = text.rfind("full:", 0) == 0 ? text.substr(5) : text;
    Eigen::VectorXd v = parse_vector(body, "A");
    if (v.size() != m * m) throw ConfigError("--A needs " + std::to_string(m * m) + " values (row major)");
    Eigen::MatrixXd a(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) a(r, c) = v(r * m + c);
    }
    return a;
}

void cmd_simulate(Run& run) {
    const PipelineConfig& cfg = run.cfg;
    if (!cfg.seed) throw ConfigError("simulate needs an explicit --seed");
    if (cfg.days < 1) throw ConfigError("simulate needs --days >= 1");
    HawkesParams params;
    if (!cfg.params.empty()) {
        params = read_params_csv(run.input(cfg.params));
    } else {
        params.mu = parse_vector(run.require(cfg.mu, "mu"), "mu");
        params.A = parse_infectivity(cfg.A, static_cast<int>(params.mu.size()));
    }
    if (params.types() != kEventTypes) throw ConfigError("simulate exports 3 event types; --mu needs 3 values");
    const DelayKernel kernel(cfg.beta);
    std::vector<CountSeries> series;
    if (cfg.series == 1) {
        series.push_back(simulate(params, kernel, cfg.days, *cfg.seed));
    } else {
        series = simulate_many(params, kernel, cfg.days, cfg.series, *cfg.seed);
    }
    run.write(run.output_path("simulated.csv"), [&](std::ostream& o) { write_count_series_csv(o, series); });
    run.out << "series=" << series.size() << " days=" << cfg.days << '\n';
}

void cmd_stats(Run& run) {
    const PipelineConfig& cfg = run.cfg;
    Corpus corpus = load_corpus(run);
    load_groups(run);
    std::optional<CanonicalMap> map = load_map(run);
    if (map) corpus = apply_canonical_map(corpus, *map);
    const fs::path dir(cfg.out_dir);

    run.write(dir / "word_counts_all.csv", [&](std::ostream& o) { write_word_counts_csv(o, daily_word_counts(corpus)); });
    run.out << "all: records=" << corpus.records().size() << " sources=" << corpus.sources().size() << '\n';

    std::map<std::string, std::vector<long long>> words;
    for (const auto& [label, outlets] : cfg.group_outlets) {
        Corpus group = filter_by_sources(corpus, outlets);
        words[label] = daily_word_counts(group);
        run.write(dir / ("word_counts_" + label + ".csv"), [&](std::ostream& o) { write_word_counts_csv(o, words[label]); });
        run.out << label << ": records=" << group.records().size() << " sources=" << group.sources().size() << '\n';
    }
    run.err << "note: word counts are token counts of the extracted triples, not of full article text\n";

    if (cfg.test_group.empty()) return;
    if (!words.count(cfg.test_group)) throw ConfigError("unknown test group '" + cfg.test_group + "'");
    auto as_curve = [&](const std::vector<long long>& w) {
        AverageIntensity a;
        a.curves.resize(1, static_cast<Eigen::Index>(w.size()));
        for (std::size_t n = 0; n < w.size(); ++n) a.curves(0, static_cast<Eigen::Index>(n)) = static_cast<double>(w[n]);
        a.seed_count = 1;
        return a;
    };
    std::vector<std::pair<std::string, AverageIntensity>> references;
    for (const auto& [label, w] : words) {
        if (label != cfg.test_group) references.emplace_back(label, as_curve(w));
    }
    const AverageIntensity test = as_curve(words[cfg.test_group]);
    std::vector<std::pair<Norm, GroupClassification>> results;
    for (Norm norm : selected_norms(cfg.norm)) {
        results.emplace_back(norm, classify_group(test, references, norm, {"words"}));
    }
    run.write(dir / "word_distance.csv", [&](std::ostream& o) {
        write_distance_table_header(o);
        for (const auto& [norm, result] : results) write_distance_rows(o, cfg.dataset, norm, result.table);
    });
    for (const auto& [norm, result] : results) {
        run.out << to_string(norm) << ": word counts of " << cfg.test_group << " closest to " << result.label << '\n';
    }
}

const std::map<std::string, std::function<void(Run&)>>& handlers() {
    static const std::map<std::string, std::function<void(Run&)>> table = {
        {"ingest", cmd_ingest},       {"dedup", cmd_dedup},       {"count", cmd_count},
        {"fit", cmd_fit},             {"intensity", cmd_intensity}, {"classify", cmd_classify},
        {"cluster", cmd_cluster},     {"simulate", cmd_simulate}, {"stats", cmd_stats},
    };
    return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"newsflow: structural change counts and discrete-time Hawkes models for news triple streams"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kVersion));

    std::vector<std::unique_ptr<BoundSubcommand>> bound;
    for (const auto& spec : subcommand_specs()) {
        auto b = std::make_unique<BoundSubcommand>();
        b->spec = &spec;
        b->app = app.add_subcommand(spec.name, spec.description);
        b->config_opt = b->app->add_option("--config", b->config, "key=value config file (flags override it)");
        std::vector<std::string> keys = spec.keys;
        keys.push_back("out-dir");
        keys.push_back("threads");
        for (const auto& key : keys) {
            b->values[key];
            b->options[key] = b->app->add_option("--" + key, b->values[key], kOptionHelp.at(key));
        }
        if (spec.references) {
            b->references_opt =
                b->app->add_option("--reference", b->references, "reference group as label=counts.csv (repeatable)");
        }
        if (spec.normalize_flag) {
            b->normalize_opt = b->app->add_flag("--normalize", b->normalize, "divide each event type by its mean");
        }
        if (spec.excitation_flag) {
            b->no_excitation_opt = b->app->add_flag("--no-excitation", b->no_excitation, "hold A at zero");
        }
        bound.push_back(std::move(b));
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    BoundSubcommand* chosen = nullptr;
    for (auto& b : bound) {
        if (b->app->parsed()) chosen = b.get();
    }
    if (!chosen) {
        err << app.help();
        return 2;
    }

    Run run{chosen->spec->name, PipelineConfig{}, out, err, {}, {}};
    try {
        if (const char* env = std::getenv("NEWSFLOW_CONFIG"); env && *env) run.cfg.load_file(env);
        if (chosen->config_opt->count()) run.cfg.load_file(chosen->config);
        for (const auto& [key, opt] : chosen->options) {
            if (opt->count()) run.cfg.set(key, chosen->values[key]);
        }
        if (chosen->references_opt && chosen->references_opt->count()) run.cfg.references = chosen->references;
        if (chosen->normalize_opt && chosen->normalize_opt->count()) run.cfg.normalize = true;
        if (chosen->no_excitation_opt && chosen->no_excitation_opt->count()) run.cfg.excitation = false;
        run.cfg.check_ranges();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        handlers().at(run.subcommand)(run);
        run.write_manifest_file();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace newsflow::cli
