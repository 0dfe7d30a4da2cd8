#include "newsflow/graph_engine.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "newsflow/diagnostics.hpp"
#include "newsflow/parallel.hpp"
#include "newsflow/text.hpp"

namespace newsflow {

std::string to_string(const Triple& t) { return t.head + " -> " + t.relation + " -> " + t.tail; }

bool RdfGraph::add(const Triple& t) {
    nodes_.insert(t.head);
    nodes_.insert(t.tail);
    return edges_.insert(t).second;
}

void RdfGraph::merge(const RdfGraph& other) {
    nodes_.insert(other.nodes_.begin(), other.nodes_.end());
    edges_.insert(other.edges_.begin(), other.edges_.end());
}

std::vector<RdfGraph> build_graph_sequence(const Corpus& corpus) {
    std::vector<RdfGraph> days(static_cast<std::size_t>(corpus.horizon()));
    for (const auto& r : corpus.records()) {
        days[static_cast<std::size_t>(r.day - 1)].add({r.head, r.relation, r.tail});
    }
    return days;
}

void CumulativeGraph::advance(const RdfGraph& next_day) {
    graph_.merge(next_day);
    ++through_day_;
}

std::string_view to_string(ChangeType c) {
    switch (c) {
        case ChangeType::Append: return "append";
        case ChangeType::Extend: return "extend";
        case ChangeType::Mutate: return "mutate";
        case ChangeType::None: break;
    }
    return "none";
}

ChangeType classify_triple(const Triple& t, const Triple& seed, const RdfGraph& cumulative) {
    if (t.head == seed.head && t.tail == seed.tail && t.relation != seed.relation) return ChangeType::Mutate;

    auto on_seed = [&](const std::string& node) { return node == seed.head || node == seed.tail; };
    const bool head_on = on_seed(t.head);
    const bool tail_on = on_seed(t.tail);
    if (head_on == tail_on) return ChangeType::None;

    const std::string& other = head_on ? t.tail : t.head;
    return cumulative.has_node(other) ? ChangeType::Extend : ChangeType::Append;
}

InitialTripleSet::InitialTripleSet(std::vector<Triple> triples) : triples_(std::move(triples)) {
    for (std::size_t i = 0; i < triples_.size(); ++i) {
        if (!id_of_.emplace(triples_[i], i).second) {
            throw std::invalid_argument("duplicate initial triple " + to_string(triples_[i]));
        }
    }
}

std::optional<std::size_t> InitialTripleSet::id_of(const Triple& t) const {
    auto it = id_of_.find(t);
    if (it == id_of_.end()) return std::nullopt;
    return it->second;
}

InitialTripleSet read_seed_file(std::istream& in) {
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::vector<std::string> fields = split(stripped, '\t');
        if (fields.size() != 3) throw ParseError("seed line needs head<TAB>relation<TAB>tail", line_no);
        Triple t{normalize_phrase(fields[0]), normalize_phrase(fields[1]), normalize_phrase(fields[2])};
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) throw ParseError("empty seed phrase", line_no);
        triples.push_back(std::move(t));
    }
    try {
        return InitialTripleSet(std::move(triples));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

InitialTripleSet read_seed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_seed_file(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

InitialTripleSet seeds_from_window(const Corpus& corpus, int last_day) {
    RdfGraph window;
    for (const auto& r : corpus.records()) {
        if (r.day <= last_day) window.add({r.head, r.relation, r.tail});
    }
    return InitialTripleSet(std::vector<Triple>(window.edges().begin(), window.edges().end()));
}

std::vector<CountSeries> count_events(const Corpus& corpus, const InitialTripleSet& seeds,
                                      const CountOptions& options) {
    const int horizon = corpus.horizon();
    if (options.seed_window_end < 1 || options.seed_window_end > horizon) {
        throw std::invalid_argument("seed window end must lie in [1, " + std::to_string(horizon) + "]");
    }
    const std::vector<RdfGraph> days = build_graph_sequence(corpus);

    CumulativeGraph cumulative;
    for (int d = 0; d < options.seed_window_end; ++d) cumulative.advance(days[static_cast<std::size_t>(d)]);
    for (const auto& seed : seeds.triples()) {
        if (!cumulative.graph().has_edge(seed)) {
            throw std::invalid_argument("initial triple " + to_string(seed) + " does not occur in days 1.." +
                                        std::to_string(options.seed_window_end));
        }
    }

    std::vector<CountSeries> series(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        series[i].triple_id = i;
        series[i].counts = Eigen::MatrixXd::Zero(kEventTypes, horizon);
    }

    std::vector<Triple> arrivals;
    for (int d = options.seed_window_end; d < horizon; ++d) {
        const RdfGraph& today = days[static_cast<std::size_t>(d)];
        arrivals.clear();
        for (const auto& t : today.edges()) {
            if (!cumulative.graph().has_edge(t)) arrivals.push_back(t);
        }
        const RdfGraph& before = cumulative.graph();
        parallel_for(seeds.size(), options.threads, [&](std::size_t i) {
            const Triple& seed = seeds.at(i);
            for (const auto& t : arrivals) {
                switch (classify_triple(t, seed, before)) {
                    case ChangeType::Append: series[i].counts(kAppend, d) += 1; break;
                    case ChangeType::Extend: series[i].counts(kExtend, d) += 1; break;
                    case ChangeType::Mutate: series[i].counts(kMutate, d) += 1; break;
                    case ChangeType::None: break;
                }
            }
        });
        cumulative.advance(today);
    }
    return series;
}

RdfGraph extract_seed_subgraph(const InitialTripleSet& seeds, const std::set<std::size_t>& subset,
                               bool collapse_multi_edges) {
    RdfGraph g;
    std::set<std::pair<std::string, std::string>> pairs;
    for (std::size_t id : subset) {
        if (id >= seeds.size()) throw std::out_of_range("unknown initial triple id " + std::to_string(id));
    }
    // Iterate in triple order so the collapsed relation is the smallest one.
    std::set<Triple> selected;
    for (std::size_t id : subset) selected.insert(seeds.at(id));
    for (const auto& t : selected) {
        if (collapse_multi_edges && !pairs.emplace(t.head, t.tail).second) continue;
        g.add(t);
    }
    return g;
}

void write_edge_list(std::ostream& out, const RdfGraph& g) {
    for (const auto& t : g.edges()) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
}

namespace {
std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}
}  // namespace

void write_dot(std::ostream& out, const RdfGraph& g, const std::string& name) {
    out << "digraph " << dot_quote(name) << " {\n";
    for (const auto& n : g.nodes()) out << "  " << dot_quote(n) << ";\n";
    for (const auto& t : g.edges()) {
        out << "  " << dot_quote(t.head) << " -> " << dot_quote(t.tail) << " [label=" << dot_quote(t.relation)
            << "];\n";
    }
    out << "}\n";
}

}  // namespace newsflow
