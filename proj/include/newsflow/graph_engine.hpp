#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "newsflow/corpus.hpp"
#include "newsflow/count_series.hpp"

namespace newsflow {

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    auto operator<=>(const Triple&) const = default;
    bool operator==(const Triple&) const = default;
};

std::string to_string(const Triple& t);

// Directed multigraph over phrases. Parallel edges between the same ordered
// node pair must carry distinct relations, so edges form a set of triples.
class RdfGraph {
public:
    // Returns true if the edge was not already present.
    bool add(const Triple& t);
    void merge(const RdfGraph& other);

    bool has_node(const std::string& phrase) const { return nodes_.count(phrase) > 0; }
    bool has_edge(const Triple& t) const { return edges_.count(t) > 0; }
    const std::set<std::string>& nodes() const { return nodes_; }
    const std::set<Triple>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return edges_.empty(); }

private:
    std::set<std::string> nodes_;
    std::set<Triple> edges_;
};

// G(1..N): the distinct triples of each day. Index 0 is day 1.
std::vector<RdfGraph> build_graph_sequence(const Corpus& corpus);

// Union of the daily graphs through some day; only grows.
class CumulativeGraph {
public:
    void advance(const RdfGraph& next_day);
    const RdfGraph& graph() const { return graph_; }
    int through_day() const { return through_day_; }

private:
    RdfGraph graph_;
    int through_day_ = 0;
};

enum class ChangeType { Append, Extend, Mutate, None };

std::string_view to_string(ChangeType c);

// Classifies a triple arriving after `cumulative` against one initial triple.
// Checked in order: Mutate (same ordered head and tail, different relation),
// Append (exactly one endpoint shared with the seed, other endpoint unseen),
// Extend (exactly one endpoint shared, other endpoint already a node).
ChangeType classify_triple(const Triple& t, const Triple& seed, const RdfGraph& cumulative);

class InitialTripleSet {
public:
    InitialTripleSet() = default;
    explicit InitialTripleSet(std::vector<Triple> triples);

    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    const Triple& at(std::size_t id) const { return triples_.at(id); }
    const std::vector<Triple>& triples() const { return triples_; }
    std::optional<std::size_t> id_of(const Triple& t) const;

private:
    std::vector<Triple> triples_;
    std::map<Triple, std::size_t> id_of_;
};

// Tab-separated head, relation, tail per line; '#' starts a comment line.
InitialTripleSet read_seed_file(std::istream& in);
InitialTripleSet read_seed_file(const std::string& path);

// All distinct triples of days [1, last_day], in sorted order.
InitialTripleSet seeds_from_window(const Corpus& corpus, int last_day = 1);

struct CountOptions {
    int seed_window_end = 1;  // seeds must occur in days [1, seed_window_end]
    unsigned threads = 1;
};

// Append/extend/mutate counts per initial triple. Each day's new triples are
// classified against the cumulative graph of all earlier days, then merged.
std::vector<CountSeries> count_events(const Corpus& corpus, const InitialTripleSet& seeds,
                                      const CountOptions& options = {});

// Graph induced by the selected seed triples. With `collapse_multi_edges`,
// only the lexicographically smallest relation is kept per ordered node pair.
RdfGraph extract_seed_subgraph(const InitialTripleSet& seeds, const std::set<std::size_t>& subset,
                               bool collapse_multi_edges = false);

void write_edge_list(std::ostream& out, const RdfGraph& g);
void write_dot(std::ostream& out, const RdfGraph& g, const std::string& name = "G");

}  // namespace newsflow
