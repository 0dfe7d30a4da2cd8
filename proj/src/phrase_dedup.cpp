#include "newsflow/phrase_dedup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"
#include "newsflow/parallel.hpp"
#include "newsflow/text.hpp"

namespace newsflow {

Phrase::Phrase(std::string_view text) : tokens_(tokenize(normalize_phrase(text))) {
    if (tokens_.empty()) throw std::invalid_argument("phrase has no tokens");
}

Phrase::Phrase(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty()) throw std::invalid_argument("phrase has no tokens");
    for (const auto& t : tokens_) {
        if (t.empty()) throw std::invalid_argument("phrase contains an empty token");
    }
}

std::string Phrase::text() const { return join(tokens_, " "); }

double coarse_similarity(const Phrase& a, const Phrase& b) {
    std::vector<std::string> sa = a.tokens(), sb = b.tokens();
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<std::string> shared;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(shared));
    return static_cast<double>(shared.size()) / static_cast<double>(std::max(a.size(), b.size()));
}

bool EmbeddingTable::insert(std::string token, std::vector<double> vec) {
    if (vec.size() != dimension_) {
        throw std::invalid_argument("embedding for '" + token + "' has " + std::to_string(vec.size()) +
                                    " components, expected " + std::to_string(dimension_));
    }
    if (vectors_.count(token)) return false;
    Entry e;
    e.norm = std::sqrt(std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0));
    e.vec = std::move(vec);
    vectors_.emplace(std::move(token), std::move(e));
    return true;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second.vec;
}

double EmbeddingTable::cosine(const std::string& a, const std::string& b) const {
    auto ia = vectors_.find(a), ib = vectors_.find(b);
    if (ia == vectors_.end() || ib == vectors_.end()) return 0.0;
    const Entry& ea = ia->second;
    const Entry& eb = ib->second;
    if (ea.norm == 0.0 || eb.norm == 0.0) return 0.0;
    double dot = std::inner_product(ea.vec.begin(), ea.vec.end(), eb.vec.begin(), 0.0);
    return dot / (ea.norm * eb.norm);
}

EmbeddingTable load_embeddings(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dimension = 0;
    std::size_t declared_vocab = 0;
    bool first = true;
    bool have_table = false;
    EmbeddingTable table;
    std::size_t duplicates = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> fields = tokenize(line);
        if (fields.empty()) continue;
        if (first) {
            first = false;
            if (fields.size() == 2) {
                bool header = true;
                std::size_t values[2];
                for (int k = 0; k < 2; ++k) {
                    try {
                        long long v = csv::parse_int(fields[k], line_no);
                        if (v < 0) header = false;
                        values[k] = static_cast<std::size_t>(v);
                    } catch (const ParseError&) {
                        header = false;
                    }
                }
                if (header) {
                    if (values[1] == 0) throw ParseError("embedding header declares dimension 0", line_no);
                    declared_vocab = values[0];
                    dimension = values[1];
                    continue;
                }
            }
        }
        if (fields.size() < 2) throw ParseError("embedding row has no components", line_no);
        if (dimension == 0) dimension = fields.size() - 1;
        if (fields.size() - 1 != dimension) {
            throw ParseError("embedding row has " + std::to_string(fields.size() - 1) + " components, expected " +
                                 std::to_string(dimension),
                             line_no);
        }
        if (!have_table) {
            table = EmbeddingTable(dimension);
            have_table = true;
        }
        std::vector<double> vec;
        vec.reserve(dimension);
        for (std::size_t k = 1; k < fields.size(); ++k) vec.push_back(csv::parse_double(fields[k], line_no));
        if (!table.insert(fields[0], std::move(vec))) {
            ++duplicates;
            warn("duplicate embedding token '" + fields[0] + "' at line " + std::to_string(line_no) +
                 " ignored");
        }
    }
    if (!have_table) throw ParseError("embedding file has no vectors");
    if (declared_vocab && declared_vocab != table.size() + duplicates) {
        warn("embedding header declares " + std::to_string(declared_vocab) + " tokens, found " +
             std::to_string(table.size() + duplicates));
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return load_embeddings(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<VocabularyEntry> phrase_vocabulary(const Corpus& corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : corpus.records()) {
        ++counts[r.head];
        ++counts[r.relation];
        ++counts[r.tail];
    }
    std::vector<VocabularyEntry> out;
    out.reserve(counts.size());
    for (auto& [phrase, n] : counts) out.push_back({phrase, n});
    return out;
}

CanonicalMap::CanonicalMap(std::vector<std::vector<std::string>> clusters) : clusters_(std::move(clusters)) {
    for (const auto& cluster : clusters_) {
        if (cluster.empty()) throw std::invalid_argument("empty cluster in canonical map");
        for (const auto& member : cluster) {
            if (!representative_.emplace(member, cluster.front()).second) {
                throw std::invalid_argument("phrase '" + member + "' appears in more than one cluster");
            }
        }
    }
}

const std::string& CanonicalMap::lookup(const std::string& phrase) const {
    auto it = representative_.find(phrase);
    return it == representative_.end() ? phrase : it->second;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

// Unit-normalised rows of the known, non-zero tokens of one phrase.
struct EmbeddedPhrase {
    std::vector<std::vector<double>> units;
    std::size_t length = 0;
    bool any_known = false;
};

EmbeddedPhrase embed(const Phrase& p, const EmbeddingTable& emb) {
    EmbeddedPhrase out;
    out.length = p.size();
    for (const auto& t : p.tokens()) {
        const auto* v = emb.find(t);
        if (!v) continue;
        out.any_known = true;
        double norm = std::sqrt(std::inner_product(v->begin(), v->end(), v->begin(), 0.0));
        if (norm == 0.0) continue;
        std::vector<double> unit(*v);
        for (double& x : unit) x /= norm;
        out.units.push_back(std::move(unit));
    }
    return out;
}

double embedded_fine(const EmbeddedPhrase& a, const EmbeddedPhrase& b) {
    double sum = 0.0;
    for (const auto& ua : a.units) {
        for (const auto& ub : b.units) sum += std::inner_product(ua.begin(), ua.end(), ub.begin(), 0.0);
    }
    return sum / static_cast<double>(a.length + b.length);
}

}  // namespace

FineSimilarity fine_similarity(const Phrase& a, const Phrase& b, const EmbeddingTable& emb) {
    EmbeddedPhrase ea = embed(a, emb), eb = embed(b, emb);
    if (!ea.any_known || !eb.any_known) return {0.0, true};
    return {embedded_fine(ea, eb), false};
}

CanonicalMap build_canonical_map(const std::vector<VocabularyEntry>& vocabulary, const EmbeddingTable& emb,
                                 const DedupOptions& options, DedupStats* stats) {
    if (vocabulary.empty()) throw std::invalid_argument("phrase vocabulary is empty");
    auto valid_threshold = [](double t) { return t > 0.0 && t <= 1.0; };
    if (!valid_threshold(options.coarse_threshold) || !valid_threshold(options.fine_threshold)) {
        throw std::invalid_argument("dedup thresholds must lie in (0, 1]");
    }

    // Merge repeated vocabulary entries, keeping first-seen order.
    std::vector<std::string> phrases;
    std::vector<std::size_t> freq;
    std::map<std::string, std::size_t> index_of;
    for (const auto& entry : vocabulary) {
        std::string text = Phrase(entry.phrase).text();
        auto [it, inserted] = index_of.emplace(text, phrases.size());
        if (inserted) {
            phrases.push_back(text);
            freq.push_back(entry.frequency);
        } else {
            freq[it->second] += entry.frequency;
        }
    }
    const std::size_t n = phrases.size();
    std::vector<Phrase> parsed;
    parsed.reserve(n);
    for (const auto& p : phrases) parsed.emplace_back(p);

    UnionFind uf(n);
    DedupStats local;

    // Coarse stage: only pairs sharing a token can reach a positive threshold.
    std::map<std::string, std::vector<std::size_t>> postings;
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::string> distinct(parsed[i].tokens().begin(), parsed[i].tokens().end());
        for (const auto& t : distinct) postings[t].push_back(i);
    }
    std::set<std::pair<std::size_t, std::size_t>> candidate_set;
    for (const auto& [token, ids] : postings) {
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) candidate_set.emplace(ids[a], ids[b]);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> candidates(candidate_set.begin(), candidate_set.end());
    std::vector<char> coarse_link(candidates.size(), 0);
    parallel_for(candidates.size(), options.threads, [&](std::size_t k) {
        auto [i, j] = candidates[k];
        coarse_link[k] = coarse_similarity(parsed[i], parsed[j]) >= options.coarse_threshold;
    });
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (coarse_link[k]) {
            uf.unite(candidates[k].first, candidates[k].second);
            ++local.coarse_links;
        }
    }

    // Fine stage: only phrases with at least one known token can score above zero.
    std::vector<EmbeddedPhrase> embedded;
    std::vector<std::size_t> known;
    if (emb.size() > 0) {
        embedded.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            embedded.push_back(embed(parsed[i], emb));
            if (embedded.back().any_known) known.push_back(i);
        }
    }
    std::vector<std::vector<std::size_t>> fine_partners(known.size());
    parallel_for(known.size(), options.threads, [&](std::size_t a) {
        for (std::size_t b = a + 1; b < known.size(); ++b) {
            if (embedded_fine(embedded[known[a]], embedded[known[b]]) >= options.fine_threshold) {
                fine_partners[a].push_back(known[b]);
            }
        }
    });
    local.fine_pairs_compared = known.size() * (known.size() ? known.size() - 1 : 0) / 2;
    for (std::size_t a = 0; a < known.size(); ++a) {
        for (std::size_t j : fine_partners[a]) {
            uf.unite(known[a], j);
            ++local.fine_links;
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);

    std::vector<std::vector<std::string>> clusters;
    clusters.reserve(components.size());
    for (auto& [root, members] : components) {
        std::size_t rep = *std::min_element(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (freq[a] != freq[b]) return freq[a] > freq[b];
            return phrases[a] < phrases[b];
        });
        std::vector<std::string> cluster{phrases[rep]};
        std::vector<std::string> rest;
        for (std::size_t m : members) {
            if (m != rep) rest.push_back(phrases[m]);
        }
        std::sort(rest.begin(), rest.end());
        cluster.insert(cluster.end(), rest.begin(), rest.end());
        clusters.push_back(std::move(cluster));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    if (stats) *stats = local;
    return CanonicalMap(std::move(clusters));
}

Corpus apply_canonical_map(const Corpus& corpus, const CanonicalMap& map) {
    std::vector<TripleRecord> out;
    std::set<std::tuple<int, std::string, std::string, std::string>> seen;
    for (const auto& r : corpus.records()) {
        TripleRecord mapped = r;
        mapped.head = map.lookup(r.head);
        mapped.relation = map.lookup(r.relation);
        mapped.tail = map.lookup(r.tail);
        if (seen.emplace(mapped.day, mapped.head, mapped.relation, mapped.tail).second) {
            out.push_back(std::move(mapped));
        }
    }
    return Corpus(std::move(out), corpus.start_date(), corpus.horizon());
}

void write_canonical_map_csv(std::ostream& out, const CanonicalMap& map) {
    out << "phrase,representative\n";
    for (const auto& [phrase, rep] : map.representatives()) csv::write_row(out, {phrase, rep});
}

CanonicalMap read_canonical_map_csv(std::istream& in) {
    csv::Table table = csv::read(in, {"phrase", "representative"});
    std::map<std::string, std::string> rep_of;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        std::string phrase = normalize_phrase(table.rows[k][0]);
        std::string rep = normalize_phrase(table.rows[k][1]);
        if (phrase.empty() || rep.empty()) throw ParseError("empty phrase in canonical map", table.line_numbers[k]);
        auto [it, inserted] = rep_of.emplace(phrase, rep);
        if (!inserted && it->second != rep) {
            throw ParseError("phrase '" + phrase + "' mapped twice", table.line_numbers[k]);
        }
    }
    std::map<std::string, std::set<std::string>> members;
    for (const auto& [phrase, rep] : rep_of) {
        auto self = rep_of.find(rep);
        if (self != rep_of.end() && self->second != rep) {
            throw ParseError("representative '" + rep + "' is itself mapped to '" + self->second + "'");
        }
        members[rep].insert(phrase);
    }
    std::vector<std::vector<std::string>> clusters;
    for (auto& [rep, set] : members) {
        std::vector<std::string> cluster{rep};
        for (const auto& m : set) {
            if (m != rep) cluster.push_back(m);
        }
        clusters.push_back(std::move(cluster));
    }
    return CanonicalMap(std::move(clusters));
}

CanonicalMap read_canonical_map_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_canonical_map_csv(in);
}

}  // namespace newsflow
