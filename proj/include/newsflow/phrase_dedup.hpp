#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsflow/corpus.hpp"

namespace newsflow {

// Ordered, non-empty list of lowercase tokens.
class Phrase {
public:
    explicit Phrase(std::string_view text);
    explicit Phrase(std::vector<std::string> tokens);

    const std::vector<std::string>& tokens() const { return tokens_; }
    std::size_t size() const { return tokens_.size(); }
    std::string text() const;

private:
    std::vector<std::string> tokens_;
};

// Token-overlap similarity: multiset intersection size over the longer phrase length.
double coarse_similarity(const Phrase& a, const Phrase& b);

class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dimension = 0) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& token) const { return vectors_.count(token) > 0; }

    // Returns false (and leaves the table unchanged) if the token is already present.
    bool insert(std::string token, std::vector<double> vec);
    const std::vector<double>* find(const std::string& token) const;

    // Cosine of two stored tokens; 0 when either vector is zero.
    double cosine(const std::string& a, const std::string& b) const;

private:
    struct Entry {
        std::vector<double> vec;
        double norm = 0.0;
    };
    std::size_t dimension_;
    std::unordered_map<std::string, Entry> vectors_;
};

// Text embedding format: optional "vocab_size dimension" header, then one
// "token v1 ... vd" row per token. Duplicate tokens keep the first row.
EmbeddingTable load_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::string& path);

struct FineSimilarity {
    double value = 0.0;
    bool out_of_vocabulary = false;  // every token of one phrase was missing
};

// Sum of pairwise token cosines divided by |a| + |b|. Identical phrases of
// mutually orthogonal tokens score 0.5 under this normalization. Missing
// tokens add nothing to the sum but still count in the denominator.
FineSimilarity fine_similarity(const Phrase& a, const Phrase& b, const EmbeddingTable& emb);

struct VocabularyEntry {
    std::string phrase;
    std::size_t frequency = 0;
};

// Head, relation and tail phrases with their occurrence counts, sorted by phrase.
std::vector<VocabularyEntry> phrase_vocabulary(const Corpus& corpus);

class CanonicalMap {
public:
    CanonicalMap() = default;
    // Builds from clusters; the first member of each cluster is its representative.
    explicit CanonicalMap(std::vector<std::vector<std::string>> clusters);

    // Identity for phrases not in the map.
    const std::string& lookup(const std::string& phrase) const;
    bool contains(const std::string& phrase) const { return representative_.count(phrase) > 0; }

    const std::map<std::string, std::string>& representatives() const { return representative_; }
    const std::vector<std::vector<std::string>>& clusters() const { return clusters_; }

private:
    std::map<std::string, std::string> representative_;
    std::vector<std::vector<std::string>> clusters_;
};

struct DedupOptions {
    double coarse_threshold = 0.5;
    double fine_threshold = 0.4;
    unsigned threads = 1;
};

struct DedupStats {
    std::size_t coarse_links = 0;
    std::size_t fine_links = 0;
    std::size_t fine_pairs_compared = 0;
};

// Links pairs whose coarse similarity reaches the coarse threshold, then pairs
// whose fine similarity reaches the fine threshold; clusters are the connected
// components. Each cluster is represented by its most frequent member, ties
// broken by the lexicographically smallest phrase.
CanonicalMap build_canonical_map(const std::vector<VocabularyEntry>& vocabulary, const EmbeddingTable& emb,
                                 const DedupOptions& options = {}, DedupStats* stats = nullptr);

// Rewrites every phrase to its representative and collapses records that
// become identical (head, relation, tail) on the same day, keeping the first.
Corpus apply_canonical_map(const Corpus& corpus, const CanonicalMap& map);

void write_canonical_map_csv(std::ostream& out, const CanonicalMap& map);
CanonicalMap read_canonical_map_csv(std::istream& in);
CanonicalMap read_canonical_map_csv(const std::string& path);

}  // namespace newsflow
