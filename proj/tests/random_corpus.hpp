#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "newsflow/corpus.hpp"
#include "newsflow/graph_engine.hpp"
#include "oracles.hpp"

// Small random corpora over a tiny node/relation alphabet so that every
// change type shows up frequently.
struct RandomCorpusCase {
    std::vector<oracle::DatedTriple> raw;
    std::vector<oracle::RawTriple> raw_seeds;
    newsflow::Corpus corpus;
    newsflow::InitialTripleSet seeds;
    int horizon;
};

inline RandomCorpusCase make_random_corpus(std::uint64_t seed, std::size_t max_triples = 50,
                                           std::size_t max_seeds = 10, int max_days = 8) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int horizon = pick(2, max_days);
    const int node_alphabet = pick(4, 12);
    const int rel_alphabet = pick(1, 4);
    const int n = pick(1, static_cast<int>(max_triples));

    std::vector<oracle::DatedTriple> raw;
    std::vector<newsflow::TripleRecord> records;
    for (int k = 0; k < n; ++k) {
        std::string h = "n" + std::to_string(pick(0, node_alphabet - 1));
        std::string r = "r" + std::to_string(pick(0, rel_alphabet - 1));
        std::string t = "n" + std::to_string(pick(0, node_alphabet - 1));
        // Day 1 always gets at least one triple so a seed exists.
        int day = k == 0 ? 1 : pick(1, horizon);
        raw.push_back({{h, r, t}, day});
        records.push_back({h, r, t, day, "src", std::to_string(k)});
    }

    std::vector<oracle::RawTriple> day_one;
    for (const auto& d : raw) {
        if (d.day == 1 && std::find(day_one.begin(), day_one.end(), d.triple) == day_one.end()) {
            day_one.push_back(d.triple);
        }
    }
    std::shuffle(day_one.begin(), day_one.end(), rng);
    day_one.resize(std::min<std::size_t>(day_one.size(), static_cast<std::size_t>(pick(1, static_cast<int>(max_seeds)))));

    std::vector<newsflow::Triple> seeds;
    for (const auto& [h, r, t] : day_one) seeds.push_back({h, r, t});

    return {raw, day_one, newsflow::Corpus(records, newsflow::parse_date("2020-01-01"), horizon),
            newsflow::InitialTripleSet(seeds), horizon};
}

inline bool counts_match(const std::vector<newsflow::CountSeries>& got, const oracle::NaiveCounts& want) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
        for (int type = 0; type < 3; ++type) {
            for (std::size_t d = 0; d < want[i][type].size(); ++d) {
                if (got[i].counts(type, static_cast<Eigen::Index>(d)) != want[i][type][d]) return false;
            }
        }
    }
    return true;
}
