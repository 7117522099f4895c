#pragma once
// Term weighting over pseudo-relevance-feedback code segments: TF-IDF per
// API class and API Class Rank (PageRank over the co-occurrence graph).
// Both feed the four ranked candidate lists WC_Q, WC_A, RC_Q, RC_A.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlp2api/corpus.hpp"
#include "nlp2api/extract.hpp"

namespace nlp2api {

// Document frequency of each API class, counted over corpus threads: a
// thread counts once no matter how often its code mentions the class.
struct DfTable {
    std::size_t thread_count = 0;
    std::map<ApiClass, std::uint32_t> df;

    bool operator==(const DfTable&) const = default;
};

DfTable build_df_table(const Corpus& corpus, const CapsWhitelist& whitelist);
void save_df_table(const DfTable& table, const std::string& path);
DfTable load_df_table(const std::string& path);

// (1 + ln tf) * ln(1 + n / df), natural logarithm.
double tfidf_score(double tf, double df, double n);

// TF is the raw mention count across the given segments; a class seen there
// must have df >= 1 in the table or the table is stale (throws).
std::map<ApiClass, double> tfidf_weights(const std::vector<ApiSequence>& prf_segments,
                                         const DfTable& table);

struct PageRankOptions {
    double phi = 0.85;        // damping factor
    double init = 0.25;
    double epsilon = 0.0001;  // max per-node change to stop
    int max_iter = 100;
};

// Synchronous sweeps of ACR(v) = (1-phi) + phi * sum_{u~v} ACR(u)/deg(u),
// every node starting at `init`. Undirected edges act as bidirectional
// links; isolated nodes settle at 1-phi.
std::map<ApiClass, double> pagerank(const CoOccurrenceGraph& graph,
                                    const PageRankOptions& options = {});

// Runs pagerank and stores the result in graph.scores.
void apply_pagerank(CoOccurrenceGraph& graph, const PageRankOptions& options = {});

enum class CandidateSource { WC_Q, WC_A, RC_Q, RC_A };

const char* to_string(CandidateSource source);

struct RankedCandidateList {
    CandidateSource source = CandidateSource::WC_Q;
    std::vector<std::pair<ApiClass, double>> entries;  // descending weight

    // 1-based rank of the class in this list; 0 when absent.
    std::size_t rank_of(const ApiClass& api) const;
};

// Top n by weight, ties broken by ascending class name.
RankedCandidateList top_candidates(const std::map<ApiClass, double>& weights,
                                   std::size_t n, CandidateSource source);

}  // namespace nlp2api
