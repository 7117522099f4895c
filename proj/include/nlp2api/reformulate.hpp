#pragma once
// The end-to-end reformulation pipeline: PRF over the Q&A index, the four
// candidate lists, Borda fusion plus semantic proximity, min-max normalized
// linear combination, top-K API classes appended to the query.

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlp2api/corpus.hpp"
#include "nlp2api/embedding.hpp"
#include "nlp2api/extract.hpp"
#include "nlp2api/index.hpp"
#include "nlp2api/weights.hpp"

namespace nlp2api {

struct NoFeedbackError : std::runtime_error {
    NoFeedbackError() : std::runtime_error("no feedback documents") {}
};

struct CandidateScore {
    ApiClass api;
    double borda = 0.0;           // S_B, >= 0
    double proximity = 0.0;       // S_P, in [-1, 1]
    double norm_borda = 0.0;      // min-max over the candidate set, in [0, 1]
    double norm_proximity = 0.0;
    double total = 0.0;           // norm_borda + norm_proximity, in [0, 2]
};

struct ReformulatedQuery {
    Query base;
    std::vector<ApiClass> suggested;        // distinct, length <= k
    std::vector<std::string> full_tokens;   // base keywords then class names

    std::string full_text() const;          // full_tokens joined by spaces
};

using CandidateLists = std::array<RankedCandidateList, 4>;

// S_B(A) = sum over lists of 1 - rank(A, RL)/|RL|; lists not containing the
// class, and empty lists, contribute 0. Ranks are 1-based.
double borda_score(const ApiClass& api, const CandidateLists& lists);

// Normalization + combination core: min-max normalizes both raw columns over
// the candidate set, sums them, sorts descending with lexicographic
// tie-break. When a column's max equals its min (including the
// single-candidate case) every normalized value is 1.0.
std::vector<CandidateScore> rank_scored_candidates(std::vector<CandidateScore> candidates);

// Candidates are the union of classes across the four lists.
std::vector<CandidateScore> rank_candidates(const CandidateLists& lists,
                                            const EmbeddingModel& model,
                                            const Query& query);

struct EngineParams {
    std::size_t m = 35;  // PRF size
    std::size_t n = 16;  // candidate list size
    std::size_t k = 10;  // suggestion count
    PageRankOptions pagerank;
};

// Immutable after construction; reformulate calls are concurrency-safe.
class Engine {
public:
    Engine(Corpus corpus, InvertedIndex qa_index, DfTable df, EmbeddingModel model,
           CapsWhitelist whitelist, TokenFilter filter, EngineParams params);

    // Question-side and answer-side code segments of the top-m threads.
    // Throws NoFeedbackError when the query hits nothing.
    std::pair<std::vector<CodeSegment>, std::vector<CodeSegment>>
    collect_prf(const Query& query, std::size_t m) const;

    CandidateLists candidate_lists(const std::vector<CodeSegment>& question_segments,
                                   const std::vector<CodeSegment>& answer_segments,
                                   std::size_t n) const;

    ReformulatedQuery reformulate(const Query& query) const;
    ReformulatedQuery reformulate(const Query& query, std::size_t k, std::size_t m,
                                  std::size_t n) const;

    // Same pipeline, also returning the full scored candidate ranking.
    std::pair<ReformulatedQuery, std::vector<CandidateScore>>
    reformulate_scored(const Query& query, std::size_t k, std::size_t m, std::size_t n) const;

    Query preprocess_query(std::string_view raw) const;

    const EngineParams& params() const { return params_; }
    const TokenFilter& filter() const { return filter_; }
    const EmbeddingModel& model() const { return model_; }
    const InvertedIndex& qa_index() const { return qa_index_; }
    const Corpus& corpus() const { return corpus_; }

private:
    Corpus corpus_;
    InvertedIndex qa_index_;
    DfTable df_;
    EmbeddingModel model_;
    CapsWhitelist whitelist_;
    TokenFilter filter_;
    EngineParams params_;
};

}  // namespace nlp2api
