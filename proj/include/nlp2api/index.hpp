#pragma once
// Inverted index with BM25 ranked retrieval. Plays the off-the-shelf search
// engine role twice: pseudo-relevance feedback over the Q&A corpus and code
// retrieval over the evaluation code corpus.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nlp2api {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    bool operator==(const Bm25Params&) const = default;
};

struct SearchHit {
    std::string doc_id;
    double score = 0.0;
};

struct Posting {
    std::uint32_t doc = 0;  // position in the doc table
    std::uint32_t tf = 0;
};

class InvertedIndex {
public:
    InvertedIndex() = default;

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const Bm25Params& params() const { return params_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::size_t doc_length(std::size_t doc) const { return doc_lengths_[doc]; }
    const std::vector<Posting>* postings(const std::string& token) const;
    const std::map<std::string, std::vector<Posting>>& all_postings() const { return postings_; }

    friend InvertedIndex build_index(std::vector<std::pair<std::string, std::vector<std::string>>> docs,
                                     const Bm25Params& params);
    friend InvertedIndex load_index(const std::string& path);

private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;      // sorted ascending
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;
};

// Builds from (doc_id, tokens) pairs; doc ids must be unique. Docs are kept
// sorted by id so the same content always serializes to the same bytes.
InvertedIndex build_index(std::vector<std::pair<std::string, std::vector<std::string>>> docs,
                          const Bm25Params& params = {});

// idf = ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
double bm25_idf(std::size_t doc_count, std::size_t df);

// Up to `top` hits, descending score, ties by ascending doc id. Duplicate
// query tokens are scored once. Docs matching no token are excluded.
std::vector<SearchHit> search(const InvertedIndex& index,
                              const std::vector<std::string>& query,
                              std::size_t top);

// JSON persistence with a versioned header carrying the scoring constants;
// loading a file with an unknown version or format fails.
void save_index(const InvertedIndex& index, const std::string& path);
InvertedIndex load_index(const std::string& path);

}  // namespace nlp2api
