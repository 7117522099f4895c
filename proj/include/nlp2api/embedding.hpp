#pragma once
// Skip-gram word embeddings with negative sampling, learned over the
// preprocessed Q&A corpus, plus query-API semantic proximity (maximum
// cosine between a class vector and any query keyword vector).

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nlp2api/corpus.hpp"
#include "nlp2api/extract.hpp"

namespace nlp2api {

struct SkipgramConfig {
    int dim = 100;
    int window = 5;
    int min_count = 5;
    int epochs = 5;
    int negatives = 5;
    double learning_rate = 0.025;  // linear decay
    std::uint64_t seed = 1;
};

class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(int dim, int min_count, int window);

    int dim() const { return dim_; }
    int min_count() const { return min_count_; }
    int window() const { return window_; }
    std::size_t vocab_size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

    bool contains(const std::string& token) const;
    // nullptr when out of vocabulary.
    const std::vector<float>* vector_of(const std::string& token) const;

    void add(const std::string& token, std::vector<float> vector);
    std::vector<float>& mutable_vector(std::size_t index) { return vectors_[index]; }

private:
    int dim_ = 0;
    int min_count_ = 0;
    int window_ = 0;
    std::vector<std::string> words_;
    std::vector<std::vector<float>> vectors_;
    std::unordered_map<std::string, std::size_t> vocab_;
};

// Single-threaded, deterministic for a fixed seed. Sentences are token
// lists (one per corpus thread). Throws "empty vocabulary" when no token
// reaches min_count.
EmbeddingModel train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramConfig& config);

// Text vector format: first line "vocab_size dim", then one line per word,
// token followed by dim decimals. Interchangeable with pre-trained files.
void save_vectors(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_vectors(const std::string& path);

double cosine(const std::vector<float>& a, const std::vector<float>& b);

// Max cosine between the class vector (name looked up lowercased, the way
// corpus text was normalized) and any query keyword vector; 0 when the
// class or every keyword is out of vocabulary.
double proximity(const EmbeddingModel& model, const ApiClass& api, const Query& query);

}  // namespace nlp2api
