#pragma once
// Builds the engine and the code index from the bundled mini corpora.
// Shared by the harness tests and the acceptance suite.

#include <fstream>
#include <json.hpp>

#include "helpers.hpp"
#include "nlp2api/eval.hpp"
#include "nlp2api/reformulate.hpp"

namespace testutil {

inline nlp2api::SkipgramConfig fixture_embedding_config() {
    nlp2api::SkipgramConfig config;
    config.dim = 48;
    config.window = 5;
    config.min_count = 2;
    config.epochs = 20;
    config.negatives = 5;
    config.learning_rate = 0.05;
    config.seed = 7;
    return config;
}

inline nlp2api::Corpus fixture_corpus() {
    nlp2api::TokenFilter filter;
    nlp2api::IngestReport report;
    std::ifstream in(fixture("qa_mini.jsonl"));
    return nlp2api::ingest_threads(in, nlp2api::IngestPolicy{}, filter, report);
}

inline nlp2api::Engine build_fixture_engine() {
    using namespace nlp2api;
    TokenFilter filter;
    Corpus corpus = fixture_corpus();

    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    docs.reserve(corpus.size());
    for (const auto& thread : corpus.threads())
        docs.push_back({std::to_string(thread.id), thread.preprocessed_text});
    InvertedIndex qa_index = build_index(std::move(docs));

    CapsWhitelist whitelist;
    DfTable df = build_df_table(corpus, whitelist);

    std::vector<std::vector<std::string>> sentences;
    sentences.reserve(corpus.size());
    for (const auto& thread : corpus.threads()) sentences.push_back(thread.preprocessed_text);
    EmbeddingModel model = train_skipgram(sentences, fixture_embedding_config());

    EngineParams params;  // m=35, n=16, k=10
    return Engine(std::move(corpus), std::move(qa_index), std::move(df), std::move(model),
                  std::move(whitelist), std::move(filter), params);
}

inline nlp2api::InvertedIndex build_fixture_code_index() {
    using namespace nlp2api;
    TokenFilter filter;
    std::ifstream in(fixture("code_mini.jsonl"));
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        docs.push_back({j.at("id").get<std::string>(),
                        preprocess(j.at("code").get<std::string>(), filter)});
    }
    return build_index(std::move(docs));
}

}  // namespace testutil
