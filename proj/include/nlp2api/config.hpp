#pragma once
// Engine configuration: one declarative key = value document with [section]
// headers, overridable from the command line.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "nlp2api/embedding.hpp"
#include "nlp2api/index.hpp"
#include "nlp2api/weights.hpp"

namespace nlp2api {

struct EngineConfig {
    // [paths]
    std::string corpus;
    std::string qa_index;
    std::string code_index;
    std::string vectors;
    std::string df_table;
    std::string stopwords;       // optional overrides of the bundled lists
    std::string keywords;
    std::string caps_whitelist;

    // [params]
    std::size_t m = 35;
    std::size_t n = 16;
    std::size_t k = 10;
    PageRankOptions pagerank;
    Bm25Params bm25;

    // [embedding]
    SkipgramConfig embedding;

    // [run]
    std::uint64_t seed = 1;
    int jobs = 1;

    // Throws std::invalid_argument on out-of-range values
    // (m, n >= 1; k >= 0; phi in [0,1]; jobs >= 1).
    void validate() const;
};

// Parses "key = value" lines under [section] headers; '#' and ';' start
// comments. Unknown keys are an error, naming the key.
EngineConfig load_config(const std::string& path);
EngineConfig parse_config(const std::string& text, const std::string& origin = "<config>");

}  // namespace nlp2api
