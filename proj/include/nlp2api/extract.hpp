#pragma once
// Island parsing of code segments: API-class mention extraction and the
// API co-occurrence graph. A class token starts with an uppercase letter,
// is alphanumeric, and contains at least one lowercase letter; short
// all-caps names (URL, IO, ...) pass via a whitelist.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nlp2api/corpus.hpp"

namespace nlp2api {

using ApiClass = std::string;

// 2-4 letter all-caps class names accepted despite having no lowercase.
class CapsWhitelist {
public:
    CapsWhitelist();  // bundled list
    explicit CapsWhitelist(std::set<std::string> entries);

    static CapsWhitelist from_file(const std::string& path);

    bool contains(std::string_view token) const;

private:
    std::set<std::string> entries_;
};

bool is_api_class_token(std::string_view token, const CapsWhitelist& whitelist);

struct ApiSequence {
    CodeSegment segment;
    std::vector<ApiClass> classes;          // first-appearance order, consecutive duplicates collapsed
    std::map<ApiClass, int> mention_counts; // raw pre-collapse mention counts
};

ApiSequence extract_api_sequence(const CodeSegment& segment, const CapsWhitelist& whitelist);

class CoOccurrenceGraph {
public:
    void add_node(const ApiClass& node);
    void add_edge(const ApiClass& a, const ApiClass& b);  // ignores self-loops

    const std::set<ApiClass>& nodes() const { return nodes_; }
    const std::set<ApiClass>& neighbors(const ApiClass& node) const;
    bool has_edge(const ApiClass& a, const ApiClass& b) const;
    std::size_t edge_count() const;
    std::set<std::pair<ApiClass, ApiClass>> edges() const;  // pairs with first < second
    bool empty() const { return nodes_.empty(); }

    // PageRank scores, filled by weights::pagerank via apply_pagerank.
    std::map<ApiClass, double> scores;

private:
    std::set<ApiClass> nodes_;
    std::map<ApiClass, std::set<ApiClass>> adjacency_;
};

// Joins each pair of immediately adjacent distinct classes of every sequence
// with an undirected edge; edges accumulate across sequences into one simple
// graph. Nodes cover every mentioned class, edges or not.
CoOccurrenceGraph build_graph(const std::vector<ApiSequence>& sequences);

}  // namespace nlp2api
