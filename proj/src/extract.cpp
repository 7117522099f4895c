#include "nlp2api/extract.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "nlp2api/builtin_wordlists.hpp"

namespace nlp2api {

CapsWhitelist::CapsWhitelist() {
    for (const char* w : detail::kCapsWhitelist) entries_.insert(w);
}

CapsWhitelist::CapsWhitelist(std::set<std::string> entries) : entries_(std::move(entries)) {}

CapsWhitelist CapsWhitelist::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open caps whitelist: " + path);
    std::set<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty() && line.front() != '#') entries.insert(line);
    }
    return CapsWhitelist(std::move(entries));
}

bool CapsWhitelist::contains(std::string_view token) const {
    return entries_.count(std::string(token)) > 0;
}

bool is_api_class_token(std::string_view token, const CapsWhitelist& whitelist) {
    if (token.empty() || !std::isupper(static_cast<unsigned char>(token.front()))) return false;
    bool has_lower = false;
    bool all_upper = true;
    for (char c : token) {
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
        if (std::islower(static_cast<unsigned char>(c))) has_lower = true;
        if (!std::isupper(static_cast<unsigned char>(c))) all_upper = false;
    }
    if (has_lower) return true;
    // short all-caps names (URL, IO, ...) via the whitelist
    return all_upper && token.size() >= 2 && token.size() <= 4 && whitelist.contains(token);
}

ApiSequence extract_api_sequence(const CodeSegment& segment, const CapsWhitelist& whitelist) {
    ApiSequence sequence;
    sequence.segment = segment;
    const std::string& text = segment.raw_text;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto is_ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (i < n) {
        if (!is_ident_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < n && is_ident_char(text[i])) ++i;
        std::string_view token(text.data() + start, i - start);
        if (!is_api_class_token(token, whitelist)) continue;
        ApiClass api(token);
        ++sequence.mention_counts[api];
        if (sequence.classes.empty() || sequence.classes.back() != api)
            sequence.classes.push_back(std::move(api));
    }
    return sequence;
}

void CoOccurrenceGraph::add_node(const ApiClass& node) {
    nodes_.insert(node);
    adjacency_.try_emplace(node);
}

void CoOccurrenceGraph::add_edge(const ApiClass& a, const ApiClass& b) {
    if (a == b) return;
    add_node(a);
    add_node(b);
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
}

const std::set<ApiClass>& CoOccurrenceGraph::neighbors(const ApiClass& node) const {
    static const std::set<ApiClass> empty;
    auto it = adjacency_.find(node);
    return it == adjacency_.end() ? empty : it->second;
}

bool CoOccurrenceGraph::has_edge(const ApiClass& a, const ApiClass& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) > 0;
}

std::size_t CoOccurrenceGraph::edge_count() const {
    std::size_t degree_sum = 0;
    for (const auto& [node, nbrs] : adjacency_) degree_sum += nbrs.size();
    return degree_sum / 2;
}

std::set<std::pair<ApiClass, ApiClass>> CoOccurrenceGraph::edges() const {
    std::set<std::pair<ApiClass, ApiClass>> out;
    for (const auto& [node, nbrs] : adjacency_)
        for (const auto& nbr : nbrs)
            out.insert(node < nbr ? std::make_pair(node, nbr) : std::make_pair(nbr, node));
    return out;
}

CoOccurrenceGraph build_graph(const std::vector<ApiSequence>& sequences) {
    CoOccurrenceGraph graph;
    for (const auto& sequence : sequences) {
        for (const auto& api : sequence.classes) graph.add_node(api);
        for (std::size_t i = 0; i + 1 < sequence.classes.size(); ++i)
            graph.add_edge(sequence.classes[i], sequence.classes[i + 1]);
    }
    return graph;
}

}  // namespace nlp2api
