#include "nlp2api/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nlp2api {

namespace {
using nlohmann::json;
constexpr int kDfVersion = 1;
constexpr const char* kDfFormat = "nlp2api.df";
}  // namespace

DfTable build_df_table(const Corpus& corpus, const CapsWhitelist& whitelist) {
    DfTable table;
    table.thread_count = corpus.size();
    for (const auto& thread : corpus.threads()) {
        std::set<ApiClass> mentioned;
        auto scan = [&](const std::vector<CodeSegment>& segments) {
            for (const auto& segment : segments) {
                auto sequence = extract_api_sequence(segment, whitelist);
                for (const auto& [api, count] : sequence.mention_counts) mentioned.insert(api);
            }
        };
        scan(thread.question_code);
        scan(thread.answer_code);
        for (const auto& api : mentioned) ++table.df[api];
    }
    return table;
}

void save_df_table(const DfTable& table, const std::string& path) {
    json j;
    j["format"] = kDfFormat;
    j["version"] = kDfVersion;
    j["thread_count"] = table.thread_count;
    j["df"] = table.df;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write df table: " + path);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

DfTable load_df_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open df table: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad df table " + path + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kDfFormat || j.value("version", -1) != kDfVersion)
        throw std::runtime_error("not a df table: " + path);
    DfTable table;
    table.thread_count = j.at("thread_count").get<std::size_t>();
    table.df = j.at("df").get<std::map<ApiClass, std::uint32_t>>();
    return table;
}

double tfidf_score(double tf, double df, double n) {
    return (1.0 + std::log(tf)) * std::log(1.0 + n / df);
}

std::map<ApiClass, double> tfidf_weights(const std::vector<ApiSequence>& prf_segments,
                                         const DfTable& table) {
    if (table.thread_count < 1) throw std::invalid_argument("tfidf_weights: empty corpus");
    std::map<ApiClass, std::uint64_t> tf;
    for (const auto& sequence : prf_segments)
        for (const auto& [api, count] : sequence.mention_counts) tf[api] += count;
    std::map<ApiClass, double> weights;
    for (const auto& [api, count] : tf) {
        auto it = table.df.find(api);
        if (it == table.df.end() || it->second == 0)
            throw std::runtime_error("stale df table: class " + api +
                                     " seen in feedback but has no document frequency");
        weights[api] = tfidf_score(static_cast<double>(count), static_cast<double>(it->second),
                                   static_cast<double>(table.thread_count));
    }
    return weights;
}

std::map<ApiClass, double> pagerank(const CoOccurrenceGraph& graph,
                                    const PageRankOptions& options) {
    if (options.phi < 0.0 || options.phi > 1.0)
        throw std::invalid_argument("pagerank: phi must be in [0, 1]");
    std::map<ApiClass, double> scores;
    for (const auto& node : graph.nodes()) scores[node] = options.init;
    if (scores.empty()) return scores;

    std::map<ApiClass, double> next;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        double max_change = 0.0;
        for (const auto& node : graph.nodes()) {
            double incoming = 0.0;
            for (const auto& nbr : graph.neighbors(node))
                incoming += scores[nbr] / static_cast<double>(graph.neighbors(nbr).size());
            double updated = (1.0 - options.phi) + options.phi * incoming;
            max_change = std::max(max_change, std::abs(updated - scores[node]));
            next[node] = updated;
        }
        scores.swap(next);
        if (max_change < options.epsilon) break;
    }
    return scores;
}

void apply_pagerank(CoOccurrenceGraph& graph, const PageRankOptions& options) {
    graph.scores = pagerank(graph, options);
}

const char* to_string(CandidateSource source) {
    switch (source) {
        case CandidateSource::WC_Q: return "WC_Q";
        case CandidateSource::WC_A: return "WC_A";
        case CandidateSource::RC_Q: return "RC_Q";
        case CandidateSource::RC_A: return "RC_A";
    }
    return "?";
}

std::size_t RankedCandidateList::rank_of(const ApiClass& api) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].first == api) return i + 1;
    return 0;
}

RankedCandidateList top_candidates(const std::map<ApiClass, double>& weights, std::size_t n,
                                   CandidateSource source) {
    if (n == 0) throw std::invalid_argument("top_candidates: n must be >= 1");
    RankedCandidateList list;
    list.source = source;
    list.entries.assign(weights.begin(), weights.end());
    std::sort(list.entries.begin(), list.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (list.entries.size() > n) list.entries.resize(n);
    return list;
}

}  // namespace nlp2api
