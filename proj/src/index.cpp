#include "nlp2api/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace nlp2api {

namespace {
using nlohmann::json;
constexpr int kIndexVersion = 1;
constexpr const char* kIndexFormat = "nlp2api.index";
}  // namespace

const std::vector<Posting>* InvertedIndex::postings(const std::string& token) const {
    auto it = postings_.find(token);
    return it == postings_.end() ? nullptr : &it->second;
}

InvertedIndex build_index(std::vector<std::pair<std::string, std::vector<std::string>>> docs,
                          const Bm25Params& params) {
    {
        std::unordered_set<std::string> ids;
        for (const auto& [id, tokens] : docs)
            if (!ids.insert(id).second) throw std::runtime_error("duplicate doc id: " + id);
    }
    // canonical doc order, so permuted inputs build the same index
    std::sort(docs.begin(), docs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    InvertedIndex index;
    index.params_ = params;
    index.doc_ids_.reserve(docs.size());
    index.doc_lengths_.reserve(docs.size());
    std::size_t total_length = 0;
    for (std::uint32_t d = 0; d < docs.size(); ++d) {
        const auto& [id, tokens] = docs[d];
        index.doc_ids_.push_back(id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& token : tokens) ++tf[token];
        for (const auto& [token, freq] : tf) index.postings_[token].push_back({d, freq});
    }
    for (auto& [token, list] : index.postings_)
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    index.avg_doc_length_ =
        docs.empty() ? 0.0 : static_cast<double>(total_length) / static_cast<double>(docs.size());
    return index;
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
    double n = static_cast<double>(doc_count);
    double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<SearchHit> search(const InvertedIndex& index, const std::vector<std::string>& query,
                              std::size_t top) {
    if (top == 0) throw std::invalid_argument("search: top must be >= 1");
    std::unordered_map<std::uint32_t, double> scores;
    std::unordered_set<std::string> seen;  // duplicate query tokens score once
    const double k1 = index.params().k1;
    const double b = index.params().b;
    const double avg = index.avg_doc_length();
    for (const auto& token : query) {
        if (!seen.insert(token).second) continue;
        const auto* list = index.postings(token);
        if (!list) continue;
        const double idf = bm25_idf(index.doc_count(), list->size());
        for (const Posting& p : *list) {
            double tf = static_cast<double>(p.tf);
            double dl = static_cast<double>(index.doc_length(p.doc));
            double norm = avg > 0.0 ? k1 * (1.0 - b + b * dl / avg) : k1;
            scores[p.doc] += idf * (tf * (k1 + 1.0)) / (tf + norm);
        }
    }
    std::vector<SearchHit> hits;
    hits.reserve(scores.size());
    for (const auto& [doc, score] : scores) hits.push_back({index.doc_ids()[doc], score});
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > top) hits.resize(top);
    return hits;
}

void save_index(const InvertedIndex& index, const std::string& path) {
    json j;
    j["format"] = kIndexFormat;
    j["version"] = kIndexVersion;
    j["bm25"] = {{"k1", index.params().k1}, {"b", index.params().b}};
    json docs = json::array();
    for (std::size_t d = 0; d < index.doc_count(); ++d)
        docs.push_back({index.doc_ids()[d], index.doc_length(d)});
    j["docs"] = std::move(docs);
    // docs are id-sorted and tokens iterate in map order, so identical
    // content always writes identical bytes
    json postings = json::object();
    for (const auto& [token, list] : index.all_postings()) {
        json entries = json::array();
        for (const Posting& p : list) entries.push_back({p.doc, p.tf});
        postings[token] = std::move(entries);
    }
    j["postings"] = std::move(postings);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write index: " + path);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

InvertedIndex load_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open index: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad index file " + path + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kIndexFormat)
        throw std::runtime_error("not an index file: " + path);
    if (j.value("version", -1) != kIndexVersion)
        throw std::runtime_error("unsupported index version in " + path);
    InvertedIndex index;
    index.params_.k1 = j.at("bm25").at("k1").get<double>();
    index.params_.b = j.at("bm25").at("b").get<double>();
    std::size_t total_length = 0;
    for (const auto& doc : j.at("docs")) {
        index.doc_ids_.push_back(doc.at(0).get<std::string>());
        index.doc_lengths_.push_back(doc.at(1).get<std::uint32_t>());
        total_length += index.doc_lengths_.back();
    }
    for (auto it = j.at("postings").begin(); it != j.at("postings").end(); ++it) {
        auto& list = index.postings_[it.key()];
        for (const auto& entry : it.value())
            list.push_back({entry.at(0).get<std::uint32_t>(), entry.at(1).get<std::uint32_t>()});
    }
    index.avg_doc_length_ = index.doc_ids_.empty()
                                ? 0.0
                                : static_cast<double>(total_length) /
                                      static_cast<double>(index.doc_ids_.size());
    return index;
}

}  // namespace nlp2api
