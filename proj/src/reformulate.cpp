#include "nlp2api/reformulate.hpp"

#include <algorithm>
#include <cmath>

namespace nlp2api {

std::string ReformulatedQuery::full_text() const {
    std::string out;
    for (const auto& token : full_tokens) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

double borda_score(const ApiClass& api, const CandidateLists& lists) {
    double score = 0.0;
    for (const auto& list : lists) {
        if (list.entries.empty()) continue;
        std::size_t rank = list.rank_of(api);
        if (rank == 0) continue;
        score += 1.0 - static_cast<double>(rank) / static_cast<double>(list.entries.size());
    }
    return score;
}

std::vector<CandidateScore> rank_scored_candidates(std::vector<CandidateScore> candidates) {
    if (candidates.empty()) return candidates;
    auto normalize = [&](auto raw_of, auto norm_of) {
        double lo = raw_of(candidates.front());
        double hi = lo;
        for (const auto& c : candidates) {
            lo = std::min(lo, raw_of(c));
            hi = std::max(hi, raw_of(c));
        }
        for (auto& c : candidates)
            norm_of(c) = hi > lo ? (raw_of(c) - lo) / (hi - lo) : 1.0;
    };
    normalize([](const CandidateScore& c) { return c.borda; },
              [](CandidateScore& c) -> double& { return c.norm_borda; });
    normalize([](const CandidateScore& c) { return c.proximity; },
              [](CandidateScore& c) -> double& { return c.norm_proximity; });
    for (auto& c : candidates) c.total = c.norm_borda + c.norm_proximity;
    std::sort(candidates.begin(), candidates.end(),
              [](const CandidateScore& a, const CandidateScore& b) {
                  if (a.total != b.total) return a.total > b.total;
                  return a.api < b.api;
              });
    return candidates;
}

std::vector<CandidateScore> rank_candidates(const CandidateLists& lists,
                                            const EmbeddingModel& model, const Query& query) {
    std::set<ApiClass> candidates;
    for (const auto& list : lists)
        for (const auto& [api, weight] : list.entries) candidates.insert(api);
    std::vector<CandidateScore> scored;
    scored.reserve(candidates.size());
    for (const auto& api : candidates) {
        CandidateScore c;
        c.api = api;
        c.borda = borda_score(api, lists);
        c.proximity = proximity(model, api, query);
        scored.push_back(std::move(c));
    }
    return rank_scored_candidates(std::move(scored));
}

Engine::Engine(Corpus corpus, InvertedIndex qa_index, DfTable df, EmbeddingModel model,
               CapsWhitelist whitelist, TokenFilter filter, EngineParams params)
    : corpus_(std::move(corpus)),
      qa_index_(std::move(qa_index)),
      df_(std::move(df)),
      model_(std::move(model)),
      whitelist_(std::move(whitelist)),
      filter_(std::move(filter)),
      params_(params) {}

Query Engine::preprocess_query(std::string_view raw) const { return make_query(raw, filter_); }

std::pair<std::vector<CodeSegment>, std::vector<CodeSegment>>
Engine::collect_prf(const Query& query, std::size_t m) const {
    auto hits = search(qa_index_, query.keywords, m);
    if (hits.empty()) throw NoFeedbackError();
    std::vector<CodeSegment> question_segments;
    std::vector<CodeSegment> answer_segments;
    for (const auto& hit : hits) {
        const QAThread* thread = nullptr;
        try {
            thread = corpus_.find(std::stoll(hit.doc_id));
        } catch (const std::exception&) {
            thread = nullptr;
        }
        if (!thread)
            throw std::runtime_error("qa index references thread " + hit.doc_id +
                                     " missing from the corpus");
        question_segments.insert(question_segments.end(), thread->question_code.begin(),
                                 thread->question_code.end());
        answer_segments.insert(answer_segments.end(), thread->answer_code.begin(),
                               thread->answer_code.end());
    }
    return {std::move(question_segments), std::move(answer_segments)};
}

CandidateLists Engine::candidate_lists(const std::vector<CodeSegment>& question_segments,
                                       const std::vector<CodeSegment>& answer_segments,
                                       std::size_t n) const {
    auto sequences_of = [&](const std::vector<CodeSegment>& segments) {
        std::vector<ApiSequence> sequences;
        sequences.reserve(segments.size());
        for (const auto& segment : segments)
            sequences.push_back(extract_api_sequence(segment, whitelist_));
        return sequences;
    };
    auto question_sequences = sequences_of(question_segments);
    auto answer_sequences = sequences_of(answer_segments);

    auto question_graph = build_graph(question_sequences);
    auto answer_graph = build_graph(answer_sequences);

    return {
        top_candidates(tfidf_weights(question_sequences, df_), n, CandidateSource::WC_Q),
        top_candidates(tfidf_weights(answer_sequences, df_), n, CandidateSource::WC_A),
        top_candidates(pagerank(question_graph, params_.pagerank), n, CandidateSource::RC_Q),
        top_candidates(pagerank(answer_graph, params_.pagerank), n, CandidateSource::RC_A),
    };
}

ReformulatedQuery Engine::reformulate(const Query& query) const {
    return reformulate(query, params_.k, params_.m, params_.n);
}

ReformulatedQuery Engine::reformulate(const Query& query, std::size_t k, std::size_t m,
                                      std::size_t n) const {
    return reformulate_scored(query, k, m, n).first;
}

std::pair<ReformulatedQuery, std::vector<CandidateScore>>
Engine::reformulate_scored(const Query& query, std::size_t k, std::size_t m,
                           std::size_t n) const {
    auto [question_segments, answer_segments] = collect_prf(query, m);
    auto lists = candidate_lists(question_segments, answer_segments, n);
    auto scored = rank_candidates(lists, model_, query);

    ReformulatedQuery result;
    result.base = query;
    for (const auto& candidate : scored) {
        if (result.suggested.size() >= k) break;
        result.suggested.push_back(candidate.api);
    }
    result.full_tokens = query.keywords;
    result.full_tokens.insert(result.full_tokens.end(), result.suggested.begin(),
                              result.suggested.end());
    return {std::move(result), std::move(scored)};
}

}  // namespace nlp2api
