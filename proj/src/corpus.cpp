#include "nlp2api/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nlp2api {

namespace {

using nlohmann::json;

std::string to_lower_copy(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool starts_with_tag(std::string_view body, std::size_t pos, std::string_view tag) {
    if (pos + tag.size() > body.size()) return false;
    for (std::size_t i = 0; i < tag.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(body[pos + i])) != tag[i]) return false;
    }
    char next = pos + tag.size() < body.size() ? body[pos + tag.size()] : '\0';
    return next == '>' || next == ' ' || next == '\t' || next == '\n';
}

// position just past the '>' closing the tag that starts at pos, or npos
std::size_t tag_content_start(std::string_view body, std::size_t pos) {
    std::size_t close = body.find('>', pos);
    return close == std::string_view::npos ? std::string_view::npos : close + 1;
}

std::size_t find_closing(std::string_view body, std::size_t from, std::string_view closing) {
    for (std::size_t i = from; i + closing.size() <= body.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < closing.size(); ++j) {
            if (std::tolower(static_cast<unsigned char>(body[i + j])) != closing[j]) {
                match = false;
                break;
            }
        }
        if (match) return i;
    }
    return std::string_view::npos;
}

}  // namespace

Query make_query(std::string_view raw, const TokenFilter& filter,
                 std::optional<std::int64_t> id) {
    Query q;
    q.id = id;
    q.raw = std::string(raw);
    q.keywords = dedupe_keep_order(preprocess(raw, filter));
    return q;
}

Corpus::Corpus(std::vector<QAThread> threads) : threads_(std::move(threads)) {
    for (std::size_t i = 0; i < threads_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(threads_[i].id, i);
        if (!inserted)
            throw std::runtime_error("duplicate thread id in corpus: " +
                                     std::to_string(threads_[i].id));
    }
}

const QAThread* Corpus::find(std::int64_t id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &threads_[it->second];
}

std::vector<std::string> extract_code_regions(std::string_view body) {
    std::vector<std::string> regions;
    std::size_t i = 0;
    const std::size_t n = body.size();
    auto push_region = [&](std::string_view inner, bool markup) {
        std::string text = markup ? strip_html(inner) : std::string(inner);
        text = trim(text);
        if (!text.empty()) regions.push_back(std::move(text));
    };
    while (i < n) {
        if (body[i] == '<' && starts_with_tag(body, i, "<pre")) {
            std::size_t start = tag_content_start(body, i);
            if (start == std::string_view::npos) break;
            std::size_t end = find_closing(body, start, "</pre>");
            if (end == std::string_view::npos) end = n;
            push_region(body.substr(start, end - start), true);
            i = end == n ? n : end + 6;
            continue;
        }
        if (body[i] == '<' && starts_with_tag(body, i, "<code")) {
            std::size_t start = tag_content_start(body, i);
            if (start == std::string_view::npos) break;
            std::size_t end = find_closing(body, start, "</code>");
            if (end == std::string_view::npos) end = n;
            push_region(body.substr(start, end - start), true);
            i = end == n ? n : end + 7;
            continue;
        }
        if (body.substr(i, 3) == "```") {
            std::size_t start = i + 3;
            std::size_t eol = body.find('\n', start);
            std::size_t end = body.find("```", start);
            if (end == std::string_view::npos) break;
            // skip the info string of a multi-line fence
            if (eol != std::string_view::npos && eol < end) start = eol + 1;
            push_region(body.substr(start, end - start), false);
            i = end + 3;
            continue;
        }
        ++i;
    }
    return regions;
}

Corpus ingest_threads(std::istream& in, const IngestPolicy& policy,
                      const TokenFilter& filter, IngestReport& report,
                      const std::function<void(const std::string&)>& warn) {
    if (!in) throw std::runtime_error("unreadable thread source");
    std::vector<QAThread> threads;
    std::set<std::int64_t> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    auto reject_malformed = [&](const std::string& why) {
        ++report.rejected;
        ++report.rejected_malformed;
        if (warn) warn("line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            reject_malformed("not a JSON object");
            continue;
        }
        if (!record.contains("id") || !record["id"].is_number_integer() ||
            !record.contains("title") || !record["title"].is_string() ||
            !record.contains("question_html") || !record["question_html"].is_string() ||
            !record.contains("answer_html") || !record["answer_html"].is_string() ||
            !record.contains("tags") || !record["tags"].is_array() ||
            !record.contains("accepted") || !record["accepted"].is_boolean()) {
            reject_malformed("missing or mistyped field");
            continue;
        }
        QAThread thread;
        thread.id = record["id"].get<std::int64_t>();
        if (!seen_ids.insert(thread.id).second) {
            reject_malformed("duplicate thread id " + std::to_string(thread.id));
            continue;
        }
        thread.title = record["title"].get<std::string>();
        thread.question_body = record["question_html"].get<std::string>();
        thread.answer_body = record["answer_html"].get<std::string>();
        bool tags_ok = true;
        for (const auto& tag : record["tags"]) {
            if (!tag.is_string()) {
                tags_ok = false;
                break;
            }
            thread.tags.push_back(to_lower_copy(tag.get<std::string>()));
        }
        if (!tags_ok) {
            reject_malformed("non-string tag");
            continue;
        }

        if (!policy.required_tag.empty() &&
            std::find(thread.tags.begin(), thread.tags.end(), policy.required_tag) ==
                thread.tags.end()) {
            ++report.rejected;
            ++report.rejected_tag;
            continue;
        }
        if (policy.require_accepted && !record["accepted"].get<bool>()) {
            ++report.rejected;
            ++report.rejected_not_accepted;
            continue;
        }
        for (auto& raw : extract_code_regions(thread.question_body))
            thread.question_code.push_back({thread.id, Side::Question, std::move(raw)});
        for (auto& raw : extract_code_regions(thread.answer_body))
            thread.answer_code.push_back({thread.id, Side::Answer, std::move(raw)});
        if (policy.require_code && thread.question_code.empty() && thread.answer_code.empty()) {
            ++report.rejected;
            ++report.rejected_no_code;
            continue;
        }

        thread.preprocessed_text = preprocess(thread.title, filter);
        for (auto& tok : preprocess(strip_html(thread.question_body), filter))
            thread.preprocessed_text.push_back(std::move(tok));
        for (auto& tok : preprocess(strip_html(thread.answer_body), filter))
            thread.preprocessed_text.push_back(std::move(tok));

        ++report.accepted;
        threads.push_back(std::move(thread));
    }
    return Corpus(std::move(threads));
}

Corpus ingest_threads_file(const std::string& path, const IngestPolicy& policy,
                           const TokenFilter& filter, IngestReport& report,
                           const std::function<void(const std::string&)>& warn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open thread source: " + path);
    return ingest_threads(in, policy, filter, report, warn);
}

namespace {

json thread_to_json(const QAThread& t) {
    json j;
    j["id"] = t.id;
    j["title"] = t.title;
    j["question_body"] = t.question_body;
    j["answer_body"] = t.answer_body;
    j["tags"] = t.tags;
    json qc = json::array();
    for (const auto& seg : t.question_code) qc.push_back(seg.raw_text);
    j["question_code"] = std::move(qc);
    json ac = json::array();
    for (const auto& seg : t.answer_code) ac.push_back(seg.raw_text);
    j["answer_code"] = std::move(ac);
    j["preprocessed_text"] = t.preprocessed_text;
    return j;
}

QAThread thread_from_json(const json& j) {
    QAThread t;
    t.id = j.at("id").get<std::int64_t>();
    t.title = j.at("title").get<std::string>();
    t.question_body = j.at("question_body").get<std::string>();
    t.answer_body = j.at("answer_body").get<std::string>();
    t.tags = j.at("tags").get<std::vector<std::string>>();
    for (const auto& raw : j.at("question_code"))
        t.question_code.push_back({t.id, Side::Question, raw.get<std::string>()});
    for (const auto& raw : j.at("answer_code"))
        t.answer_code.push_back({t.id, Side::Answer, raw.get<std::string>()});
    t.preprocessed_text = j.at("preprocessed_text").get<std::vector<std::string>>();
    return t;
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus: " + path);
    for (const auto& thread : corpus.threads()) out << thread_to_json(thread).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path);
    std::vector<QAThread> threads;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            threads.push_back(thread_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad corpus record: " + e.what());
        }
    }
    return Corpus(std::move(threads));
}

}  // namespace nlp2api
