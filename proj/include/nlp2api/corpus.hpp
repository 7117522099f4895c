#pragma once
// Q&A corpus ingestion and persistence. Input is JSON-lines, one thread per
// line: {id, title, question_html, answer_html, tags, accepted}. A thread is
// kept only if it carries the required tag, its answer was accepted, and at
// least one side contains a code region. Code regions are <code>/<pre> spans
// or ``` fenced blocks; everything else is prose.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlp2api/text.hpp"

namespace nlp2api {

enum class Side { Question, Answer };

struct CodeSegment {
    std::int64_t thread_id = 0;
    Side side = Side::Question;
    std::string raw_text;  // verbatim, non-empty after trimming

    bool operator==(const CodeSegment&) const = default;
};

struct QAThread {
    std::int64_t id = 0;
    std::string title;
    std::string question_body;  // raw HTML/text
    std::string answer_body;    // accepted answer, raw HTML/text
    std::vector<CodeSegment> question_code;
    std::vector<CodeSegment> answer_code;
    std::vector<std::string> tags;                // lowercase
    std::vector<std::string> preprocessed_text;   // title + both bodies

    bool operator==(const QAThread&) const = default;
};

struct Query {
    std::optional<std::int64_t> id;
    std::string raw;
    std::vector<std::string> keywords;  // preprocessed, first-occurrence order
};

Query make_query(std::string_view raw, const TokenFilter& filter,
                 std::optional<std::int64_t> id = std::nullopt);

struct IngestPolicy {
    std::string required_tag = "java";  // empty disables the tag filter
    bool require_accepted = true;
    bool require_code = true;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rejected_malformed = 0;
    std::size_t rejected_tag = 0;
    std::size_t rejected_not_accepted = 0;
    std::size_t rejected_no_code = 0;
};

class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<QAThread> threads);

    const std::vector<QAThread>& threads() const { return threads_; }
    std::size_t size() const { return threads_.size(); }
    bool empty() const { return threads_.empty(); }

    // Lookup by thread id; nullptr when absent.
    const QAThread* find(std::int64_t id) const;

    bool operator==(const Corpus&) const = default;

private:
    std::vector<QAThread> threads_;
    std::map<std::int64_t, std::size_t> by_id_;
};

// Verbatim code regions of one body, in text order.
std::vector<std::string> extract_code_regions(std::string_view body);

// Reads JSON-lines records from `in`; malformed records are skipped with a
// warning via `warn` and counted. Throws on an unreadable stream.
Corpus ingest_threads(std::istream& in, const IngestPolicy& policy,
                      const TokenFilter& filter, IngestReport& report,
                      const std::function<void(const std::string&)>& warn = {});

Corpus ingest_threads_file(const std::string& path, const IngestPolicy& policy,
                           const TokenFilter& filter, IngestReport& report,
                           const std::function<void(const std::string&)>& warn = {});

// Normalized corpus persistence, JSON-lines, round-trip identical.
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace nlp2api
