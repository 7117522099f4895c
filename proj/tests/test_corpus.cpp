#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "nlp2api/corpus.hpp"

using namespace nlp2api;

namespace {

const char* kGoodThread =
    R"({"id":1,"title":"Read a file","question_html":"<p>How?</p><pre><code>File f;</code></pre>","answer_html":"<p>Like this.</p><code>FileReader r;</code>","tags":["Java","io"],"accepted":true})";

Corpus ingest_string(const std::string& text, IngestReport& report,
                     IngestPolicy policy = {}) {
    TokenFilter filter;
    std::istringstream in(text);
    return ingest_threads(in, policy, filter, report);
}

}  // namespace

TEST_CASE("thread passing all filters is accepted") {
    IngestReport report;
    Corpus corpus = ingest_string(kGoodThread, report);
    REQUIRE(corpus.size() == 1);
    CHECK(report.accepted == 1);
    CHECK(report.rejected == 0);
    const QAThread& t = corpus.threads()[0];
    CHECK(t.id == 1);
    CHECK(t.question_code.size() == 1);
    CHECK(t.question_code[0].raw_text == "File f;");
    CHECK(t.question_code[0].side == Side::Question);
    CHECK(t.answer_code.size() == 1);
    CHECK(t.answer_code[0].raw_text == "FileReader r;");
    CHECK(t.tags == std::vector<std::string>{"java", "io"});  // lowercased
}

TEST_CASE("thread without an accepted answer is rejected") {
    std::string line =
        R"({"id":2,"title":"t","question_html":"<code>x();</code>","answer_html":"<code>y();</code>","tags":["java"],"accepted":false})";
    IngestReport report;
    Corpus corpus = ingest_string(line, report);
    CHECK(corpus.empty());
    CHECK(report.rejected == 1);
    CHECK(report.rejected_not_accepted == 1);
}

TEST_CASE("thread with no code on either side is rejected") {
    std::string line =
        R"({"id":3,"title":"t","question_html":"<p>prose only</p>","answer_html":"<p>more prose</p>","tags":["java"],"accepted":true})";
    IngestReport report;
    Corpus corpus = ingest_string(line, report);
    CHECK(corpus.empty());
    CHECK(report.rejected_no_code == 1);
}

TEST_CASE("code on one side only is enough") {
    std::string line =
        R"({"id":4,"title":"t","question_html":"<p>prose</p>","answer_html":"<pre><code>int a;</code></pre>","tags":["java"],"accepted":true})";
    IngestReport report;
    Corpus corpus = ingest_string(line, report);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.threads()[0].question_code.empty());
    CHECK(corpus.threads()[0].answer_code.size() == 1);
}

TEST_CASE("wrong tag is rejected, empty required tag disables the filter") {
    std::string line =
        R"({"id":5,"title":"t","question_html":"<code>x</code>","answer_html":"<code>y</code>","tags":["python"],"accepted":true})";
    IngestReport report;
    CHECK(ingest_string(line, report).empty());
    CHECK(report.rejected_tag == 1);

    IngestReport report2;
    IngestPolicy open_policy;
    open_policy.required_tag = "";
    CHECK(ingest_string(line, report2, open_policy).size() == 1);
}

TEST_CASE("malformed records are skipped with a warning") {
    std::string text = std::string("not json at all\n") + kGoodThread + "\n" +
                       R"({"id":"wrong type"})" + "\n";
    TokenFilter filter;
    IngestReport report;
    std::istringstream in(text);
    std::vector<std::string> warnings;
    Corpus corpus = ingest_threads(in, IngestPolicy{}, filter, report,
                                   [&](const std::string& w) { warnings.push_back(w); });
    CHECK(corpus.size() == 1);
    CHECK(report.rejected_malformed == 2);
    CHECK(warnings.size() == 2);
}

TEST_CASE("duplicate thread ids are treated as malformed") {
    std::string text = std::string(kGoodThread) + "\n" + kGoodThread + "\n";
    IngestReport report;
    Corpus corpus = ingest_string(text, report);
    CHECK(corpus.size() == 1);
    CHECK(report.rejected_malformed == 1);
}

TEST_CASE("code regions: pre, code, fences and entities") {
    auto regions = extract_code_regions(
        "<p>intro</p><pre><code>List&lt;String&gt; xs;</code></pre>"
        "text <code>inline()</code> more ```\nfenced block\n``` done");
    REQUIRE(regions.size() == 3);
    CHECK(regions[0] == "List<String> xs;");
    CHECK(regions[1] == "inline()");
    CHECK(regions[2] == "fenced block");
}

TEST_CASE("whitespace-only code regions are dropped") {
    CHECK(extract_code_regions("<code>   </code>").empty());
    CHECK(extract_code_regions("no code here").empty());
}

TEST_CASE("every accepted thread has a code segment somewhere") {
    IngestReport report;
    TokenFilter filter;
    std::ifstream in(testutil::fixture("qa_mini.jsonl"));
    Corpus corpus = ingest_threads(in, IngestPolicy{}, filter, report);
    CHECK(corpus.size() == 50);
    for (const auto& thread : corpus.threads()) {
        CHECK(thread.question_code.size() + thread.answer_code.size() >= 1);
        for (const auto& token : thread.preprocessed_text) {
            CHECK(!token.empty());
            CHECK(!filter.drops(token));
        }
    }
}

TEST_CASE("ingestion is deterministic") {
    std::string text = testutil::read_file(testutil::fixture("qa_mini.jsonl"));
    IngestReport r1, r2;
    Corpus a = ingest_string(text, r1);
    Corpus b = ingest_string(text, r2);
    CHECK(a == b);
}

TEST_CASE("corpus round trip is field-for-field identical") {
    IngestReport report;
    std::string text = testutil::read_file(testutil::fixture("threads_tiny.jsonl"));
    Corpus corpus = ingest_string(text, report);
    REQUIRE(corpus.size() == 3);

    auto dir = testutil::scratch_dir("corpus");
    auto path = (dir / "corpus.jsonl").string();
    save_corpus(corpus, path);
    Corpus loaded = load_corpus(path);
    CHECK(loaded == corpus);
}

TEST_CASE("loading a nonexistent corpus names the path") {
    try {
        load_corpus("/definitely/not/here.jsonl");
        FAIL("expected a throw");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("/definitely/not/here.jsonl") != std::string::npos);
    }
}

TEST_CASE("empty corpus saves and loads") {
    auto dir = testutil::scratch_dir("corpus_empty");
    auto path = (dir / "empty.jsonl").string();
    save_corpus(Corpus{}, path);
    CHECK(load_corpus(path).empty());
}
