#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nlp2api/index.hpp"

using namespace nlp2api;

namespace {

using Docs = std::vector<std::pair<std::string, std::vector<std::string>>>;

// direct BM25 evaluation for one term over equal structures, kept separate
// from the search path on purpose
double bm25_direct(double tf, double df, double n, double dl, double avg, double k1, double b) {
    double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    return idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avg));
}

}  // namespace

TEST_CASE("postings list every document carrying the token") {
    InvertedIndex index = build_index({{"d1", {"t", "u"}}, {"d2", {"t"}}, {"d3", {"v"}}});
    REQUIRE(index.postings("t") != nullptr);
    CHECK(index.postings("t")->size() == 2);
    CHECK(index.postings("v")->size() == 1);
    CHECK(index.postings("w") == nullptr);
}

TEST_CASE("empty doc list builds an empty index") {
    InvertedIndex index = build_index({});
    CHECK(index.doc_count() == 0);
    CHECK(index.avg_doc_length() == 0.0);
    CHECK(search(index, {"x"}, 5).empty());
}

TEST_CASE("term frequencies are counted per document") {
    InvertedIndex index = build_index({{"d", {"a", "a", "b"}}});
    REQUIRE(index.postings("a") != nullptr);
    CHECK(index.postings("a")->front().tf == 2);
    CHECK(index.postings("b")->front().tf == 1);
    CHECK(index.doc_length(0) == 3);
}

TEST_CASE("duplicate doc ids are rejected") {
    CHECK_THROWS_WITH(build_index({{"d", {"a"}}, {"d", {"b"}}}),
                      doctest::Contains("duplicate doc id"));
}

TEST_CASE("a query equal to one document's tokens ranks it first") {
    InvertedIndex index = build_index(
        {{"a", {"red", "green"}}, {"b", {"blue", "cyan"}}, {"c", {"gray", "pink"}}});
    auto hits = search(index, {"blue", "cyan"}, 10);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].doc_id == "b");
}

TEST_CASE("query tokens absent everywhere yield no hits") {
    InvertedIndex index = build_index({{"a", {"x"}}});
    CHECK(search(index, {"zz"}, 3).empty());
    CHECK(search(index, {}, 3).empty());
}

TEST_CASE("single-token ranking over equal lengths is by descending tf") {
    Docs docs = {
        {"a", {"t", "t", "t", "p1"}},
        {"b", {"t", "t", "p2", "p3"}},
        {"c", {"t", "p4", "p5", "p6"}},
        {"d", {"q1", "q2", "q3", "q4"}},
        {"e", {"r1", "r2", "r3", "r4"}},
    };
    InvertedIndex index = build_index(docs);
    auto hits = search(index, {"t"}, 10);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].doc_id == "a");
    CHECK(hits[1].doc_id == "b");
    CHECK(hits[2].doc_id == "c");

    // scores match direct evaluation of the formula with the pinned constants
    for (std::size_t i = 0; i < hits.size(); ++i) {
        double tf = 3.0 - static_cast<double>(i);
        double expected = bm25_direct(tf, 3.0, 5.0, 4.0, 4.0, 1.2, 0.75);
        CHECK(hits[i].score == doctest::Approx(expected).epsilon(1e-12));
        CHECK(hits[i].score > 0.0);
        CHECK(std::isfinite(hits[i].score));
    }
}

TEST_CASE("ties break by ascending doc id and `top` truncates") {
    InvertedIndex index = build_index({{"b", {"t"}}, {"a", {"t"}}, {"c", {"t"}}});
    auto hits = search(index, {"t"}, 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].doc_id == "a");
    CHECK(hits[1].doc_id == "b");
}

TEST_CASE("duplicate query tokens score once") {
    InvertedIndex index = build_index({{"a", {"t", "x"}}, {"b", {"t", "t", "y"}}});
    auto once = search(index, {"t"}, 10);
    auto twice = search(index, {"t", "t"}, 10);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].doc_id == twice[i].doc_id);
        CHECK(once[i].score == doctest::Approx(twice[i].score).epsilon(1e-15));
    }
}

TEST_CASE("rankings survive permutation of the build input") {
    std::mt19937 rng(3);
    Docs docs;
    const std::string vocab[] = {"ant", "bee", "cat", "dog", "eel", "fox"};
    for (int d = 0; d < 12; ++d) {
        std::vector<std::string> tokens;
        int len = 2 + static_cast<int>(rng() % 6);
        for (int i = 0; i < len; ++i) tokens.push_back(vocab[rng() % std::size(vocab)]);
        docs.push_back({"doc" + std::to_string(d), tokens});
    }
    InvertedIndex base = build_index(docs);
    std::shuffle(docs.begin(), docs.end(), rng);
    InvertedIndex shuffled = build_index(docs);

    for (const auto& token : vocab) {
        auto a = search(base, {token}, 12);
        auto b = search(shuffled, {token}, 12);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].doc_id == b[i].doc_id);
            CHECK(a[i].score == doctest::Approx(b[i].score).epsilon(1e-15));
        }
    }
}

TEST_CASE("index round-trips through its persistence file") {
    InvertedIndex index =
        build_index({{"a", {"t", "t", "u"}}, {"b", {"t"}}}, Bm25Params{0.9, 0.4});
    auto dir = testutil::scratch_dir("index");
    auto path = (dir / "toy.idx").string();
    save_index(index, path);
    InvertedIndex loaded = load_index(path);
    CHECK(loaded.doc_count() == 2);
    CHECK(loaded.params().k1 == 0.9);
    CHECK(loaded.params().b == 0.4);
    auto before = search(index, {"t"}, 5);
    auto after = search(loaded, {"t"}, 5);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].doc_id == after[i].doc_id);
        CHECK(before[i].score == after[i].score);
    }

    // identical content serializes to identical bytes
    auto path2 = (dir / "toy2.idx").string();
    save_index(loaded, path2);
    CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("loading rejects wrong format and wrong version") {
    auto dir = testutil::scratch_dir("index_bad");
    auto fake = (dir / "fake.idx").string();
    testutil::write_file(fake, R"({"format":"something.else","version":1})");
    CHECK_THROWS_WITH(load_index(fake), doctest::Contains("not an index file"));
    testutil::write_file(
        fake, R"({"format":"nlp2api.index","version":99,"bm25":{"k1":1.2,"b":0.75}})");
    CHECK_THROWS_WITH(load_index(fake), doctest::Contains("version"));
    CHECK_THROWS_WITH(load_index((dir / "missing.idx").string()),
                      doctest::Contains("missing.idx"));
}
