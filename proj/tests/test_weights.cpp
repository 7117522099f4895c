#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nlp2api/weights.hpp"

using namespace nlp2api;

namespace {

ApiSequence sequence_with(std::map<ApiClass, int> counts) {
    ApiSequence s;
    for (const auto& [api, count] : counts) {
        s.mention_counts[api] = count;
        s.classes.push_back(api);
    }
    return s;
}

// Matrix-form power iteration: x <- (1-phi) * 1 + phi * M x, where
// M[i][j] = 1/deg(j) for j adjacent to i. Independent of the map-based sweep.
std::map<ApiClass, double> pagerank_matrix_oracle(const CoOccurrenceGraph& graph,
                                                  const PageRankOptions& options) {
    std::vector<ApiClass> nodes(graph.nodes().begin(), graph.nodes().end());
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    std::map<ApiClass, Eigen::Index> id;
    for (Eigen::Index i = 0; i < n; ++i) id[nodes[i]] = i;

    Eigen::MatrixXd link = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& nbrs = graph.neighbors(nodes[j]);
        if (nbrs.empty()) continue;
        double share = 1.0 / static_cast<double>(nbrs.size());
        for (const auto& nbr : nbrs) link(id[nbr], j) = share;
    }
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(n, options.init);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        Eigen::VectorXd next =
            Eigen::VectorXd::Constant(n, 1.0 - options.phi) + options.phi * (link * scores);
        double max_change = (next - scores).cwiseAbs().maxCoeff();
        scores = next;
        if (max_change < options.epsilon) break;
    }
    std::map<ApiClass, double> out;
    for (Eigen::Index i = 0; i < n; ++i) out[nodes[i]] = scores(i);
    return out;
}

CoOccurrenceGraph random_graph(std::mt19937& rng, int max_nodes) {
    CoOccurrenceGraph graph;
    int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
    std::vector<ApiClass> names;
    for (int i = 0; i < n; ++i) names.push_back("Node" + std::to_string(i));
    for (const auto& name : names) graph.add_node(name);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng() % 100 < 30) graph.add_edge(names[i], names[j]);
    return graph;
}

}  // namespace

TEST_CASE("tfidf formula spot values") {
    // (1 + ln 1) * ln(1 + 1000/1000) = ln 2
    CHECK(tfidf_score(1, 1000, 1000) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(tfidf_score(1, 1000, 1000) == doctest::Approx(0.6931).epsilon(1e-4));
    // df one lower nudges the weight up
    CHECK(tfidf_score(1, 999, 1000) == doctest::Approx(std::log(1.0 + 1000.0 / 999.0)).epsilon(1e-12));
    CHECK(tfidf_score(1, 999, 1000) > tfidf_score(1, 1000, 1000));
    // tf = e makes the first factor exactly 2
    CHECK(tfidf_score(std::exp(1.0), 7, 100) ==
          doctest::Approx(2.0 * std::log(1.0 + 100.0 / 7.0)).epsilon(1e-15));
}

TEST_CASE("tfidf weights sum mentions across segments") {
    DfTable table;
    table.thread_count = 1000;
    table.df = {{"Alpha", 1000}, {"Beta", 10}};
    std::vector<ApiSequence> segments{sequence_with({{"Alpha", 1}}),
                                      sequence_with({{"Beta", 2}})};
    auto weights = tfidf_weights(segments, table);
    CHECK(weights.at("Alpha") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(weights.at("Beta") ==
          doctest::Approx((1.0 + std::log(2.0)) * std::log(101.0)).epsilon(1e-12));
}

TEST_CASE("a feedback class missing from the df table is an error") {
    DfTable table;
    table.thread_count = 10;
    std::vector<ApiSequence> segments{sequence_with({{"Ghost", 1}})};
    CHECK_THROWS_WITH(tfidf_weights(segments, table), doctest::Contains("stale df table"));
    table.df = {{"Ghost", 0}};
    CHECK_THROWS(tfidf_weights(segments, table));
}

TEST_CASE("tfidf is monotone in tf and antitone in df") {
    for (double tf = 1; tf < 20; ++tf)
        CHECK(tfidf_score(tf + 1, 50, 1000) > tfidf_score(tf, 50, 1000));
    for (double df = 1; df < 20; ++df)
        CHECK(tfidf_score(5, df, 1000) > tfidf_score(5, df + 1, 1000));
}

TEST_CASE("isolated node settles at 1 - phi") {
    CoOccurrenceGraph graph;
    graph.add_node("Alone");
    auto scores = pagerank(graph);
    CHECK(std::abs(scores.at("Alone") - 0.15) < 1e-15);
}

TEST_CASE("two connected nodes converge to the symmetric fixed point") {
    CoOccurrenceGraph graph;
    graph.add_edge("Left", "Right");
    PageRankOptions tight;
    tight.epsilon = 1e-14;
    tight.max_iter = 2000;
    auto scores = pagerank(graph, tight);
    CHECK(std::abs(scores.at("Left") - 1.0) < 1e-9);
    CHECK(std::abs(scores.at("Right") - 1.0) < 1e-9);
}

TEST_CASE("empty graph yields an empty score map") {
    CHECK(pagerank(CoOccurrenceGraph{}).empty());
}

TEST_CASE("connected regular graphs score uniformly") {
    // 5-cycle: every node has degree 2
    CoOccurrenceGraph graph;
    for (int i = 0; i < 5; ++i)
        graph.add_edge("C" + std::to_string(i), "C" + std::to_string((i + 1) % 5));
    auto scores = pagerank(graph);
    for (const auto& [node, score] : scores) {
        CHECK(score == doctest::Approx(scores.at("C0")).epsilon(1e-9));
        CHECK(score >= 0.15);
    }
}

TEST_CASE("pagerank matches the matrix-form oracle on random graphs") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        CoOccurrenceGraph graph = random_graph(rng, 20);
        auto ours = pagerank(graph);
        auto oracle = pagerank_matrix_oracle(graph, PageRankOptions{});
        REQUIRE(ours.size() == oracle.size());
        for (const auto& [node, score] : ours) {
            CHECK(std::abs(score - oracle.at(node)) < 1e-6);
            CHECK(score >= 0.15 - 1e-12);
            CHECK(std::isfinite(score));
        }
    }
}

TEST_CASE("pagerank is invariant under node relabeling") {
    std::mt19937 rng(22);
    CoOccurrenceGraph graph = random_graph(rng, 12);
    auto scores = pagerank(graph);

    CoOccurrenceGraph relabeled;
    auto rename = [](const ApiClass& name) { return "Re" + name; };
    for (const auto& node : graph.nodes()) relabeled.add_node(rename(node));
    for (const auto& [a, b] : graph.edges()) relabeled.add_edge(rename(a), rename(b));
    auto scores2 = pagerank(relabeled);
    for (const auto& [node, score] : scores)
        CHECK(scores2.at(rename(node)) == doctest::Approx(score).epsilon(1e-12));
}

TEST_CASE("top_candidates truncates, orders and breaks ties") {
    std::map<ApiClass, double> weights{{"X1", 3.0}, {"Y1", 2.0}, {"Z1", 1.0}};
    auto list = top_candidates(weights, 16, CandidateSource::WC_Q);
    CHECK(list.entries.size() == 3);  // fewer candidates than n
    CHECK(list.entries[0].first == "X1");
    CHECK(list.entries[1].first == "Y1");

    auto top2 = top_candidates(weights, 2, CandidateSource::WC_A);
    REQUIRE(top2.entries.size() == 2);
    CHECK(top2.entries[0].first == "X1");
    CHECK(top2.entries[1].first == "Y1");

    std::map<ApiClass, double> tied{{"B", 1.0}, {"A", 1.0}};
    auto one = top_candidates(tied, 1, CandidateSource::RC_Q);
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].first == "A");  // lexicographic tie-break

    CHECK(list.rank_of("X1") == 1);
    CHECK(list.rank_of("Z1") == 3);
    CHECK(list.rank_of("Missing") == 0);
}

TEST_CASE("df table round-trips and counts threads once") {
    TokenFilter filter;
    IngestReport report;
    std::ifstream in(testutil::fixture("qa_mini.jsonl"));
    Corpus corpus = ingest_threads(in, IngestPolicy{}, filter, report);
    CapsWhitelist whitelist;
    DfTable table = build_df_table(corpus, whitelist);
    CHECK(table.thread_count == corpus.size());
    REQUIRE(table.df.count("BufferedImage") == 1);
    // a class never appears more often than there are threads
    for (const auto& [api, df] : table.df) {
        CHECK(df >= 1);
        CHECK(df <= table.thread_count);
    }
    // BufferedImage shows up in several image threads but not most others
    CHECK(table.df.at("BufferedImage") >= 5);
    CHECK(table.df.at("BufferedImage") <= 15);

    auto dir = testutil::scratch_dir("df");
    auto path = (dir / "table.df").string();
    save_df_table(table, path);
    CHECK(load_df_table(path) == table);
    CHECK_THROWS_WITH(load_df_table((dir / "nope.df").string()), doctest::Contains("nope.df"));
}
