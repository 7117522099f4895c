// Command-line surface of the reformulation engine: corpus building,
// indexing, embedding training, reformulation, code search and evaluation.
// Exit codes: 0 success, 1 runtime error, 2 usage/config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlp2api/config.hpp"
#include "nlp2api/corpus.hpp"
#include "nlp2api/eval.hpp"
#include "nlp2api/extract.hpp"
#include "nlp2api/index.hpp"
#include "nlp2api/reformulate.hpp"
#include "nlp2api/weights.hpp"

namespace {

using nlohmann::json;
using namespace nlp2api;

TokenFilter make_filter(const EngineConfig& config) {
    TokenFilter defaults;
    auto stop = config.stopwords.empty() ? defaults.stopwords()
                                         : TokenFilter::load_list(config.stopwords);
    auto key = config.keywords.empty() ? defaults.keywords()
                                       : TokenFilter::load_list(config.keywords);
    return TokenFilter(std::move(stop), std::move(key));
}

CapsWhitelist make_whitelist(const EngineConfig& config) {
    return config.caps_whitelist.empty() ? CapsWhitelist()
                                         : CapsWhitelist::from_file(config.caps_whitelist);
}

Engine load_engine(const EngineConfig& config) {
    EngineParams params;
    params.m = config.m;
    params.n = config.n;
    params.k = config.k;
    params.pagerank = config.pagerank;
    return Engine(load_corpus(config.corpus), load_index(config.qa_index),
                  load_df_table(config.df_table), load_vectors(config.vectors),
                  make_whitelist(config), make_filter(config), params);
}

Query parse_query_or_fail(const Engine& engine, const std::string& text) {
    Query query = engine.preprocess_query(text);
    if (query.keywords.empty()) throw std::invalid_argument("empty query");
    return query;
}

json hits_to_json(const std::vector<SearchHit>& hits) {
    json out = json::array();
    for (const auto& hit : hits) out.push_back({{"id", hit.doc_id}, {"score", hit.score}});
    return out;
}

struct SweepSpec {
    std::string parameter;
    std::vector<std::size_t> values;
};

// "m=10..45", "m=10..45:5" or "m=10,20,35"
SweepSpec parse_sweep(const std::string& spec) {
    SweepSpec sweep;
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("bad sweep \"" + spec + "\": expected name=values");
    sweep.parameter = spec.substr(0, eq);
    if (sweep.parameter != "m" && sweep.parameter != "n" && sweep.parameter != "k")
        throw std::invalid_argument("bad sweep parameter \"" + sweep.parameter + "\"");
    std::string values = spec.substr(eq + 1);
    auto to_value = [&](const std::string& s) -> std::size_t {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad sweep value \"" + s + "\"");
        return static_cast<std::size_t>(v);
    };
    std::size_t dots = values.find("..");
    if (dots != std::string::npos) {
        std::size_t step = 1;
        std::string hi_part = values.substr(dots + 2);
        std::size_t colon = hi_part.find(':');
        if (colon != std::string::npos) {
            step = to_value(hi_part.substr(colon + 1));
            hi_part.resize(colon);
        }
        std::size_t lo = to_value(values.substr(0, dots));
        std::size_t hi = to_value(hi_part);
        if (step == 0 || lo > hi)
            throw std::invalid_argument("bad sweep range \"" + values + "\"");
        for (std::size_t v = lo; v <= hi; v += step) sweep.values.push_back(v);
    } else {
        std::size_t start = 0;
        while (start <= values.size()) {
            std::size_t comma = values.find(',', start);
            std::string item = values.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) sweep.values.push_back(to_value(item));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (sweep.values.empty()) throw std::invalid_argument("empty sweep \"" + spec + "\"");
    for (std::size_t v : sweep.values)
        if (v < 1)
            throw std::invalid_argument("sweep value 0 is outside validity for " +
                                        sweep.parameter);
    return sweep;
}

int cmd_build_corpus(const std::string& in_path, const std::string& out_path,
                     const std::string& stopwords, const std::string& keywords,
                     const std::string& tag) {
    EngineConfig config;
    config.stopwords = stopwords;
    config.keywords = keywords;
    TokenFilter filter = make_filter(config);
    IngestPolicy policy;
    policy.required_tag = tag;
    IngestReport report;
    Corpus corpus = ingest_threads_file(in_path, policy, filter, report, [](const std::string& w) {
        std::cerr << "warning: " << w << '\n';
    });
    save_corpus(corpus, out_path);
    std::cout << report.accepted << " accepted, " << report.rejected << " rejected";
    if (report.rejected > 0)
        std::cout << " (tag " << report.rejected_tag << ", not accepted "
                  << report.rejected_not_accepted << ", no code " << report.rejected_no_code
                  << ", malformed " << report.rejected_malformed << ")";
    std::cout << '\n';
    return 0;
}

int cmd_index(const std::string& corpus_path, const std::string& out_path,
              std::string df_path, const std::string& caps_path, const Bm25Params& bm25) {
    Corpus corpus = load_corpus(corpus_path);
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    docs.reserve(corpus.size());
    for (const auto& thread : corpus.threads())
        docs.push_back({std::to_string(thread.id), thread.preprocessed_text});
    InvertedIndex index = build_index(std::move(docs), bm25);
    save_index(index, out_path);

    EngineConfig cfg;
    cfg.caps_whitelist = caps_path;
    DfTable table = build_df_table(corpus, make_whitelist(cfg));
    if (df_path.empty()) df_path = out_path + ".df";
    save_df_table(table, df_path);
    std::cout << "indexed " << index.doc_count() << " threads, df table: " << table.df.size()
              << " classes -> " << df_path << '\n';
    return 0;
}

int cmd_index_code(const std::string& code_path, const std::string& out_path,
                   const std::string& stopwords, const std::string& keywords,
                   const Bm25Params& bm25) {
    EngineConfig config;
    config.stopwords = stopwords;
    config.keywords = keywords;
    TokenFilter filter = make_filter(config);
    std::ifstream in(code_path);
    if (!in) throw std::runtime_error("cannot open code corpus: " + code_path);
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("id") || !j.contains("code"))
            throw std::runtime_error(code_path + ":" + std::to_string(line_no) +
                                     ": expected {id, code}");
        docs.push_back({j.at("id").get<std::string>(),
                        preprocess(j.at("code").get<std::string>(), filter)});
    }
    InvertedIndex index = build_index(std::move(docs), bm25);
    save_index(index, out_path);
    std::cout << "doc_count " << index.doc_count() << '\n';
    return 0;
}

int cmd_train_embeddings(const std::string& corpus_path, const std::string& out_path,
                         const SkipgramConfig& sg) {
    Corpus corpus = load_corpus(corpus_path);
    std::vector<std::vector<std::string>> sentences;
    sentences.reserve(corpus.size());
    for (const auto& thread : corpus.threads()) sentences.push_back(thread.preprocessed_text);
    EmbeddingModel model = train_skipgram(sentences, sg);
    save_vectors(model, out_path);
    std::cout << "trained " << model.vocab_size() << " vectors of dim " << model.dim() << '\n';
    return 0;
}

int cmd_reformulate(const EngineConfig& config, const std::string& text) {
    Engine engine = load_engine(config);
    Query query = parse_query_or_fail(engine, text);
    auto [reformulated, scored] =
        engine.reformulate_scored(query, config.k, config.m, config.n);
    json out;
    out["query"] = text;
    out["keywords"] = query.keywords;
    json suggested = json::array();
    for (const auto& api : reformulated.suggested) {
        for (const auto& candidate : scored) {
            if (candidate.api != api) continue;
            suggested.push_back({{"api", candidate.api},
                                 {"borda", candidate.borda},
                                 {"proximity", candidate.proximity},
                                 {"norm_borda", candidate.norm_borda},
                                 {"norm_proximity", candidate.norm_proximity},
                                 {"score", candidate.total}});
            break;
        }
    }
    out["suggested"] = std::move(suggested);
    out["reformulated"] = reformulated.full_text();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_search(const EngineConfig& config, const std::string& text, bool reformulate,
               std::size_t top) {
    InvertedIndex code_index = load_index(config.code_index);
    json out;
    out["query"] = text;
    if (reformulate) {
        Engine engine = load_engine(config);
        Query query = parse_query_or_fail(engine, text);
        out["results"] = hits_to_json(search(code_index, query.keywords, top));
        auto reformulated = engine.reformulate(query, config.k, config.m, config.n);
        Query full = engine.preprocess_query(reformulated.full_text());
        out["reformulated"] = {
            {"full_query", reformulated.full_text()},
            {"suggested", reformulated.suggested},
            {"results", hits_to_json(search(code_index, full.keywords, top))},
        };
    } else {
        TokenFilter filter = make_filter(config);
        Query query = make_query(text, filter);
        if (query.keywords.empty()) throw std::invalid_argument("empty query");
        out["results"] = hits_to_json(search(code_index, query.keywords, top));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_evaluate(const EngineConfig& config, const std::string& eval_path,
                 const std::string& sweep_spec,
                 const std::string& out_prefix) {
    config.validate();
    Engine engine = load_engine(config);
    std::vector<EvalRecord> records = load_eval_set(eval_path);
    const InvertedIndex* code_index = nullptr;
    InvertedIndex code_storage;
    bool needs_code = false;
    for (const auto& record : records) needs_code = needs_code || !record.gt_code.empty();
    if (needs_code) {
        if (config.code_index.empty())
            throw std::invalid_argument("missing component: code_index path not configured");
        code_storage = load_index(config.code_index);
        code_index = &code_storage;
    }
    ExperimentOptions options;
    options.m = config.m;
    options.n = config.n;
    options.k = config.k;
    options.jobs = config.jobs;

    if (!sweep_spec.empty()) {
        SweepSpec sweep = parse_sweep(sweep_spec);
        SweepResult result =
            run_sweep(engine, records, code_index, options, sweep.parameter, sweep.values);
        write_sweep_csv(result, out_prefix + ".csv");
        write_sweep_markdown(result, out_prefix + ".md");
        std::cout << "sweep over " << sweep.parameter << ": " << result.rows.size()
                  << " rows -> " << out_prefix << ".csv, " << out_prefix << ".md\n";
    } else {
        MetricReport report = run_experiment(engine, records, code_index, options);
        write_report_csv(report, out_prefix + ".csv");
        write_report_markdown(report, out_prefix + ".md");
        const MetricRow& top10 = report.by_k.at(report.ks.back());
        std::printf("%zu queries: hit@10 %.4f, mrr@10 %.4f, map@10 %.4f, mr@10 %.4f\n",
                    report.query_count, top10.hit, top10.mrr, top10.map, top10.recall);
        std::cout << "reports -> " << out_prefix << ".csv, " << out_prefix << ".md\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"query reformulation engine for code search"};
    app.require_subcommand(1);

    std::string in_path, out_path, corpus_path, config_path, query_text, eval_path;
    std::string stopwords, keywords, caps_path, df_path, sweep_spec;
    std::string out_prefix = "report";
    std::string tag = "java";
    bool with_reformulate = false;
    std::size_t top = 10;
    Bm25Params bm25;
    SkipgramConfig sg;
    std::optional<std::size_t> opt_m, opt_n, opt_k;
    std::optional<int> opt_jobs;
    std::optional<std::uint64_t> opt_seed;

    auto* build = app.add_subcommand("build-corpus", "ingest a JSON-lines thread dump");
    build->add_option("input", in_path, "threads .jsonl")->required();
    build->add_option("output", out_path, "normalized corpus path")->required();
    build->add_option("--stopwords", stopwords, "stopword list override");
    build->add_option("--keywords", keywords, "language keyword list override");
    build->add_option("--tag", tag, "required tag (empty disables the filter)");

    auto* index_cmd = app.add_subcommand("index", "index a normalized corpus + build its DF table");
    index_cmd->add_option("corpus", corpus_path, "normalized corpus")->required();
    index_cmd->add_option("output", out_path, "index path")->required();
    index_cmd->add_option("--df-out", df_path, "df table path (default: <output>.df)");
    index_cmd->add_option("--caps-whitelist", caps_path, "all-caps whitelist override");
    index_cmd->add_option("--bm25-k1", bm25.k1, "BM25 k1");
    index_cmd->add_option("--bm25-b", bm25.b, "BM25 b");

    auto* index_code = app.add_subcommand("index-code", "index a {id, code} JSON-lines corpus");
    index_code->add_option("input", in_path, "code .jsonl")->required();
    index_code->add_option("output", out_path, "index path")->required();
    index_code->add_option("--stopwords", stopwords, "stopword list override");
    index_code->add_option("--keywords", keywords, "language keyword list override");
    index_code->add_option("--bm25-k1", bm25.k1, "BM25 k1");
    index_code->add_option("--bm25-b", bm25.b, "BM25 b");

    auto* train = app.add_subcommand("train-embeddings", "train skip-gram vectors on a corpus");
    train->add_option("corpus", corpus_path, "normalized corpus")->required();
    train->add_option("output", out_path, "vector file path")->required();
    train->add_option("--dim", sg.dim, "vector size");
    train->add_option("--window", sg.window, "context window");
    train->add_option("--min-count", sg.min_count, "minimum word occurrences");
    train->add_option("--epochs", sg.epochs, "training epochs");
    train->add_option("--negatives", sg.negatives, "negative samples");
    train->add_option("--lr", sg.learning_rate, "initial learning rate");
    train->add_option("--seed", sg.seed, "RNG seed");

    auto* reform = app.add_subcommand("reformulate", "suggest API classes for a query");
    reform->add_option("--config", config_path, "engine config")->required();
    reform->add_option("query", query_text, "natural language query")->required();
    reform->add_option("--m", opt_m, "PRF size override");
    reform->add_option("--n", opt_n, "candidate list size override");
    reform->add_option("--k", opt_k, "suggestion count override");

    auto* search_cmd = app.add_subcommand("search", "ranked code search");
    search_cmd->add_option("--config", config_path, "engine config")->required();
    search_cmd->add_option("query", query_text, "natural language query")->required();
    search_cmd->add_flag("--reformulate", with_reformulate,
                         "also search with the reformulated query");
    search_cmd->add_option("--top", top, "results to print");

    auto* evaluate = app.add_subcommand("evaluate", "run the experiment harness");
    evaluate->add_option("--config", config_path, "engine config")->required();
    evaluate->add_option("eval", eval_path, "eval set .jsonl")->required();
    evaluate->add_option("--sweep", sweep_spec, "m=lo..hi[:step] | m=v1,v2,...");
    evaluate->add_option("--out", out_prefix, "report path prefix");
    evaluate->add_option("--jobs", opt_jobs, "worker threads (1 = reproducible)");
    evaluate->add_option("--m", opt_m, "PRF size override");
    evaluate->add_option("--n", opt_n, "candidate list size override");
    evaluate->add_option("--k", opt_k, "suggestion count override");
    evaluate->add_option("--seed", opt_seed, "seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return cmd_build_corpus(in_path, out_path, stopwords, keywords, tag);
        if (index_cmd->parsed()) return cmd_index(corpus_path, out_path, df_path, caps_path, bm25);
        if (index_code->parsed())
            return cmd_index_code(in_path, out_path, stopwords, keywords, bm25);
        if (train->parsed()) return cmd_train_embeddings(corpus_path, out_path, sg);

        EngineConfig config = load_config(config_path);
        if (opt_m) config.m = *opt_m;
        if (opt_n) config.n = *opt_n;
        if (opt_k) config.k = *opt_k;
        if (opt_jobs) config.jobs = *opt_jobs;
        if (opt_seed) config.seed = *opt_seed;
        if (reform->parsed()) {
            config.validate();
            return cmd_reformulate(config, query_text);
        }
        if (search_cmd->parsed()) {
            config.validate();
            return cmd_search(config, query_text, with_reformulate, top);
        }
        if (evaluate->parsed()) return cmd_evaluate(config, eval_path, sweep_spec, out_prefix);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
