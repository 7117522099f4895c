#include "nlp2api/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace nlp2api {

namespace {
using nlohmann::json;

std::string fmt(double x, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string fmt_rank(const std::optional<std::size_t>& rank) {
    return rank ? std::to_string(*rank) : std::string("not_found");
}

std::string fmt_mrd(const std::optional<double>& mrd) {
    return mrd ? fmt(*mrd, 2) : std::string("n/a");
}

}  // namespace

std::vector<EvalRecord> load_eval_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open eval set: " + path);
    std::vector<EvalRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("query"))
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad eval record");
        EvalRecord record;
        record.query_id = j.at("id").get<std::int64_t>();
        record.query = j.at("query").get<std::string>();
        if (j.contains("gt_api"))
            for (const auto& api : j.at("gt_api")) record.gt_api.insert(api.get<std::string>());
        if (j.contains("gt_code_ids"))
            for (const auto& id : j.at("gt_code_ids")) record.gt_code.insert(id.get<std::string>());
        records.push_back(std::move(record));
    }
    return records;
}

int hit_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
             std::size_t k) {
    if (k < 1) throw std::invalid_argument("hit_at_k: k must be >= 1");
    const std::size_t limit = std::min(k, results.size());
    for (std::size_t i = 0; i < limit; ++i)
        if (gt.count(results[i]) > 0) return 1;
    return 0;
}

double mrr_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
                std::size_t k) {
    if (k < 1) throw std::invalid_argument("mrr_at_k: k must be >= 1");
    const std::size_t limit = std::min(k, results.size());
    for (std::size_t i = 0; i < limit; ++i)
        if (gt.count(results[i]) > 0) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double ap_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
               std::size_t k) {
    if (k < 1) throw std::invalid_argument("ap_at_k: k must be >= 1");
    const std::size_t limit = std::min(k, results.size());
    std::size_t relevant = 0;
    double precision_sum = 0.0;
    for (std::size_t i = 0; i < limit; ++i) {
        if (gt.count(results[i]) == 0) continue;
        ++relevant;
        precision_sum += static_cast<double>(relevant) / static_cast<double>(i + 1);
    }
    return relevant == 0 ? 0.0 : precision_sum / static_cast<double>(relevant);
}

double recall_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
                   std::size_t k) {
    if (k < 1) throw std::invalid_argument("recall_at_k: k must be >= 1");
    if (gt.empty()) throw std::invalid_argument("recall_at_k: empty ground truth");
    const std::size_t limit = std::min(k, results.size());
    std::size_t found = 0;
    for (std::size_t i = 0; i < limit; ++i)
        if (gt.count(results[i]) > 0) ++found;
    return static_cast<double>(found) / static_cast<double>(gt.size());
}

std::optional<std::size_t> query_effectiveness(const std::vector<std::string>& results,
                                               const std::set<std::string>& gt_code) {
    for (std::size_t i = 0; i < results.size(); ++i)
        if (gt_code.count(results[i]) > 0) return i + 1;
    return std::nullopt;
}

QueryComparison compare_queries(const std::vector<std::optional<std::size_t>>& baseline,
                                const std::vector<std::optional<std::size_t>>& reformulated) {
    if (baseline.size() != reformulated.size())
        throw std::invalid_argument("compare_queries: length mismatch");
    QueryComparison cmp;
    double improved_sum = 0.0, worsened_sum = 0.0;
    std::size_t improved_numeric = 0, worsened_numeric = 0;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        const auto& base = baseline[i];
        const auto& ref = reformulated[i];
        if (!base && !ref) {
            ++cmp.preserved;
            continue;
        }
        // a missing rank is worse than any rank
        bool ref_better = base && ref ? *ref < *base : static_cast<bool>(ref);
        bool ref_worse = base && ref ? *ref > *base : static_cast<bool>(base);
        if (ref_better) {
            ++cmp.improved;
            if (base && ref) {
                improved_sum += static_cast<double>(*ref) - static_cast<double>(*base);
                ++improved_numeric;
            }
        } else if (ref_worse) {
            ++cmp.worsened;
            if (base && ref) {
                worsened_sum += static_cast<double>(*ref) - static_cast<double>(*base);
                ++worsened_numeric;
            }
        } else {
            ++cmp.preserved;
        }
    }
    if (improved_numeric > 0) cmp.mrd_improved = improved_sum / improved_numeric;
    if (worsened_numeric > 0) cmp.mrd_worsened = worsened_sum / worsened_numeric;
    return cmp;
}

MetricReport run_experiment(const Engine& engine, const std::vector<EvalRecord>& records,
                            const InvertedIndex* code_index, const ExperimentOptions& options) {
    if (records.empty()) throw std::invalid_argument("run_experiment: empty eval set");
    if (options.ks.empty()) throw std::invalid_argument("run_experiment: no K values");
    bool needs_code = std::any_of(records.begin(), records.end(),
                                  [](const EvalRecord& r) { return !r.gt_code.empty(); });
    if (needs_code && !code_index)
        throw std::invalid_argument("run_experiment: missing component: code index");

    const std::size_t suggest_k =
        std::max(options.k, *std::max_element(options.ks.begin(), options.ks.end()));

    std::vector<QueryOutcome> outcomes(records.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= records.size()) return;
                const EvalRecord& record = records[i];
                QueryOutcome& outcome = outcomes[i];
                outcome.query_id = record.query_id;
                Query query = engine.preprocess_query(record.query);
                if (query.keywords.empty())
                    throw std::runtime_error("query " + std::to_string(record.query_id) +
                                             " is empty after preprocessing");
                ReformulatedQuery reformulated;
                try {
                    reformulated = engine.reformulate(query, suggest_k, options.m, options.n);
                } catch (const NoFeedbackError&) {
                    // no PRF hits: keep the query in the tally with no suggestions
                    outcome.fed_back = false;
                    reformulated.base = query;
                    reformulated.full_tokens = query.keywords;
                }
                outcome.suggested = reformulated.suggested;
                if (!record.gt_code.empty() && code_index) {
                    outcome.retrieval = true;
                    // retrieval uses the configured reformulation length k,
                    // independent of the metric table's deepest cutoff
                    ReformulatedQuery retrieval_query;
                    retrieval_query.base = query;
                    for (std::size_t s = 0;
                         s < reformulated.suggested.size() && s < options.k; ++s)
                        retrieval_query.suggested.push_back(reformulated.suggested[s]);
                    retrieval_query.full_tokens = query.keywords;
                    retrieval_query.full_tokens.insert(retrieval_query.full_tokens.end(),
                                                       retrieval_query.suggested.begin(),
                                                       retrieval_query.suggested.end());
                    auto baseline_hits =
                        search(*code_index, query.keywords, code_index->doc_count());
                    auto reform_query = engine.preprocess_query(retrieval_query.full_text());
                    auto reform_hits =
                        search(*code_index, reform_query.keywords, code_index->doc_count());
                    std::vector<std::string> baseline_ids, reform_ids;
                    for (const auto& h : baseline_hits) baseline_ids.push_back(h.doc_id);
                    for (const auto& h : reform_hits) reform_ids.push_back(h.doc_id);
                    outcome.baseline_qe = query_effectiveness(baseline_ids, record.gt_code);
                    outcome.reformulated_qe = query_effectiveness(reform_ids, record.gt_code);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            cursor.store(records.size());
        }
    };
    if (options.jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < options.jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    MetricReport report;
    report.ks = options.ks;
    report.outcomes = std::move(outcomes);
    report.query_count = records.size();

    for (std::size_t i = 0; i < records.size(); ++i)
        if (!records[i].gt_api.empty()) ++report.api_query_count;

    for (std::size_t k : options.ks) {
        MetricRow row;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].gt_api.empty()) continue;
            const auto& suggested = report.outcomes[i].suggested;
            row.hit += hit_at_k(suggested, records[i].gt_api, k);
            row.mrr += mrr_at_k(suggested, records[i].gt_api, k);
            row.map += ap_at_k(suggested, records[i].gt_api, k);
            row.recall += recall_at_k(suggested, records[i].gt_api, k);
        }
        if (report.api_query_count > 0) {
            double count = static_cast<double>(report.api_query_count);
            row.hit /= count;
            row.mrr /= count;
            row.map /= count;
            row.recall /= count;
        }
        report.by_k[k] = row;
    }

    std::vector<std::optional<std::size_t>> baseline, reformulated;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].gt_code.empty()) continue;
        baseline.push_back(report.outcomes[i].baseline_qe);
        reformulated.push_back(report.outcomes[i].reformulated_qe);
    }
    report.retrieval_query_count = baseline.size();
    if (!baseline.empty()) report.comparison = compare_queries(baseline, reformulated);
    return report;
}

void write_report_csv(const MetricReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "metric";
    for (std::size_t k : report.ks) out << ",top_" << k;
    out << '\n';
    auto row = [&](const char* name, auto pick) {
        out << name;
        for (std::size_t k : report.ks) out << ',' << fmt(pick(report.by_k.at(k)));
        out << '\n';
    };
    row("top_k_accuracy", [](const MetricRow& r) { return r.hit; });
    row("mrr", [](const MetricRow& r) { return r.mrr; });
    row("map", [](const MetricRow& r) { return r.map; });
    row("mean_recall", [](const MetricRow& r) { return r.recall; });
    out << "\nquery_id,baseline_qe,reformulated_qe\n";
    for (const auto& outcome : report.outcomes) {
        if (!outcome.retrieval) continue;
        out << outcome.query_id << ',' << fmt_rank(outcome.baseline_qe) << ','
            << fmt_rank(outcome.reformulated_qe) << '\n';
    }
    out << "\nimproved,worsened,preserved,mrd_improved,mrd_worsened\n";
    out << report.comparison.improved << ',' << report.comparison.worsened << ','
        << report.comparison.preserved << ',' << fmt_mrd(report.comparison.mrd_improved) << ','
        << fmt_mrd(report.comparison.mrd_worsened) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_report_markdown(const MetricReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "# Evaluation report\n\n";
    out << report.query_count << " queries (" << report.api_query_count
        << " with API ground truth, " << report.retrieval_query_count
        << " with code ground truth)\n\n";
    out << "## API class suggestion\n\n";
    out << "| Metric |";
    for (std::size_t k : report.ks) out << " Top-" << k << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.ks.size(); ++i) out << "---|";
    out << '\n';
    auto row = [&](const char* name, auto pick) {
        out << "| " << name << " |";
        for (std::size_t k : report.ks) out << ' ' << fmt(pick(report.by_k.at(k)), 4) << " |";
        out << '\n';
    };
    row("Top-K Accuracy", [](const MetricRow& r) { return r.hit; });
    row("MRR@K", [](const MetricRow& r) { return r.mrr; });
    row("MAP@K", [](const MetricRow& r) { return r.map; });
    row("MR@K", [](const MetricRow& r) { return r.recall; });
    out << "\n## Query effectiveness\n\n";
    out << "| Improved | Worsened | Preserved | MRD improved | MRD worsened |\n";
    out << "|---|---|---|---|---|\n";
    out << "| " << report.comparison.improved << " | " << report.comparison.worsened << " | "
        << report.comparison.preserved << " | " << fmt_mrd(report.comparison.mrd_improved)
        << " | " << fmt_mrd(report.comparison.mrd_worsened) << " |\n";
    out << "\n| Query | Baseline QE | Reformulated QE |\n|---|---|---|\n";
    for (const auto& outcome : report.outcomes) {
        if (!outcome.retrieval) continue;
        out << "| " << outcome.query_id << " | " << fmt_rank(outcome.baseline_qe) << " | "
            << fmt_rank(outcome.reformulated_qe) << " |\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

SweepResult run_sweep(const Engine& engine, const std::vector<EvalRecord>& records,
                      const InvertedIndex* code_index, ExperimentOptions options,
                      const std::string& parameter, const std::vector<std::size_t>& values) {
    SweepResult sweep;
    sweep.parameter = parameter;
    for (std::size_t value : values) {
        ExperimentOptions run = options;
        if (parameter == "m") run.m = value;
        else if (parameter == "n") run.n = value;
        else if (parameter == "k") run.k = value;
        else throw std::invalid_argument("unknown sweep parameter: " + parameter);
        if (value < 1) throw std::invalid_argument("sweep value must be >= 1");
        sweep.rows.push_back({value, run_experiment(engine, records, code_index, run)});
    }
    return sweep;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << sweep.parameter
        << ",top_10_accuracy,mrr_10,map_10,mean_recall_10,improved,worsened,preserved\n";
    for (const auto& [value, report] : sweep.rows) {
        const std::size_t k = report.ks.back();
        const MetricRow& r = report.by_k.at(k);
        out << value << ',' << fmt(r.hit) << ',' << fmt(r.mrr) << ',' << fmt(r.map) << ','
            << fmt(r.recall) << ',' << report.comparison.improved << ','
            << report.comparison.worsened << ',' << report.comparison.preserved << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_sweep_markdown(const SweepResult& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << "# Sweep over " << sweep.parameter << "\n\n";
    out << "| " << sweep.parameter
        << " | Top-10 Acc | MRR@10 | MAP@10 | MR@10 | Improved | Worsened | Preserved |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& [value, report] : sweep.rows) {
        const std::size_t k = report.ks.back();
        const MetricRow& r = report.by_k.at(k);
        out << "| " << value << " | " << fmt(r.hit, 4) << " | " << fmt(r.mrr, 4) << " | "
            << fmt(r.map, 4) << " | " << fmt(r.recall, 4) << " | " << report.comparison.improved
            << " | " << report.comparison.worsened << " | " << report.comparison.preserved
            << " |\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nlp2api
