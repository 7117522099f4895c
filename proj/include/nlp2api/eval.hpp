#pragma once
// Retrieval metrics (Top-K accuracy, MRR@K, MAP@K, MR@K, query
// effectiveness) and the experiment harness comparing baseline against
// reformulated queries, with CSV and Markdown report emitters.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nlp2api/index.hpp"
#include "nlp2api/reformulate.hpp"

namespace nlp2api {

struct EvalRecord {
    std::int64_t query_id = 0;
    std::string query;
    std::set<std::string> gt_api;       // ground truth API classes
    std::set<std::string> gt_code;      // ground truth code document ids
};

std::vector<EvalRecord> load_eval_set(const std::string& path);

// results are ranked ids, best first; gt is the relevant set.
int hit_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
             std::size_t k);
double mrr_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
                std::size_t k);
// Average precision: mean of precision@p over relevant positions p <= k.
double ap_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
               std::size_t k);
// Throws when gt is empty.
double recall_at_k(const std::vector<std::string>& results, const std::set<std::string>& gt,
                   std::size_t k);

// 1-based rank of the first ground-truth id in the full list; nullopt when
// absent ("not found", worse than any rank).
std::optional<std::size_t> query_effectiveness(const std::vector<std::string>& results,
                                               const std::set<std::string>& gt_code);

struct QueryComparison {
    std::size_t improved = 0;
    std::size_t worsened = 0;
    std::size_t preserved = 0;
    // Mean (reformulated - baseline) over the numeric pairs of each subset;
    // pairs with a not-found side are tallied but excluded from the means.
    std::optional<double> mrd_improved;
    std::optional<double> mrd_worsened;
};

// Paired per-query ranks; a lower reformulated rank means improved, a
// not-found counts as worse than any rank and two not-founds are preserved.
// Throws on length mismatch.
QueryComparison compare_queries(const std::vector<std::optional<std::size_t>>& baseline,
                                const std::vector<std::optional<std::size_t>>& reformulated);

struct MetricRow {
    double hit = 0.0;     // Top-K accuracy
    double mrr = 0.0;
    double map = 0.0;
    double recall = 0.0;  // MR@K
};

struct QueryOutcome {
    std::int64_t query_id = 0;
    std::vector<std::string> suggested;                 // ranked API classes
    bool retrieval = false;                             // record carried gt_code
    std::optional<std::size_t> baseline_qe;
    std::optional<std::size_t> reformulated_qe;
    bool fed_back = true;  // false when PRF found nothing for the query
};

struct MetricReport {
    std::vector<std::size_t> ks;                // e.g. 1, 3, 5, 10
    std::map<std::size_t, MetricRow> by_k;      // over queries with gt_api
    std::size_t api_query_count = 0;
    QueryComparison comparison;                 // over queries with gt_code
    std::size_t retrieval_query_count = 0;
    std::vector<QueryOutcome> outcomes;         // in eval-set order
    std::size_t query_count = 0;
};

struct ExperimentOptions {
    std::vector<std::size_t> ks = {1, 3, 5, 10};
    std::size_t m = 35;
    std::size_t n = 16;
    std::size_t k = 10;
    int jobs = 1;
};

// Deterministic given fixed inputs: per-query work may run on `jobs`
// threads but results are assembled in eval-set order. The code index may
// be null when no record carries gt_code. Throws on an empty eval set or a
// missing required component.
MetricReport run_experiment(const Engine& engine, const std::vector<EvalRecord>& records,
                            const InvertedIndex* code_index, const ExperimentOptions& options);

void write_report_csv(const MetricReport& report, const std::string& path);
void write_report_markdown(const MetricReport& report, const std::string& path);

struct SweepResult {
    std::string parameter;  // "m", "n" or "k"
    std::vector<std::pair<std::size_t, MetricReport>> rows;
};

SweepResult run_sweep(const Engine& engine, const std::vector<EvalRecord>& records,
                      const InvertedIndex* code_index, ExperimentOptions options,
                      const std::string& parameter, const std::vector<std::size_t>& values);

void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_sweep_markdown(const SweepResult& sweep, const std::string& path);

}  // namespace nlp2api
