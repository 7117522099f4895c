#include "nlp2api/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nlp2api {

namespace {

// portable uniform double in [0, 1) from the raw engine stream
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EmbeddingModel::EmbeddingModel(int dim, int min_count, int window)
    : dim_(dim), min_count_(min_count), window_(window) {}

bool EmbeddingModel::contains(const std::string& token) const {
    return vocab_.count(token) > 0;
}

const std::vector<float>* EmbeddingModel::vector_of(const std::string& token) const {
    auto it = vocab_.find(token);
    return it == vocab_.end() ? nullptr : &vectors_[it->second];
}

void EmbeddingModel::add(const std::string& token, std::vector<float> vector) {
    if (vocab_.count(token) > 0) throw std::runtime_error("duplicate vocabulary token: " + token);
    if (static_cast<int>(vector.size()) != dim_)
        throw std::runtime_error("vector length mismatch for token: " + token);
    vocab_.emplace(token, words_.size());
    words_.push_back(token);
    vectors_.push_back(std::move(vector));
}

EmbeddingModel train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramConfig& config) {
    if (config.dim < 1 || config.window < 1 || config.min_count < 1 || config.epochs < 1 ||
        config.negatives < 0 || config.learning_rate <= 0.0)
        throw std::invalid_argument("train_skipgram: bad configuration");

    // vocabulary: tokens reaching min_count, most frequent first
    std::map<std::string, std::uint64_t> counts;
    for (const auto& sentence : sentences)
        for (const auto& token : sentence) ++counts[token];
    std::vector<std::pair<std::string, std::uint64_t>> vocab;
    for (const auto& [token, count] : counts)
        if (count >= static_cast<std::uint64_t>(config.min_count)) vocab.push_back({token, count});
    if (vocab.empty()) throw std::runtime_error("empty vocabulary");
    std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    const std::size_t v = vocab.size();
    const int dim = config.dim;
    std::unordered_map<std::string, std::size_t> word_id;
    for (std::size_t i = 0; i < v; ++i) word_id.emplace(vocab[i].first, i);

    // cumulative unigram^0.75 distribution for negative sampling
    std::vector<double> cumulative(v);
    double mass = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        mass += std::pow(static_cast<double>(vocab[i].second), 0.75);
        cumulative[i] = mass;
    }

    std::mt19937_64 rng(config.seed);
    auto sample_word = [&]() -> std::size_t {
        double u = next_uniform(rng) * mass;
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - cumulative.begin(), static_cast<std::ptrdiff_t>(v) - 1));
    };

    std::vector<float> syn0(v * dim);
    std::vector<float> syn1(v * dim, 0.0f);
    for (auto& x : syn0)
        x = static_cast<float>((next_uniform(rng) - 0.5) / dim);

    std::uint64_t train_words = 0;
    for (const auto& [token, count] : vocab) train_words += count;
    const double total = static_cast<double>(train_words) * config.epochs + 1.0;

    std::vector<std::size_t> sentence_ids;
    std::vector<float> grad(dim);
    std::uint64_t processed = 0;
    double alpha = config.learning_rate;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& sentence : sentences) {
            sentence_ids.clear();
            for (const auto& token : sentence) {
                auto it = word_id.find(token);
                if (it != word_id.end()) sentence_ids.push_back(it->second);
            }
            const std::size_t len = sentence_ids.size();
            for (std::size_t pos = 0; pos < len; ++pos) {
                ++processed;
                alpha = config.learning_rate *
                        std::max(1.0 - static_cast<double>(processed) / total, 1e-4);
                const std::size_t center = sentence_ids[pos];
                // shrunk window, as in the reference skip-gram trainers
                const std::size_t reach =
                    1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(config.window));
                const std::size_t lo = pos >= reach ? pos - reach : 0;
                const std::size_t hi = std::min(len - 1, pos + reach);
                for (std::size_t ctx_pos = lo; ctx_pos <= hi; ++ctx_pos) {
                    if (ctx_pos == pos) continue;
                    const std::size_t context = sentence_ids[ctx_pos];
                    float* input = &syn0[context * dim];
                    std::fill(grad.begin(), grad.end(), 0.0f);
                    for (int d = 0; d <= config.negatives; ++d) {
                        std::size_t target;
                        double label;
                        if (d == 0) {
                            target = center;
                            label = 1.0;
                        } else {
                            target = sample_word();
                            if (target == center) continue;
                            label = 0.0;
                        }
                        float* output = &syn1[target * dim];
                        double f = 0.0;
                        for (int i = 0; i < dim; ++i) f += input[i] * output[i];
                        const float g = static_cast<float>((label - sigmoid(f)) * alpha);
                        for (int i = 0; i < dim; ++i) grad[i] += g * output[i];
                        for (int i = 0; i < dim; ++i) output[i] += g * input[i];
                    }
                    for (int i = 0; i < dim; ++i) input[i] += grad[i];
                }
            }
        }
    }

    EmbeddingModel model(dim, config.min_count, config.window);
    for (std::size_t i = 0; i < v; ++i) {
        std::vector<float> vec(syn0.begin() + static_cast<std::ptrdiff_t>(i * dim),
                               syn0.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
        for (float x : vec)
            if (!std::isfinite(x)) throw std::runtime_error("non-finite embedding component");
        model.add(vocab[i].first, std::move(vec));
    }
    return model;
}

void save_vectors(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vectors: " + path);
    out << model.vocab_size() << ' ' << model.dim() << '\n';
    char buf[32];
    for (const auto& word : model.words()) {
        out << word;
        const auto* vec = model.vector_of(word);
        for (float x : *vec) {
            std::snprintf(buf, sizeof buf, " %.6f", static_cast<double>(x));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingModel load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vectors: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty vector file: " + path);
    std::istringstream hs(header);
    std::size_t vocab_size = 0;
    int dim = 0;
    if (!(hs >> vocab_size >> dim) || dim < 1)
        throw std::runtime_error(path + ":1: expected \"vocab_size dim\" header");
    EmbeddingModel model(dim, 0, 0);
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        std::vector<float> vec;
        vec.reserve(static_cast<std::size_t>(dim));
        double x;
        while (ls >> x) vec.push_back(static_cast<float>(x));
        if (static_cast<int>(vec.size()) != dim)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(dim) + " components, got " +
                                     std::to_string(vec.size()));
        model.add(token, std::move(vec));
    }
    if (model.vocab_size() != vocab_size)
        throw std::runtime_error(path + ": header says " + std::to_string(vocab_size) +
                                 " words, file has " + std::to_string(model.vocab_size()));
    return model;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double proximity(const EmbeddingModel& model, const ApiClass& api, const Query& query) {
    std::string key;
    key.reserve(api.size());
    for (char c : api) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    const auto* api_vec = model.vector_of(key);
    if (!api_vec || query.keywords.empty()) return 0.0;
    // an out-of-vocabulary keyword contributes 0 to the max, so adding
    // keywords can never lower the estimate
    bool first = true;
    double best = 0.0;
    for (const auto& keyword : query.keywords) {
        const auto* kw_vec = model.vector_of(keyword);
        double c = kw_vec ? cosine(*api_vec, *kw_vec) : 0.0;
        if (first || c > best) best = c;
        first = false;
    }
    return best;
}

}  // namespace nlp2api
