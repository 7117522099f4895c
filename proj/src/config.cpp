#include "nlp2api/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlp2api {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    std::istringstream in(value);
    T out;
    if (!(in >> out) || !(in >> std::ws).eof())
        throw std::invalid_argument("config key " + key + ": bad value \"" + value + "\"");
    return out;
}

}  // namespace

void EngineConfig::validate() const {
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (pagerank.phi < 0.0 || pagerank.phi > 1.0)
        throw std::invalid_argument("config: phi must be in [0, 1]");
    if (pagerank.epsilon <= 0.0) throw std::invalid_argument("config: epsilon must be > 0");
    if (pagerank.max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
    if (embedding.dim < 1 || embedding.window < 1 || embedding.min_count < 1 ||
        embedding.epochs < 1 || embedding.negatives < 0 || embedding.learning_rate <= 0.0)
        throw std::invalid_argument("config: bad embedding settings");
}

EngineConfig parse_config(const std::string& text, const std::string& origin) {
    EngineConfig config;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string full = section.empty() ? key : section + "." + key;

        if (full == "paths.corpus") config.corpus = value;
        else if (full == "paths.qa_index") config.qa_index = value;
        else if (full == "paths.code_index") config.code_index = value;
        else if (full == "paths.vectors") config.vectors = value;
        else if (full == "paths.df_table") config.df_table = value;
        else if (full == "paths.stopwords") config.stopwords = value;
        else if (full == "paths.keywords") config.keywords = value;
        else if (full == "paths.caps_whitelist") config.caps_whitelist = value;
        else if (full == "params.m") config.m = parse_number<std::size_t>(value, full);
        else if (full == "params.n") config.n = parse_number<std::size_t>(value, full);
        else if (full == "params.k") config.k = parse_number<std::size_t>(value, full);
        else if (full == "params.phi") config.pagerank.phi = parse_number<double>(value, full);
        else if (full == "params.epsilon")
            config.pagerank.epsilon = parse_number<double>(value, full);
        else if (full == "params.max_iter")
            config.pagerank.max_iter = parse_number<int>(value, full);
        else if (full == "params.bm25_k1") config.bm25.k1 = parse_number<double>(value, full);
        else if (full == "params.bm25_b") config.bm25.b = parse_number<double>(value, full);
        else if (full == "embedding.dim") config.embedding.dim = parse_number<int>(value, full);
        else if (full == "embedding.window")
            config.embedding.window = parse_number<int>(value, full);
        else if (full == "embedding.min_count")
            config.embedding.min_count = parse_number<int>(value, full);
        else if (full == "embedding.epochs")
            config.embedding.epochs = parse_number<int>(value, full);
        else if (full == "embedding.negatives")
            config.embedding.negatives = parse_number<int>(value, full);
        else if (full == "embedding.learning_rate")
            config.embedding.learning_rate = parse_number<double>(value, full);
        else if (full == "run.seed")
            config.seed = parse_number<std::uint64_t>(value, full);
        else if (full == "run.jobs") config.jobs = parse_number<int>(value, full);
        else
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": unknown config key " + full);
    }
    config.embedding.seed = config.seed;
    return config;
}

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

}  // namespace nlp2api
