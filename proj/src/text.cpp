#include "nlp2api/text.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "nlp2api/builtin_wordlists.hpp"

namespace nlp2api {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace

TokenFilter::TokenFilter() {
    for (const char* w : detail::kStopwords) stopwords_.insert(w);
    for (const char* w : detail::kJavaKeywords) keywords_.insert(w);
}

TokenFilter::TokenFilter(std::set<std::string> stopwords, std::set<std::string> keywords)
    : stopwords_(std::move(stopwords)), keywords_(std::move(keywords)) {}

std::set<std::string> TokenFilter::load_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open word list: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty() && line.front() != '#') out.insert(to_lower(line));
    }
    return out;
}

bool TokenFilter::drops(const std::string& token) const {
    return token.empty() || stopwords_.count(token) > 0 || keywords_.count(token) > 0;
}

std::vector<std::string> split_identifier(std::string_view identifier) {
    std::vector<std::string> parts;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            parts.push_back(to_lower(current));
            current.clear();
        }
    };
    const std::size_t n = identifier.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = identifier[i];
        if (c == '_') {
            flush();
            continue;
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                char prev = current.back();
                bool next_lower =
                    i + 1 < n && std::islower(static_cast<unsigned char>(identifier[i + 1]));
                // boundary at lower/digit -> Upper, and before the last
                // capital of an acronym run (XMLParser -> xml, parser)
                if (!std::isupper(static_cast<unsigned char>(prev)) ||
                    (std::isupper(static_cast<unsigned char>(prev)) && next_lower)) {
                    flush();
                }
            }
        }
        current.push_back(c);
    }
    flush();
    return parts;
}

std::vector<std::string> preprocess(std::string_view text, const TokenFilter& filter) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto emit = [&](std::string token) {
        if (!filter.drops(token)) tokens.push_back(std::move(token));
    };
    while (i < n) {
        if (!is_word_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < n && is_word_char(text[i])) ++i;
        std::string_view identifier = text.substr(start, i - start);

        std::vector<std::string> parts = split_identifier(identifier);
        if (parts.empty()) continue;  // pure underscores
        if (parts.size() == 1) {
            emit(std::move(parts.front()));
            continue;
        }
        // the whole identifier first (lowercased, underscores dropped),
        // then its subtokens; lowercase output never splits again, which
        // makes preprocess idempotent
        std::string whole;
        whole.reserve(identifier.size());
        for (char c : identifier)
            if (c != '_') whole.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        emit(std::move(whole));
        for (auto& part : parts) emit(std::move(part));
    }
    return tokens;
}

std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    const std::size_t n = html.size();
    while (i < n) {
        char c = html[i];
        if (c == '<') {
            std::size_t close = html.find('>', i);
            if (close == std::string_view::npos) break;  // unterminated tag
            i = close + 1;
            out.push_back(' ');
            continue;
        }
        if (c == '&') {
            static const std::pair<std::string_view, char> entities[] = {
                {"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'},
                {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''},
            };
            bool matched = false;
            for (auto [name, repl] : entities) {
                if (html.substr(i, name.size()) == name) {
                    out.push_back(repl);
                    i += name.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (html.substr(i, 6) == "&nbsp;") {
                out.push_back(' ');
                i += 6;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::vector<std::string> dedupe_keep_order(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& token : tokens)
        if (seen.insert(token).second) out.push_back(token);
    return out;
}

}  // namespace nlp2api
