#pragma once
// Natural-language preprocessing shared by the corpus, the code index and
// query handling: HTML stripping, identifier-aware tokenization, stopword
// and language-keyword filtering. No stemming.

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nlp2api {

// Stopwords plus programming-language keywords, both lowercase.
// Defaults come from the bundled lists; either set can be replaced by a
// one-token-per-line file.
class TokenFilter {
public:
    TokenFilter();  // bundled English stopwords + Java keywords
    TokenFilter(std::set<std::string> stopwords, std::set<std::string> keywords);

    static std::set<std::string> load_list(const std::string& path);

    bool drops(const std::string& token) const;

    const std::set<std::string>& stopwords() const { return stopwords_; }
    const std::set<std::string>& keywords() const { return keywords_; }

private:
    std::set<std::string> stopwords_;
    std::set<std::string> keywords_;
};

// Splits one identifier on camelCase humps and underscores.
// "FileOutputStream" -> {file, output, stream}; "XMLParser" -> {xml, parser};
// "foo_bar" -> {foo, bar}. Returns lowercase parts; a single-part identifier
// yields one entry equal to its lowercase form.
std::vector<std::string> split_identifier(std::string_view identifier);

// Lowercased alphanumeric tokens in text order. Identifiers that split
// contribute the whole identifier (lowercased, underscores dropped) followed
// by their subtokens; stopwords, keywords and empty tokens are removed.
// Idempotent on its own output.
std::vector<std::string> preprocess(std::string_view text, const TokenFilter& filter);

// Replaces HTML tags with spaces and decodes the common entities
// (&lt; &gt; &amp; &quot; &#39; &nbsp;). Content of the tags is kept.
std::string strip_html(std::string_view html);

// First-occurrence deduplication, order preserved.
std::vector<std::string> dedupe_keep_order(const std::vector<std::string>& tokens);

}  // namespace nlp2api
