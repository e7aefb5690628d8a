#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "quickstep/common.hpp"

namespace quickstep {

/// A fetched paper as plain text.
struct RawDocument {
    std::string doc_id;
    std::string uri;
    std::string text;
    Date fetched_at;
};

/// Sparse stem -> weight map for one document, kept sorted by stem.
///
/// Weights are term frequency over the document's total (stop-filtered,
/// stemmed) token count, so every weight is in (0, 1] and they sum to at most 1.
class TermVector {
public:
    using Entry = std::pair<std::string, double>;

    TermVector() = default;
    TermVector(std::string doc_id, std::vector<Entry> entries);
    TermVector(std::string doc_id, const std::map<std::string, double>& weights);

    const std::string& doc_id() const { return doc_id_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    /// 0 when the stem is absent.
    double weight(std::string_view stem) const;
    /// Sum of squared weights, accumulated in stem order.
    double squared_norm() const;

    bool operator==(const TermVector&) const = default;

private:
    std::string doc_id_;
    std::vector<Entry> entries_;
};

class StopList {
public:
    StopList() = default;
    explicit StopList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    /// One word per line, '#' starts a comment, blank lines ignored.
    static StopList parse(std::string_view content);
    static StopList load(const std::filesystem::path& path);

    bool contains(std::string_view w) const { return words_.find(std::string(w)) != words_.end(); }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Lower-cased maximal runs of alphanumeric characters.
///
/// ASCII letters and digits are word characters. Non-ASCII code points are
/// word characters unless they fall in a punctuation/symbol block; invalid
/// UTF-8 bytes separate tokens. Lower-casing covers ASCII and Latin-1.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopList& stoplist);

std::string stem(std::string_view token);

/// tokenize -> remove_stopwords -> stem -> count; stems seen fewer than twice
/// are dropped, and weight = count / (total surviving tokens before the drop).
TermVector build_vector(const RawDocument& doc, const StopList& stoplist);
TermVector build_vector(std::string doc_id, std::string_view text, const StopList& stoplist);

/// Cosine of the angle between the two weight maps; 0 if either is empty.
double cosine(const TermVector& a, const TermVector& b);

/// URL suffix filter for documents that are worth ingesting.
class SuffixFilter {
public:
    SuffixFilter();  // .ps .pdf .ps.gz .ps.Z .pdf.gz
    explicit SuffixFilter(std::vector<std::string> suffixes) : suffixes_(std::move(suffixes)) {}

    /// Matches on the URL path, ignoring any query string or fragment.
    bool accepts(std::string_view url) const;
    const std::vector<std::string>& suffixes() const { return suffixes_; }

private:
    std::vector<std::string> suffixes_;
};

}  // namespace quickstep
