#include "quickstep/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quickstep/porter.hpp"

namespace quickstep {

TermVector::TermVector(std::string doc_id, std::vector<Entry> entries)
    : doc_id_(std::move(doc_id))
    , entries_(std::move(entries))
{
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    const auto dup = std::adjacent_find(
        entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first == b.first; });
    if (dup != entries_.end()) {
        throw InvalidRequest("duplicate stem '" + dup->first + "' in term vector");
    }
    for (const auto& [stem, w] : entries_) {
        if (!(w > 0.0)) {
            throw InvalidRequest("non-positive weight for stem '" + stem + "'");
        }
    }
}

TermVector::TermVector(std::string doc_id, const std::map<std::string, double>& weights)
    : TermVector(std::move(doc_id), std::vector<Entry>(weights.begin(), weights.end()))
{
}

double TermVector::weight(std::string_view stem) const
{
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), stem,
        [](const Entry& e, std::string_view s) { return e.first < s; });
    return it != entries_.end() && it->first == stem ? it->second : 0.0;
}

double TermVector::squared_norm() const
{
    double sum = 0.0;
    for (const auto& e : entries_) {
        sum += e.second * e.second;
    }
    return sum;
}

StopList StopList::parse(std::string_view content)
{
    std::unordered_set<std::string> words;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) {
            end = content.size();
        }
        auto line = content.substr(start, end - start);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            words.emplace(line);
        }
        start = end + 1;
    }
    return StopList(std::move(words));
}

StopList StopList::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot open stop list " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

/// Decodes one UTF-8 sequence at s[i]; returns the length consumed, 0 if invalid.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp)
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (i + len > s.size()) {
        return 0;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            return 0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        return 0;
    }
    return len;
}

bool is_word_codepoint(char32_t cp)
{
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    // Latin-1 punctuation and symbols, general punctuation through misc symbols,
    // CJK punctuation, specials.
    if ((cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE4F) ||
        (cp >= 0xFFF0 && cp <= 0xFFFF)) {
        return false;
    }
    return true;
}

void append_lower(std::string& out, std::string_view bytes, char32_t cp)
{
    if (cp >= 'A' && cp <= 'Z') {
        out.push_back(static_cast<char>(cp - 'A' + 'a'));
        return;
    }
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        const char32_t lower = cp + 0x20;  // two-byte sequence either way
        out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
        out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
        return;
    }
    out.append(bytes);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        const std::size_t len = decode_utf8(text, i, cp);
        if (len != 0 && is_word_codepoint(cp)) {
            append_lower(current, text.substr(i, len), cp);
            i += len;
            continue;
        }
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
        i += len == 0 ? 1 : len;
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopList& stoplist)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stoplist.contains(t)) {
            out.push_back(t);
        }
    }
    return out;
}

std::string stem(std::string_view token)
{
    return porter_stem(token);
}

TermVector build_vector(std::string doc_id, std::string_view text, const StopList& stoplist)
{
    std::map<std::string, int> counts;
    long total = 0;
    for (const auto& token : remove_stopwords(tokenize(text), stoplist)) {
        ++counts[stem(token)];
        ++total;
    }
    std::vector<TermVector::Entry> entries;
    for (const auto& [s, c] : counts) {
        if (c >= 2) {
            entries.emplace_back(s, static_cast<double>(c) / static_cast<double>(total));
        }
    }
    return TermVector(std::move(doc_id), std::move(entries));
}

TermVector build_vector(const RawDocument& doc, const StopList& stoplist)
{
    return build_vector(doc.doc_id, doc.text, stoplist);
}

double cosine(const TermVector& a, const TermVector& b)
{
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    double dot = 0.0;
    auto ia = ea.begin();
    auto ib = eb.begin();
    while (ia != ea.end() && ib != eb.end()) {
        const int c = ia->first.compare(ib->first);
        if (c < 0) {
            ++ia;
        } else if (c > 0) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    // sqrt(x * x) == x in IEEE arithmetic, so cosine(v, v) is exactly 1.
    const double sim = dot / std::sqrt(a.squared_norm() * b.squared_norm());
    return std::clamp(sim, 0.0, 1.0);
}

SuffixFilter::SuffixFilter()
    : suffixes_{".ps", ".pdf", ".ps.gz", ".ps.Z", ".pdf.gz"}
{
}

bool SuffixFilter::accepts(std::string_view url) const
{
    if (const auto cut = url.find_first_of("?#"); cut != std::string_view::npos) {
        url = url.substr(0, cut);
    }
    const auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) {
            if (c >= 'A' && c <= 'Z') {
                c = static_cast<char>(c - 'A' + 'a');
            }
        }
        return out;
    };
    const std::string path = lower(url);
    return std::any_of(suffixes_.begin(), suffixes_.end(), [&](const std::string& suffix) {
        const std::string s = lower(suffix);
        return path.size() > s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    });
}

}  // namespace quickstep
