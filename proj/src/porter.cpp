#include "quickstep/porter.hpp"

#include <algorithm>
#include <functional>

namespace quickstep {

namespace {

bool is_consonant(std::string_view w, std::size_t i)
{
    switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
        return false;
    case 'y':
        return i == 0 || !is_consonant(w, i - 1);
    default:
        return true;
    }
}

/// m in [C](VC){m}[V]
int measure(std::string_view stem)
{
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        const bool cons = is_consonant(stem, i);
        if (cons && prev_vowel) {
            ++m;
        }
        prev_vowel = !cons;
    }
    return m;
}

bool contains_vowel(std::string_view stem)
{
    for (std::size_t i = 0; i < stem.size(); ++i) {
        if (!is_consonant(stem, i)) {
            return true;
        }
    }
    return false;
}

bool ends_double_consonant(std::string_view w)
{
    const auto n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

/// *o: ends consonant-vowel-consonant, final consonant not w, x or y.
bool ends_cvc(std::string_view w)
{
    const auto n = w.size();
    return n >= 3 && is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
        w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix)
{
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

/// The first rule whose suffix matches decides the step: its replacement is
/// applied when the stem passes `cond`, otherwise the word is left alone.
template <typename Cond>
void apply_first(std::string& w, std::initializer_list<Rule> rules, Cond cond)
{
    for (const auto& r : rules) {
        if (ends_with(w, r.suffix)) {
            const std::string_view stem(w.data(), w.size() - r.suffix.size());
            if (cond(stem)) {
                w.resize(stem.size());
                w.append(r.replacement);
            }
            return;
        }
    }
}

bool positive_measure(std::string_view stem)
{
    return measure(stem) > 0;
}

void step1a(std::string& w)
{
    apply_first(w, {{"sses", "ss"}, {"ies", "i"}, {"ss", "ss"}, {"s", ""}}, [](std::string_view) { return true; });
}

void step1b(std::string& w)
{
    if (ends_with(w, "eed")) {
        if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) {
            w.resize(w.size() - 1);
        }
        return;
    }
    bool stripped = false;
    for (const std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
        if (ends_with(w, suffix) && contains_vowel(std::string_view(w).substr(0, w.size() - suffix.size()))) {
            w.resize(w.size() - suffix.size());
            stripped = true;
            break;
        }
    }
    if (!stripped) {
        return;
    }
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (ends_double_consonant(w)) {
        const char last = w.back();
        if (last != 'l' && last != 's' && last != 'z') {
            w.pop_back();
        }
    } else if (measure(w) == 1 && ends_cvc(w)) {
        w.push_back('e');
    }
}

void step1c(std::string& w)
{
    if (ends_with(w, "y") && contains_vowel(std::string_view(w).substr(0, w.size() - 1))) {
        w.back() = 'i';
    }
}

void step2(std::string& w)
{
    apply_first(w,
        {
            {"ational", "ate"},
            {"tional", "tion"},
            {"enci", "ence"},
            {"anci", "ance"},
            {"izer", "ize"},
            {"abli", "able"},
            {"alli", "al"},
            {"entli", "ent"},
            {"eli", "e"},
            {"ousli", "ous"},
            {"ization", "ize"},
            {"ation", "ate"},
            {"ator", "ate"},
            {"alism", "al"},
            {"iveness", "ive"},
            {"fulness", "ful"},
            {"ousness", "ous"},
            {"aliti", "al"},
            {"iviti", "ive"},
            {"biliti", "ble"},
        },
        positive_measure);
}

void step3(std::string& w)
{
    apply_first(w,
        {
            {"icate", "ic"},
            {"ative", ""},
            {"alize", "al"},
            {"iciti", "ic"},
            {"ical", "ic"},
            {"ful", ""},
            {"ness", ""},
        },
        positive_measure);
}

void step4(std::string& w)
{
    const auto m_gt_1 = [](std::string_view stem) { return measure(stem) > 1; };
    for (const std::string_view suffix : {"al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
             "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"}) {
        if (!ends_with(w, suffix)) {
            continue;
        }
        const std::string_view stem(w.data(), w.size() - suffix.size());
        bool ok = m_gt_1(stem);
        if (suffix == "ion") {
            ok = ok && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
        }
        if (ok) {
            w.resize(stem.size());
        }
        return;
    }
}

void step5a(std::string& w)
{
    if (!ends_with(w, "e")) {
        return;
    }
    const std::string_view stem(w.data(), w.size() - 1);
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) {
        w.pop_back();
    }
}

void step5b(std::string& w)
{
    if (ends_with(w, "ll") && measure(std::string_view(w).substr(0, w.size() - 1)) > 1) {
        w.pop_back();
    }
}

}  // namespace

std::string porter_stem(std::string_view word)
{
    const bool plain = std::all_of(word.begin(), word.end(),
        [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
    std::string w(word);
    if (!plain || w.empty()) {
        return w;
    }
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

}  // namespace quickstep
