#include <algorithm>
#include <istream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wsd/corpus.hpp"
#include "wsd/util.hpp"

namespace wsd::corpus {

namespace {

// 127 English function words, stoplist version 1. Changing this list changes
// the stoplist hash recorded in model files.
const char* const kStoplist[] = {
    "a",          "about",   "above",    "after",   "again",      "against",
    "all",        "am",      "an",       "and",     "any",        "are",
    "as",         "at",      "be",       "because", "been",       "before",
    "being",      "below",   "between",  "both",    "but",        "by",
    "can",        "cannot",  "could",    "did",     "do",         "does",
    "doing",      "down",    "during",   "each",    "few",        "for",
    "from",       "further", "had",      "has",     "have",       "having",
    "he",         "her",     "here",     "hers",    "herself",    "him",
    "himself",    "his",     "how",      "i",       "if",         "in",
    "into",       "is",      "it",       "its",     "itself",     "just",
    "me",         "more",    "most",     "my",      "myself",     "no",
    "nor",        "not",     "now",      "of",      "off",        "on",
    "once",       "only",    "or",       "other",   "our",        "ours",
    "ourselves",  "out",     "over",     "own",     "same",       "she",
    "should",     "so",      "some",     "such",    "than",       "that",
    "the",        "their",   "theirs",   "them",    "themselves", "then",
    "there",      "these",   "they",     "this",    "those",      "through",
    "to",         "too",     "under",    "until",   "up",         "very",
    "was",        "we",      "were",     "what",    "when",       "where",
    "which",      "while",   "who",      "whom",    "why",        "will",
    "with",       "would",   "you",      "your",    "yours",      "yourself",
    "yourselves",
};

}  // namespace

const std::vector<std::string>& default_stoplist_words() {
    static const std::vector<std::string> words(std::begin(kStoplist),
                                                std::end(kStoplist));
    return words;
}

const std::unordered_set<std::string>& default_stoplist() {
    static const std::unordered_set<std::string> set(
        default_stoplist_words().begin(), default_stoplist_words().end());
    return set;
}

std::unordered_set<std::string> load_stoplist(std::istream& in) {
    std::unordered_set<std::string> out;
    std::string raw;
    while (std::getline(in, raw)) {
        auto fields = util::split_whitespace(util::strip_cr(raw));
        for (auto& f : fields) out.insert(util::lower_ascii(f));
    }
    return out;
}

std::string stoplist_hash(const std::unordered_set<std::string>& stoplist) {
    std::vector<std::string> sorted(stoplist.begin(), stoplist.end());
    std::sort(sorted.begin(), sorted.end());
    std::string joined;
    for (const auto& w : sorted) {
        joined += w;
        joined += '\n';
    }
    return util::content_hash(joined);
}

}  // namespace wsd::corpus
