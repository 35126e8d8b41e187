#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace wsd::corpus {

struct Token {
    std::string surface;
    std::string lemma;  // lowercase; may be empty only for punctuation
    std::string pos;    // open tagset, may be empty
    int sent = 0;       // sentence index, non-decreasing within an instance
    bool punct = false;
};

// One disambiguation case: target occurrence plus its tokenized context.
struct Instance {
    std::string id;
    std::string target_lemma;
    std::string target_pos;
    std::vector<Token> tokens;
    std::size_t target_index = 0;
    std::vector<std::string> gold;  // unique sense ids; empty = unlabeled
    bool proper_noun = false;
};

// Parses the line-delimited JSON instance format. Ids are checked unique,
// target_index in range, the target token's lemma equal to target_lemma,
// sentence indices non-decreasing, gold ids unique, unknown fields rejected.
// Throws MalformedRecord, DuplicateId, IndexOutOfRange.
std::vector<Instance> parse_instances(std::istream& in);

// Canonical JSONL, parseable by parse_instances.
std::string serialize_instances(const std::vector<Instance>& instances);

// Stopword/punctuation-filtered view of an instance. The target token is
// always retained and its new position tracked.
struct NormalizedContext {
    std::vector<Token> tokens;
    std::size_t target_index = 0;
};

NormalizedContext normalize_tokens(const Instance& instance,
                                   const std::unordered_set<std::string>& stoplist);

// Partition by target lemma; within-group order preserved.
std::map<std::string, std::vector<Instance>> group_by_lemma(
    const std::vector<Instance>& instances);

// The embedded list of 127 English function words.
const std::vector<std::string>& default_stoplist_words();
const std::unordered_set<std::string>& default_stoplist();

// One lowercase lemma per line; blank lines skipped.
std::unordered_set<std::string> load_stoplist(std::istream& in);

// Hash over the sorted lemmas; recorded in model files so that a model is
// only applied with the stoplist it was trained with.
std::string stoplist_hash(const std::unordered_set<std::string>& stoplist);

// Permissible senses per lemma, ordered by descending training frequency
// (ties: first occurrence in the training data).
struct SenseInventory {
    std::map<std::string, std::vector<std::string>> senses;

    bool has(const std::string& lemma) const { return senses.count(lemma) > 0; }
    bool contains(const std::string& lemma, const std::string& sense) const;
    // First-listed sense; throws MissingLemma.
    const std::string& first_sense(const std::string& lemma) const;
};

// Builds the inventory from labeled instances. Instances with multiple gold
// senses contribute one count per sense.
SenseInventory build_inventory(const std::vector<Instance>& training);

// TSV "lemma<TAB>sense1<TAB>sense2...".
SenseInventory load_inventory(std::istream& in);
std::string serialize_inventory(const SenseInventory& inv);

}  // namespace wsd::corpus
