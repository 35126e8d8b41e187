#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wsd/alignment.hpp"
#include "wsd/corpus.hpp"

namespace wsd::xling {

// English headwords with their candidate Chinese translations (the
// cross-lingual sense inventory) and per-translation training counts.
struct BilingualDictionary {
    struct Entry {
        std::vector<std::string> translations;  // dictionary file order
        std::vector<std::size_t> counts;        // parallel to translations
    };
    std::map<std::string, Entry> entries;

    bool is_headword(const std::string& lemma) const {
        return entries.count(lemma) > 0;
    }
    // Position of a translation in file order, or npos.
    std::size_t translation_rank(const std::string& lemma,
                                 const std::string& translation) const;
    // Translations by descending count, ties by file order.
    std::vector<std::string> inventory_order(const std::string& lemma) const;
    // The same ordering truncated to the k most frequent, with their counts.
    std::vector<std::pair<std::string, std::size_t>> top_k(
        const std::string& lemma, std::size_t k) const;

    corpus::SenseInventory as_inventory() const;
};

// TSV "english_lemma<TAB>translation1<TAB>translation2...". Headwords are
// ASCII-lowercased. Throws MalformedRecord, DuplicateWord.
BilingualDictionary load_dictionary(std::istream& in);
std::string serialize_dictionary(const BilingualDictionary& dict);

// Counts sidecar, TSV "lemma<TAB>translation<TAB>count".
void load_counts(BilingualDictionary& dict, std::istream& in);
std::string serialize_counts(const BilingualDictionary& dict);

struct XlingBuild {
    std::vector<corpus::Instance> instances;
    BilingualDictionary dictionary;  // with incremented counts
    std::size_t emitted = 0;
    std::size_t skipped_unlisted = 0;      // aligned word not a dictionary sense
    std::size_t unaligned_headwords = 0;   // headword tokens without a link
};

// Projects translation labels through the alignment: every link whose
// source token is a dictionary headword yields one training instance with
// the aligned Chinese word as gold, provided that word is one of the
// headword's dictionary translations. Context is the full source sentence.
// Throws AlignmentCountMismatch, LinkOutOfRange.
XlingBuild build_xling_training(const ParallelCorpus& corpus,
                                const AlignmentTable& alignment,
                                const BilingualDictionary& dictionary);

struct AnnotationRecord {
    std::string instance_id;
    std::string annotator_id;
    std::vector<std::string> selected;  // unique; empty = "no suitable translation"
    std::vector<std::string> added_oov;
};

// TSV "instance_id<TAB>annotator_id<TAB>selections<TAB>oov additions",
// selections comma-joined, empty fields allowed. Throws MalformedRecord.
std::vector<AnnotationRecord> parse_annotations(std::istream& in);

enum class FilterMode {
    kIncludeAll,          // >= 1 non-empty annotation
    kExcludeOov,          // ... and no annotator added out-of-dictionary words
    kPartialAgreement,    // ... and some label selected by >= 2 annotators
    kCompleteAgreement,   // ... and some label selected by all annotators
};

FilterMode filter_mode_from_name(const std::string& name);  // throws BadFilterMode
const char* filter_mode_name(FilterMode mode);

// Retained instance ids in first-appearance order.
std::vector<std::string> filter_annotations(
    const std::vector<AnnotationRecord>& records, FilterMode mode);

struct KappaResult {
    double kappa = 0.0;
    double p_a = 0.0;
    double p_e = 0.0;
    std::size_t n_pairs = 0;
};

// Pairwise agreement over annotator pairs sharing an instance. p_A is the
// fraction of pairs whose selected sets intersect. Chance agreement uses
// the 3 most frequent dictionary translations of the instance's lemma:
// per pair sum of q(s)^2 with q renormalized over that top 3 (uniform when
// all counts are zero), averaged over pairs. Instances whose annotators
// all left the annotation blank are excluded. Throws NoPairs,
// DegenerateAgreement, UnknownInstanceId, MissingLemma.
KappaResult compute_kappa(
    const std::vector<AnnotationRecord>& records,
    const std::map<std::string, std::string>& lemma_of_instance,
    const BilingualDictionary& dict_with_counts);

}  // namespace wsd::xling
