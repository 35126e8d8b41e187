#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wsd::xling {

struct SentencePair {
    std::vector<std::string> source;  // lowercased English lemmas
    std::vector<std::string> target;  // opaque pre-segmented words
};

struct ParallelCorpus {
    std::vector<SentencePair> pairs;
};

// Two aligned text files, one sentence per line, tokens space-separated.
// The source side is ASCII-lowercased. Throws PairCountMismatch,
// EmptySentence.
ParallelCorpus load_parallel_corpus(std::istream& source, std::istream& target);

// Lexical translation probabilities t(target | source) over the pairs that
// co-occur in the training corpus. Source id 0 is the NULL token.
class TranslationTable {
public:
    // 0 when the pair never co-occurred.
    double prob(const std::string& source_word,
                const std::string& target_word) const;
    double prob_null(const std::string& target_word) const;

    // Observed targets for one source word with probabilities, for
    // normalization checks and serialization. Source "" denotes NULL.
    std::map<std::string, std::map<std::string, double>> rows() const;

    std::string serialize() const;  // TSV "source<TAB>target<TAB>prob"

private:
    friend struct Ibm1Trainer;

    std::vector<std::string> source_vocab_;  // [0] = NULL ("")
    std::vector<std::string> target_vocab_;
    std::map<std::string, std::size_t> source_ids_;
    std::map<std::string, std::size_t> target_ids_;
    // CSR over co-occurring pairs, ordered by (source id, target id).
    std::vector<std::size_t> row_begin_;  // size |source|+1
    std::vector<std::size_t> col_;        // target ids
    std::vector<double> t_;               // probabilities
};

struct Ibm1Result {
    TranslationTable table;
    // One entry per EM iteration, computed with that iteration's input
    // parameters; non-decreasing.
    std::vector<double> log_likelihood;
};

// EM for IBM Model 1 with a NULL source token prepended to every sentence.
// t starts uniform over co-occurring pairs. Expected counts are applied in
// (pair, target position, source position) order at any thread count, so
// serial and parallel runs produce bit-identical tables. Throws
// EmptyCorpus, LikelihoodDecreased.
Ibm1Result ibm1_train_serial(const ParallelCorpus& corpus, int iterations);
Ibm1Result ibm1_train(const ParallelCorpus& corpus, int iterations,
                      int threads = 1);

// Per sentence pair, links (i, j) with 0-based source index i (NULL
// excluded) and target index j; sorted ascending.
using LinkSet = std::vector<std::pair<int, int>>;

struct AlignmentTable {
    std::vector<LinkSet> pairs;
};

// Each target position links to the source position with maximal t; ties
// go to the smallest position. A position stays unlinked when NULL carries
// strictly more mass than every source token, or when no source token
// carries any mass at all.
AlignmentTable viterbi_align(const ParallelCorpus& corpus,
                             const TranslationTable& table);

// Pharaoh format: one line per pair, space-separated "i-j" links. Throws
// MalformedLink.
AlignmentTable read_alignment_file(std::istream& in);
std::string serialize_alignment(const AlignmentTable& alignment);

}  // namespace wsd::xling
