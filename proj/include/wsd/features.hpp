#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"

namespace wsd::feat {

enum class Composition { kSum, kAverage, kConcat, kOff };

const char* composition_name(Composition c);
Composition composition_from_name(const std::string& name);  // throws BadCompositionMode

struct FeatureConfig {
    int window = 7;  // odd; by default also the concat window
    // Signed (start,end) offset spans, joined lemmas at those offsets.
    std::vector<std::pair<int, int>> collocation_offsets = {
        {-2, -2}, {-1, -1}, {1, 1},  {2, 2},  {-2, -1}, {-1, 1},
        {1, 2},   {-3, -1}, {-2, 1}, {-1, 2}, {1, 3}};
    std::vector<int> pos_offsets = {-3, -2, -1, 0, 1, 2, 3};
    Composition composition = Composition::kSum;
    int concat_window = 0;  // 0 means "same as window"
    double sigma = 0.1;
    bool use_surrounding_words = true;
    bool use_collocations = true;
    bool use_pos = true;

    int effective_concat_window() const {
        return concat_window > 0 ? concat_window : window;
    }
};

// Hybrid of named binary features and a dense block. Binary names are
// sorted and unique; dense length is 0, d, or d*(concat_window-1)
// depending on the composition mode.
struct FeatureVector {
    std::vector<std::string> binary;
    std::vector<double> dense;
};

// "SW=<lemma>" for every distinct context lemma of the normalized context;
// only the target position is excluded.
std::set<std::string> surrounding_word_features(
    const corpus::NormalizedContext& context);

// "C[start,end]=<lemmas joined by _>" over the raw (unfiltered) token
// order; positions beyond the boundary contribute "^".
std::set<std::string> collocation_features(const corpus::Instance& instance,
                                           const FeatureConfig& config);

// "P[k]=<tag>" over the raw token order; out-of-bounds offsets yield
// "P[k]=^", empty tags yield no feature.
std::set<std::string> pos_features(const corpus::Instance& instance,
                                   const FeatureConfig& config);

// Dense context block. sum/average run over the normalized context
// (per-occurrence, target excluded, OOV skipped); concat takes the
// window positions nearest the target in raw order with zero vectors for
// boundary or OOV slots. Requires a scaled table (throws TableNotScaled).
std::vector<double> compose_embedding_context(
    const corpus::Instance& instance, const corpus::NormalizedContext& context,
    const emb::EmbeddingTable& table, const FeatureConfig& config);

// Dense block length implied by the config for a d-dimensional table.
std::size_t dense_length(const FeatureConfig& config, std::size_t d);

// Union of the enabled sparse families plus the dense block. `table` may
// be null only when composition is off.
FeatureVector assemble_features(const corpus::Instance& instance,
                                const corpus::NormalizedContext& context,
                                const emb::EmbeddingTable* table,
                                const FeatureConfig& config);

}  // namespace wsd::feat
