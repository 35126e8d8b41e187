#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/features.hpp"

namespace wsd::clf {

struct TrainConfig {
    double lambda = 1e-4;  // regularization; learning rate is 1/(lambda*t)
    int epochs = 50;
    std::uint64_t seed_base = 0;  // per-lemma seed = fnv1a64(lemma) ^ seed_base
};

// One-vs-rest linear model for a single lemma. Binary feature columns come
// first (indices from the sorted feature dictionary); the dense block
// occupies the trailing columns of every weight row.
struct LemmaModel {
    std::string lemma;
    std::vector<std::string> senses;  // inventory order
    std::map<std::string, std::size_t> feature_index;
    std::size_t dense_length = 0;
    std::vector<std::vector<double>> weights;  // |senses| x (features + dense)
    std::vector<double> bias;
    std::string mfs_sense;

    std::size_t columns() const { return feature_index.size() + dense_length; }
};

struct TrainingExample {
    feat::FeatureVector features;
    std::string label;
};

// Deterministic epoch-wise subgradient descent on the one-vs-rest hinge
// losses. The most frequent training label becomes mfs_sense (ties broken
// by inventory order). Throws EmptyTrainingSet, UnknownLabel.
LemmaModel train_lemma_model(const std::string& lemma,
                             const std::vector<TrainingExample>& examples,
                             const corpus::SenseInventory& inventory,
                             const TrainConfig& config);

struct ModelStore {
    feat::FeatureConfig feature_config;
    TrainConfig train_config;
    std::string embedding_provenance;
    std::size_t embedding_dim = 0;  // 0 when composition is off
    std::string stoplist_hash;
    std::map<std::string, LemmaModel> lemmas;
};

struct TrainReport {
    std::size_t n_lemmas = 0;
    std::size_t n_examples = 0;
    std::size_t skipped_unlabeled = 0;           // instances without gold
    std::map<std::string, std::string> errors;   // lemma -> "Code: message"
};

// Trains one model per lemma with training data. Per-lemma work is
// independent and seeded, so the result is identical for any thread count.
// Per-lemma failures are collected in the report; those lemmas are omitted.
ModelStore train_all(const std::map<std::string, std::vector<corpus::Instance>>& grouped,
                     const emb::EmbeddingTable* table,
                     const feat::FeatureConfig& fconfig,
                     const TrainConfig& tconfig,
                     const corpus::SenseInventory& inventory,
                     const std::unordered_set<std::string>& stoplist,
                     int threads = 1, TrainReport* report = nullptr);

struct Prediction {
    std::string sense;
    std::vector<double> scores;  // per-sense margins, model sense order
};

// Argmax of per-sense margins with ties broken by inventory order;
// features unseen at training time are ignored. Lemmas without a model
// fall back to the inventory's first sense. Throws LemmaUnknownEverywhere
// when neither a model nor an inventory entry exists.
Prediction predict(const ModelStore& store, const corpus::Instance& instance,
                   const emb::EmbeddingTable* table,
                   const corpus::SenseInventory& inventory,
                   const std::unordered_set<std::string>& stoplist);

std::vector<Prediction> predict_all(const ModelStore& store,
                                    const std::vector<corpus::Instance>& instances,
                                    const emb::EmbeddingTable* table,
                                    const corpus::SenseInventory& inventory,
                                    const std::unordered_set<std::string>& stoplist,
                                    int threads = 1);

// First-sense baseline. Throws MissingLemma.
std::vector<std::pair<std::string, std::string>> mfs_predict(
    const corpus::SenseInventory& inventory,
    const std::vector<corpus::Instance>& instances);

// Versioned JSON document with floats at 17 significant digits. The
// serialization is canonical: identical stores produce identical bytes.
std::string serialize_model_store(const ModelStore& store);
ModelStore parse_model_store(const std::string& text);

// Inventory implied by the store (per-lemma sense lists).
corpus::SenseInventory store_inventory(const ModelStore& store);

}  // namespace wsd::clf
