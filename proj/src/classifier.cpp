#include "wsd/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "wsd/error.hpp"
#include "wsd/parallel.hpp"
#include "wsd/util.hpp"

namespace wsd::clf {

namespace {

// Deterministic Fisher-Yates; mt19937_64 output is fully specified by the
// standard, unlike std::shuffle / uniform_int_distribution.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

struct SparseExample {
    std::vector<std::pair<std::size_t, double>> values;  // (column, value)
    std::size_t label_rank = 0;                          // index into senses
};

double dot(const std::vector<double>& w, const SparseExample& x) {
    double s = 0.0;
    for (const auto& [col, v] : x.values) s += w[col] * v;
    return s;
}

}  // namespace

LemmaModel train_lemma_model(const std::string& lemma,
                             const std::vector<TrainingExample>& examples,
                             const corpus::SenseInventory& inventory,
                             const TrainConfig& config) {
    if (examples.empty()) throw Error("EmptyTrainingSet", lemma);
    auto inv_it = inventory.senses.find(lemma);
    if (inv_it == inventory.senses.end() || inv_it->second.empty()) {
        throw Error("UnknownLabel", lemma + ": lemma missing from inventory");
    }
    const std::vector<std::string>& senses = inv_it->second;

    LemmaModel model;
    model.lemma = lemma;
    model.senses = senses;

    // Sorted feature dictionary; dense block in the trailing columns.
    std::set<std::string> names;
    std::size_t dense_len = 0;
    for (const auto& ex : examples) {
        names.insert(ex.features.binary.begin(), ex.features.binary.end());
        dense_len = std::max(dense_len, ex.features.dense.size());
    }
    std::size_t next = 0;
    for (const auto& n : names) model.feature_index.emplace(n, next++);
    model.dense_length = dense_len;
    const std::size_t columns = model.columns();

    std::vector<SparseExample> sparse(examples.size());
    std::vector<std::size_t> label_counts(senses.size(), 0);
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        auto rank = std::find(senses.begin(), senses.end(), ex.label);
        if (rank == senses.end()) {
            throw Error("UnknownLabel", lemma + ": '" + ex.label + "'");
        }
        sparse[i].label_rank = static_cast<std::size_t>(rank - senses.begin());
        ++label_counts[sparse[i].label_rank];
        for (const auto& name : ex.features.binary) {
            sparse[i].values.emplace_back(model.feature_index.at(name), 1.0);
        }
        if (ex.features.dense.size() != dense_len && !ex.features.dense.empty()) {
            throw Error("DenseLengthMismatch",
                        lemma + ": inconsistent dense block length");
        }
        for (std::size_t k = 0; k < ex.features.dense.size(); ++k) {
            sparse[i].values.emplace_back(names.size() + k, ex.features.dense[k]);
        }
    }

    // Most frequent training label; ties by inventory order.
    std::size_t best = 0;
    for (std::size_t s = 1; s < senses.size(); ++s) {
        if (label_counts[s] > label_counts[best]) best = s;
    }
    model.mfs_sense = senses[best];

    model.weights.assign(senses.size(), std::vector<double>(columns, 0.0));
    model.bias.assign(senses.size(), 0.0);
    if (senses.size() == 1) return model;  // monosemous: constant model

    // Fixed per-epoch shuffles from the per-lemma seed; shared across the
    // one-vs-rest subproblems so training is order-independent.
    std::mt19937_64 rng(util::fnv1a64(lemma) ^ config.seed_base);
    std::vector<std::vector<std::size_t>> perms(
        static_cast<std::size_t>(config.epochs));
    for (auto& perm : perms) {
        perm.resize(sparse.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        shuffle_indices(perm, rng);
    }

    for (std::size_t s = 0; s < senses.size(); ++s) {
        std::vector<double>& w = model.weights[s];
        double& b = model.bias[s];  // regularized constant-feature column
        double t = 0.0;
        for (const auto& perm : perms) {
            for (std::size_t idx : perm) {
                t += 1.0;
                const SparseExample& x = sparse[idx];
                const double y = (x.label_rank == s) ? 1.0 : -1.0;
                const double margin = y * (dot(w, x) + b);
                const double decay = 1.0 - 1.0 / t;  // = 1 - eta*lambda
                for (double& wc : w) wc *= decay;
                b *= decay;
                if (margin < 1.0) {
                    const double eta = 1.0 / (config.lambda * t);
                    for (const auto& [col, v] : x.values) w[col] += eta * y * v;
                    b += eta * y;
                }
            }
        }
    }
    return model;
}

namespace {

std::vector<TrainingExample> examples_for_lemma(
    const std::vector<corpus::Instance>& instances,
    const emb::EmbeddingTable* table, const feat::FeatureConfig& fconfig,
    const std::unordered_set<std::string>& stoplist, std::size_t* skipped) {
    std::vector<TrainingExample> out;
    for (const auto& inst : instances) {
        if (inst.gold.empty()) {
            if (skipped) ++(*skipped);
            continue;
        }
        auto norm = corpus::normalize_tokens(inst, stoplist);
        auto fv = feat::assemble_features(inst, norm, table, fconfig);
        // One example per gold sense; multi-label training instances count
        // toward each of their senses.
        for (const auto& sense : inst.gold) {
            out.push_back({fv, sense});
        }
    }
    return out;
}

}  // namespace

ModelStore train_all(const std::map<std::string, std::vector<corpus::Instance>>& grouped,
                     const emb::EmbeddingTable* table,
                     const feat::FeatureConfig& fconfig,
                     const TrainConfig& tconfig,
                     const corpus::SenseInventory& inventory,
                     const std::unordered_set<std::string>& stoplist,
                     int threads, TrainReport* report) {
    if (fconfig.composition != feat::Composition::kOff && table == nullptr) {
        throw Error("TableNotScaled",
                    "composition enabled but no embedding table given");
    }
    ModelStore store;
    store.feature_config = fconfig;
    store.train_config = tconfig;
    store.stoplist_hash = corpus::stoplist_hash(stoplist);
    if (table != nullptr) {
        store.embedding_provenance = table->provenance();
        if (fconfig.composition != feat::Composition::kOff) {
            if (!table->scaled_sigma().has_value()) {
                throw Error("TableNotScaled",
                            "embedding table must be scaled before training");
            }
            if (*table->scaled_sigma() != fconfig.sigma) {
                throw Error("SigmaMismatch",
                            "table scaled to " +
                                util::format_g17(*table->scaled_sigma()) +
                                ", config sigma " + util::format_g17(fconfig.sigma));
            }
            store.embedding_dim = table->dimension();
        }
    }

    std::vector<const std::string*> lemmas;
    std::vector<const std::vector<corpus::Instance>*> groups;
    for (const auto& [lemma, instances] : grouped) {
        lemmas.push_back(&lemma);
        groups.push_back(&instances);
    }

    struct Slot {
        std::optional<LemmaModel> model;
        std::string error;
        std::size_t n_examples = 0;
        std::size_t skipped = 0;
    };
    std::vector<Slot> slots(lemmas.size());

    par::for_each_index(lemmas.size(), threads, [&](std::size_t i) {
        Slot& slot = slots[i];
        try {
            auto examples = examples_for_lemma(*groups[i], table, fconfig,
                                               stoplist, &slot.skipped);
            slot.n_examples = examples.size();
            if (examples.empty()) return;  // no labeled data: lemma omitted
            slot.model =
                train_lemma_model(*lemmas[i], examples, inventory, tconfig);
        } catch (const Error& e) {
            slot.error = e.code() + ": " + e.what();
        }
    });

    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (report) {
            report->n_examples += slots[i].n_examples;
            report->skipped_unlabeled += slots[i].skipped;
            if (!slots[i].error.empty()) report->errors[*lemmas[i]] = slots[i].error;
        }
        if (slots[i].model) {
            store.lemmas.emplace(*lemmas[i], std::move(*slots[i].model));
        }
    }
    if (report) report->n_lemmas = store.lemmas.size();
    return store;
}

namespace {

Prediction predict_with_model(const LemmaModel& model,
                              const corpus::Instance& instance,
                              const emb::EmbeddingTable* table,
                              const ModelStore& store,
                              const std::unordered_set<std::string>& stoplist) {
    auto norm = corpus::normalize_tokens(instance, stoplist);
    auto fv = feat::assemble_features(instance, norm, table,
                                      store.feature_config);
    if (fv.dense.size() != model.dense_length) {
        throw Error("EmbeddingDimMismatch",
                    "model expects dense block of " +
                        std::to_string(model.dense_length) + ", got " +
                        std::to_string(fv.dense.size()));
    }
    const std::size_t n_bin = model.feature_index.size();
    Prediction out;
    out.scores.resize(model.senses.size(), 0.0);
    for (std::size_t s = 0; s < model.senses.size(); ++s) {
        double m = model.bias[s];
        const auto& w = model.weights[s];
        for (const auto& name : fv.binary) {
            auto it = model.feature_index.find(name);
            if (it != model.feature_index.end()) m += w[it->second];
        }
        for (std::size_t k = 0; k < fv.dense.size(); ++k) {
            m += w[n_bin + k] * fv.dense[k];
        }
        out.scores[s] = m;
    }
    std::size_t best = 0;
    for (std::size_t s = 1; s < out.scores.size(); ++s) {
        if (out.scores[s] > out.scores[best]) best = s;  // ties keep first
    }
    out.sense = model.senses[best];
    return out;
}

}  // namespace

Prediction predict(const ModelStore& store, const corpus::Instance& instance,
                   const emb::EmbeddingTable* table,
                   const corpus::SenseInventory& inventory,
                   const std::unordered_set<std::string>& stoplist) {
    auto it = store.lemmas.find(instance.target_lemma);
    if (it != store.lemmas.end()) {
        return predict_with_model(it->second, instance, table, store, stoplist);
    }
    auto inv_it = inventory.senses.find(instance.target_lemma);
    if (inv_it == inventory.senses.end() || inv_it->second.empty()) {
        throw Error("LemmaUnknownEverywhere", instance.target_lemma);
    }
    return {inv_it->second.front(), {}};
}

std::vector<Prediction> predict_all(const ModelStore& store,
                                    const std::vector<corpus::Instance>& instances,
                                    const emb::EmbeddingTable* table,
                                    const corpus::SenseInventory& inventory,
                                    const std::unordered_set<std::string>& stoplist,
                                    int threads) {
    std::vector<Prediction> out(instances.size());
    std::vector<std::string> errors(instances.size());
    par::for_each_index(instances.size(), threads, [&](std::size_t i) {
        try {
            out[i] = predict(store, instances[i], table, inventory, stoplist);
        } catch (const Error& e) {
            errors[i] = e.code() + "\x1f" + e.what();
        }
    });
    for (const auto& err : errors) {
        if (!err.empty()) {
            const auto sep = err.find('\x1f');
            throw Error(err.substr(0, sep), err.substr(sep + 1));
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> mfs_predict(
    const corpus::SenseInventory& inventory,
    const std::vector<corpus::Instance>& instances) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) {
        out.emplace_back(inst.id, inventory.first_sense(inst.target_lemma));
    }
    return out;
}

corpus::SenseInventory store_inventory(const ModelStore& store) {
    corpus::SenseInventory inv;
    for (const auto& [lemma, model] : store.lemmas) {
        inv.senses[lemma] = model.senses;
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Serialization. Hand-rolled writer so floats are printed with 17
// significant digits and key order is canonical.

namespace {

void write_feature_config(std::string& out, const feat::FeatureConfig& c,
                          std::size_t embedding_dim,
                          const std::string& stoplist_hash) {
    out += "{\"window\":" + std::to_string(c.window);
    out += ",\"collocation_offsets\":[";
    for (std::size_t i = 0; i < c.collocation_offsets.size(); ++i) {
        if (i) out += ',';
        out += '[' + std::to_string(c.collocation_offsets[i].first) + ',' +
               std::to_string(c.collocation_offsets[i].second) + ']';
    }
    out += "],\"pos_offsets\":[";
    for (std::size_t i = 0; i < c.pos_offsets.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(c.pos_offsets[i]);
    }
    out += "],\"composition\":\"";
    out += feat::composition_name(c.composition);
    out += "\",\"concat_window\":" + std::to_string(c.effective_concat_window());
    out += ",\"sigma\":" + util::format_g17(c.sigma);
    out += ",\"use_surrounding_words\":";
    out += c.use_surrounding_words ? "true" : "false";
    out += ",\"use_collocations\":";
    out += c.use_collocations ? "true" : "false";
    out += ",\"use_pos\":";
    out += c.use_pos ? "true" : "false";
    out += ",\"embedding_dim\":" + std::to_string(embedding_dim);
    out += ",\"stoplist_hash\":\"" + util::json_escape(stoplist_hash) + "\"}";
}

}  // namespace

std::string serialize_model_store(const ModelStore& store) {
    std::string out = "{\"version\":1";
    out += ",\"feature_config\":";
    write_feature_config(out, store.feature_config, store.embedding_dim,
                         store.stoplist_hash);
    out += ",\"train_config\":{\"lambda\":" +
           util::format_g17(store.train_config.lambda);
    out += ",\"epochs\":" + std::to_string(store.train_config.epochs);
    out += ",\"seed_base\":" + std::to_string(store.train_config.seed_base) + "}";
    out += ",\"embedding_provenance\":\"" +
           util::json_escape(store.embedding_provenance) + "\"";
    out += ",\"sigma\":" + util::format_g17(store.feature_config.sigma);
    out += ",\"lemmas\":{";
    bool first_lemma = true;
    for (const auto& [lemma, model] : store.lemmas) {
        if (!first_lemma) out += ',';
        first_lemma = false;
        out += '"' + util::json_escape(lemma) + "\":{\"senses\":[";
        for (std::size_t s = 0; s < model.senses.size(); ++s) {
            if (s) out += ',';
            out += '"' + util::json_escape(model.senses[s]) + '"';
        }
        out += "],\"features\":{";
        bool first_feat = true;
        for (const auto& [name, idx] : model.feature_index) {
            if (!first_feat) out += ',';
            first_feat = false;
            out += '"' + util::json_escape(name) + "\":" + std::to_string(idx);
        }
        out += "},\"weights\":[";
        for (std::size_t s = 0; s < model.weights.size(); ++s) {
            if (s) out += ',';
            out += '[';
            for (std::size_t c = 0; c < model.weights[s].size(); ++c) {
                if (c) out += ',';
                out += util::format_g17(model.weights[s][c]);
            }
            out += ']';
        }
        out += "],\"bias\":[";
        for (std::size_t s = 0; s < model.bias.size(); ++s) {
            if (s) out += ',';
            out += util::format_g17(model.bias[s]);
        }
        out += "],\"mfs\":\"" + util::json_escape(model.mfs_sense) + "\"}";
    }
    out += "}}\n";
    return out;
}

ModelStore parse_model_store(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("MalformedModelStore", e.what());
    }
    if (!j.is_object() || !j.contains("version") || j["version"] != 1) {
        throw Error("MalformedModelStore", "missing or unsupported version");
    }
    ModelStore store;
    try {
        const auto& fc = j.at("feature_config");
        auto& c = store.feature_config;
        c.window = fc.at("window").get<int>();
        c.collocation_offsets.clear();
        for (const auto& p : fc.at("collocation_offsets")) {
            c.collocation_offsets.emplace_back(p.at(0).get<int>(),
                                               p.at(1).get<int>());
        }
        c.pos_offsets = fc.at("pos_offsets").get<std::vector<int>>();
        c.composition =
            feat::composition_from_name(fc.at("composition").get<std::string>());
        c.concat_window = fc.at("concat_window").get<int>();
        c.sigma = fc.at("sigma").get<double>();
        c.use_surrounding_words = fc.at("use_surrounding_words").get<bool>();
        c.use_collocations = fc.at("use_collocations").get<bool>();
        c.use_pos = fc.at("use_pos").get<bool>();
        store.embedding_dim = fc.at("embedding_dim").get<std::size_t>();
        store.stoplist_hash = fc.at("stoplist_hash").get<std::string>();

        const auto& tc = j.at("train_config");
        store.train_config.lambda = tc.at("lambda").get<double>();
        store.train_config.epochs = tc.at("epochs").get<int>();
        store.train_config.seed_base = tc.at("seed_base").get<std::uint64_t>();

        store.embedding_provenance =
            j.at("embedding_provenance").get<std::string>();

        for (const auto& [lemma, mj] : j.at("lemmas").items()) {
            LemmaModel m;
            m.lemma = lemma;
            m.senses = mj.at("senses").get<std::vector<std::string>>();
            for (const auto& [name, idx] : mj.at("features").items()) {
                m.feature_index.emplace(name, idx.get<std::size_t>());
            }
            m.weights = mj.at("weights").get<std::vector<std::vector<double>>>();
            m.bias = mj.at("bias").get<std::vector<double>>();
            m.mfs_sense = mj.at("mfs").get<std::string>();
            if (m.weights.size() != m.senses.size() ||
                m.bias.size() != m.senses.size()) {
                throw Error("MalformedModelStore",
                            "lemma '" + lemma + "': shape mismatch");
            }
            if (!m.weights.empty()) {
                if (m.weights[0].size() < m.feature_index.size()) {
                    throw Error("MalformedModelStore",
                                "lemma '" + lemma + "': weight row too short");
                }
                m.dense_length = m.weights[0].size() - m.feature_index.size();
            }
            store.lemmas.emplace(lemma, std::move(m));
        }
    } catch (const json::exception& e) {
        throw Error("MalformedModelStore", e.what());
    }
    return store;
}

}  // namespace wsd::clf
