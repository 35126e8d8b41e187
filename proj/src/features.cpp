#include "wsd/features.hpp"

#include <algorithm>

#include "wsd/error.hpp"

namespace wsd::feat {

const char* composition_name(Composition c) {
    switch (c) {
        case Composition::kSum: return "sum";
        case Composition::kAverage: return "average";
        case Composition::kConcat: return "concat";
        case Composition::kOff: return "off";
    }
    return "off";
}

Composition composition_from_name(const std::string& name) {
    if (name == "sum") return Composition::kSum;
    if (name == "average") return Composition::kAverage;
    if (name == "concat") return Composition::kConcat;
    if (name == "off") return Composition::kOff;
    throw Error("BadCompositionMode", name);
}

std::set<std::string> surrounding_word_features(
    const corpus::NormalizedContext& context) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < context.tokens.size(); ++i) {
        if (i == context.target_index) continue;
        out.insert("SW=" + context.tokens[i].lemma);
    }
    return out;
}

namespace {

// Lemma at signed offset from the target, "^" beyond the boundary.
std::string lemma_at_offset(const corpus::Instance& inst, int offset) {
    const long long pos = static_cast<long long>(inst.target_index) + offset;
    if (pos < 0 || pos >= static_cast<long long>(inst.tokens.size())) return "^";
    return inst.tokens[static_cast<std::size_t>(pos)].lemma;
}

}  // namespace

std::set<std::string> collocation_features(const corpus::Instance& instance,
                                           const FeatureConfig& config) {
    std::set<std::string> out;
    for (const auto& [start, end] : config.collocation_offsets) {
        std::string joined;
        for (int k = start; k <= end; ++k) {
            if (k != start) joined += '_';
            joined += lemma_at_offset(instance, k);
        }
        out.insert("C[" + std::to_string(start) + "," + std::to_string(end) +
                   "]=" + joined);
    }
    return out;
}

std::set<std::string> pos_features(const corpus::Instance& instance,
                                   const FeatureConfig& config) {
    std::set<std::string> out;
    for (int k : config.pos_offsets) {
        const long long pos = static_cast<long long>(instance.target_index) + k;
        std::string tag;
        if (pos < 0 || pos >= static_cast<long long>(instance.tokens.size())) {
            tag = "^";
        } else {
            tag = instance.tokens[static_cast<std::size_t>(pos)].pos;
            if (tag.empty()) continue;  // untagged position yields no feature
        }
        out.insert("P[" + std::to_string(k) + "]=" + tag);
    }
    return out;
}

std::size_t dense_length(const FeatureConfig& config, std::size_t d) {
    switch (config.composition) {
        case Composition::kOff: return 0;
        case Composition::kSum:
        case Composition::kAverage: return d;
        case Composition::kConcat:
            return d * static_cast<std::size_t>(config.effective_concat_window() - 1);
    }
    return 0;
}

std::vector<double> compose_embedding_context(
    const corpus::Instance& instance, const corpus::NormalizedContext& context,
    const emb::EmbeddingTable& table, const FeatureConfig& config) {
    if (config.composition == Composition::kOff) return {};
    if (!table.scaled_sigma().has_value()) {
        throw Error("TableNotScaled",
                    "embedding table must be scaled before composition");
    }
    const std::size_t d = table.dimension();

    if (config.composition == Composition::kConcat) {
        const int w = config.effective_concat_window();
        if (w < 3 || w % 2 == 0) {
            throw Error("BadWindow",
                        "concat window must be odd and >= 3, got " +
                            std::to_string(w));
        }
        const int half = (w - 1) / 2;
        std::vector<double> out(d * static_cast<std::size_t>(w - 1), 0.0);
        std::size_t slot = 0;
        for (int k = -half; k <= half; ++k) {
            if (k == 0) continue;
            const long long pos =
                static_cast<long long>(instance.target_index) + k;
            if (pos >= 0 && pos < static_cast<long long>(instance.tokens.size())) {
                auto vec =
                    table.lookup(instance.tokens[static_cast<std::size_t>(pos)].lemma);
                if (vec) {
                    std::copy(vec->begin(), vec->end(),
                              out.begin() + static_cast<std::ptrdiff_t>(slot * d));
                }
            }
            ++slot;
        }
        return out;
    }

    // sum / average over the normalized context, one contribution per token
    // occurrence found in the table.
    std::vector<double> out(d, 0.0);
    std::size_t contributors = 0;
    for (std::size_t i = 0; i < context.tokens.size(); ++i) {
        if (i == context.target_index) continue;
        auto vec = table.lookup(context.tokens[i].lemma);
        if (!vec) continue;
        for (std::size_t c = 0; c < d; ++c) out[c] += (*vec)[c];
        ++contributors;
    }
    if (config.composition == Composition::kAverage && contributors > 0) {
        for (double& v : out) v /= static_cast<double>(contributors);
    }
    return out;
}

FeatureVector assemble_features(const corpus::Instance& instance,
                                const corpus::NormalizedContext& context,
                                const emb::EmbeddingTable* table,
                                const FeatureConfig& config) {
    std::set<std::string> names;
    if (config.use_surrounding_words) {
        auto sw = surrounding_word_features(context);
        names.insert(sw.begin(), sw.end());
    }
    if (config.use_collocations) {
        auto col = collocation_features(instance, config);
        names.insert(col.begin(), col.end());
    }
    if (config.use_pos) {
        auto pos = pos_features(instance, config);
        names.insert(pos.begin(), pos.end());
    }
    FeatureVector out;
    out.binary.assign(names.begin(), names.end());
    if (config.composition != Composition::kOff) {
        if (table == nullptr) {
            throw Error("TableNotScaled",
                        "composition enabled but no embedding table given");
        }
        out.dense = compose_embedding_context(instance, context, *table, config);
    }
    return out;
}

}  // namespace wsd::feat
