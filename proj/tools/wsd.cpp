// wsd — batch command-line surface for the disambiguation toolkit.
//
// Exit status: 0 success, 1 data error (module error name on stderr),
// 2 usage error. Diagnostics go to stderr only. Every file-writing
// subcommand leaves a machine-readable run report next to its primary
// output; subcommands that print JSON embed the same report under "run".

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsd/alignment.hpp"
#include "wsd/classifier.hpp"
#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/error.hpp"
#include "wsd/evaluation.hpp"
#include "wsd/features.hpp"
#include "wsd/util.hpp"
#include "wsd/version.hpp"
#include "wsd/xling.hpp"

namespace {

using nlohmann::json;
using namespace wsd;

constexpr int kUsageError = 2;
constexpr int kDataError = 1;

const CLI::Validator OddWindow(
    [](std::string& value) -> std::string {
        int v = 0;
        try {
            v = std::stoi(value);
        } catch (...) {
            return "not an integer";
        }
        if (v < 1 || v % 2 == 0) return "window sizes must be odd and >= 1";
        return {};
    },
    "ODD");

// 0 stands for "inherit --window".
const CLI::Validator OddWindowOrZero(
    [](std::string& value) -> std::string {
        int v = 0;
        try {
            v = std::stoi(value);
        } catch (...) {
            return "not an integer";
        }
        if (v == 0) return {};
        if (v < 1 || v % 2 == 0) return "window sizes must be odd and >= 1";
        return {};
    },
    "ODD|0");

struct InputRegistry {
    json hashes = json::object();
    std::string read(const std::string& path) {
        std::string bytes = util::read_file(path);
        hashes[path] = util::content_hash(bytes);
        return bytes;
    }
};

json make_run_report(const std::string& subcommand, const InputRegistry& inputs,
                     const json& config, const json& counts) {
    json run;
    run["version"] = kVersion;
    run["subcommand"] = subcommand;
    run["inputs"] = inputs.hashes;
    run["config"] = config;
    run["config_hash"] = util::content_hash(config.dump());
    run["counts"] = counts;
    return run;
}

// Primary output plus its sidecar report; the report records the hash of
// everything written.
struct OutputSet {
    json written = json::object();

    void write(const std::string& path, const std::string& content) {
        util::write_file(path, content);
        written[path] = util::content_hash(content);
    }

    void finish(const std::string& primary_path, json run) {
        run["outputs"] = written;
        util::write_file(primary_path + ".report.json", run.dump(2) + "\n");
    }
};

void emit_document(const json& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        util::write_file(out_path, text);
    }
}

// --config file values act as defaults: any long option the user did not
// pass explicitly picks up the config value. Unknown keys are usage errors.
void apply_config_file(CLI::App* cmd, const std::string& config_path,
                       InputRegistry& inputs) {
    if (config_path.empty()) return;
    json cfg;
    try {
        cfg = json::parse(inputs.read(config_path));
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", e.what());
    }
    if (!cfg.is_object()) {
        throw CLI::ValidationError("--config",
                                   "config file must be a JSON object");
    }
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw CLI::ValidationError("--config",
                                       "unknown config key '" + key + "'");
        }
        if (opt->count() > 0) continue;  // explicit flag wins
        if (value.is_boolean()) {
            if (!value.get<bool>()) continue;
            opt->add_result("true");
        } else if (value.is_string()) {
            opt->add_result(value.get<std::string>());
        } else {
            opt->add_result(value.dump());
        }
        opt->run_callback();  // push the value into the bound variable
    }
}

corpus::SenseInventory merged_fallback_inventory(
    const clf::ModelStore& store, const std::string& inventory_path,
    InputRegistry& inputs) {
    corpus::SenseInventory inv = clf::store_inventory(store);
    if (!inventory_path.empty()) {
        std::istringstream in(inputs.read(inventory_path));
        auto extra = corpus::load_inventory(in);
        for (auto& [lemma, senses] : extra.senses) {
            inv.senses[lemma] = senses;  // explicit file wins
        }
    }
    return inv;
}

std::unordered_set<std::string> resolve_stoplist(const std::string& path,
                                                 InputRegistry& inputs) {
    if (path.empty()) return corpus::default_stoplist();
    std::istringstream in(inputs.read(path));
    return corpus::load_stoplist(in);
}

emb::VectorFormat vector_format(const std::string& name) {
    if (name == "plain") return emb::VectorFormat::kPlain;
    if (name == "header") return emb::VectorFormat::kHeader;
    throw Error("BadVectorFormat", name);
}

json feature_config_json(const feat::FeatureConfig& c) {
    json offsets = json::array();
    for (const auto& [s, e] : c.collocation_offsets) offsets.push_back({s, e});
    return {{"window", c.window},
            {"collocation_offsets", offsets},
            {"pos_offsets", c.pos_offsets},
            {"composition", feat::composition_name(c.composition)},
            {"concat_window", c.effective_concat_window()},
            {"sigma", c.sigma},
            {"use_surrounding_words", c.use_surrounding_words},
            {"use_collocations", c.use_collocations},
            {"use_pos", c.use_pos}};
}

// ---------------------------------------------------------------------------

struct ScaleArgs {
    std::string input, output, format = "plain", config;
    double sigma = 0.1;
    int threads = 0;
};

int run_scale(const ScaleArgs& a, InputRegistry& inputs) {
    std::istringstream in(inputs.read(a.input));
    auto table = emb::load_embeddings(in, vector_format(a.format), a.input);
    auto scaled = emb::scale_embeddings(table, a.sigma, a.threads);

    OutputSet outputs;
    outputs.write(a.output, emb::serialize_embeddings(scaled));
    json config{{"sigma", a.sigma}, {"format", a.format}, {"threads", a.threads}};
    json counts{{"entries", scaled.size()}, {"dimension", scaled.dimension()}};
    outputs.finish(a.output,
                   make_run_report("scale-embeddings", inputs, config, counts));
    return 0;
}

struct TrainArgs {
    std::string instances, embeddings, output, stoplist, format = "plain",
        config;
    double sigma = 0.1, lambda = 1e-4;
    int window = 7, concat_window = 0, epochs = 50, threads = 0;
    std::uint64_t seed = 0;
    std::string composition = "sum";
    bool no_sw = false, no_colloc = false, no_pos = false;
};

int run_train(const TrainArgs& a, InputRegistry& inputs) {
    feat::FeatureConfig fconfig;
    fconfig.window = a.window;
    fconfig.concat_window = a.concat_window;
    fconfig.sigma = a.sigma;
    fconfig.composition = feat::composition_from_name(a.composition);
    fconfig.use_surrounding_words = !a.no_sw;
    fconfig.use_collocations = !a.no_colloc;
    fconfig.use_pos = !a.no_pos;

    clf::TrainConfig tconfig;
    tconfig.lambda = a.lambda;
    tconfig.epochs = a.epochs;
    tconfig.seed_base = a.seed;

    auto stoplist = resolve_stoplist(a.stoplist, inputs);

    std::istringstream inst_in(inputs.read(a.instances));
    auto instances = corpus::parse_instances(inst_in);

    std::optional<emb::EmbeddingTable> table;
    if (fconfig.composition != feat::Composition::kOff) {
        if (a.embeddings.empty()) {
            throw Error("TableNotScaled",
                        "--embeddings is required unless --composition off");
        }
        std::istringstream emb_in(inputs.read(a.embeddings));
        auto raw = emb::load_embeddings(emb_in, vector_format(a.format),
                                        a.embeddings);
        // Idempotent on pre-scaled input (changes below 1e-12).
        table = emb::scale_embeddings(raw, fconfig.sigma, a.threads);
    }

    auto grouped = corpus::group_by_lemma(instances);
    auto inventory = corpus::build_inventory(instances);
    clf::TrainReport report;
    auto store =
        clf::train_all(grouped, table ? &*table : nullptr, fconfig, tconfig,
                       inventory, stoplist, a.threads, &report);
    for (const auto& [lemma, message] : report.errors) {
        std::cerr << "warning: lemma '" << lemma << "': " << message << "\n";
    }
    if (store.lemmas.empty() && !report.errors.empty()) {
        const auto& [lemma, message] = *report.errors.begin();
        const auto colon = message.find(':');
        throw Error(message.substr(0, colon),
                    "no lemma trained; first failure on '" + lemma + "': " +
                        message.substr(colon + 2));
    }

    OutputSet outputs;
    outputs.write(a.output, clf::serialize_model_store(store));
    json config{{"feature_config", feature_config_json(fconfig)},
                {"train_config",
                 {{"lambda", tconfig.lambda},
                  {"epochs", tconfig.epochs},
                  {"seed_base", tconfig.seed_base}}},
                {"stoplist_hash", store.stoplist_hash},
                {"threads", a.threads}};
    json errors = json::object();
    for (const auto& [lemma, message] : report.errors) errors[lemma] = message;
    json counts{{"instances", instances.size()},
                {"lemmas_trained", store.lemmas.size()},
                {"examples", report.n_examples},
                {"skipped_unlabeled", report.skipped_unlabeled},
                {"lemma_errors", errors}};
    outputs.finish(a.output, make_run_report("train", inputs, config, counts));
    return 0;
}

struct PredictArgs {
    std::string model, instances, embeddings, inventory, stoplist,
        format = "plain", output, config;
    bool mfs = false;
    int threads = 0;
};

int run_predict(const PredictArgs& a, InputRegistry& inputs) {
    auto store = clf::parse_model_store(inputs.read(a.model));
    std::istringstream inst_in(inputs.read(a.instances));
    auto instances = corpus::parse_instances(inst_in);

    auto stoplist = resolve_stoplist(a.stoplist, inputs);
    if (corpus::stoplist_hash(stoplist) != store.stoplist_hash) {
        throw Error("StoplistMismatch",
                    "active stoplist differs from the one the model was "
                    "trained with; pass the same --stoplist");
    }
    auto inventory = merged_fallback_inventory(store, a.inventory, inputs);

    std::vector<std::pair<std::string, std::string>> ordered;
    std::size_t fallbacks = 0;
    if (a.mfs) {
        ordered = clf::mfs_predict(inventory, instances);
    } else {
        std::optional<emb::EmbeddingTable> table;
        if (store.feature_config.composition != feat::Composition::kOff) {
            if (a.embeddings.empty()) {
                throw Error("TableNotScaled",
                            "model uses composition; pass --embeddings");
            }
            std::istringstream emb_in(inputs.read(a.embeddings));
            auto raw = emb::load_embeddings(emb_in, vector_format(a.format),
                                            a.embeddings);
            table = emb::scale_embeddings(raw, store.feature_config.sigma,
                                          a.threads);
            if (table->dimension() != store.embedding_dim) {
                throw Error("EmbeddingDimMismatch",
                            "model was trained with d=" +
                                std::to_string(store.embedding_dim) +
                                ", table has d=" +
                                std::to_string(table->dimension()));
            }
        }
        auto predictions =
            clf::predict_all(store, instances, table ? &*table : nullptr,
                             inventory, stoplist, a.threads);
        ordered.reserve(instances.size());
        for (std::size_t i = 0; i < instances.size(); ++i) {
            if (!store.lemmas.count(instances[i].target_lemma)) ++fallbacks;
            ordered.emplace_back(instances[i].id, predictions[i].sense);
        }
    }

    OutputSet outputs;
    outputs.write(a.output, eval::serialize_predictions(ordered));
    json config{{"mfs", a.mfs}, {"threads", a.threads}};
    json counts{{"instances", instances.size()}, {"fallbacks", fallbacks}};
    outputs.finish(a.output, make_run_report("predict", inputs, config, counts));
    return 0;
}

struct ScoreArgs {
    std::string pred, gold, coarse, output, config;
    bool exclude_proper_nouns = false;
};

json score_report_json(const eval::ScoreReport& r) {
    json per_lemma = json::object();
    for (const auto& [lemma, pl] : r.per_lemma) {
        per_lemma[lemma] = {{"n", pl.n}, {"correct", pl.correct}};
    }
    return {{"n_scored", r.n_scored},
            {"n_correct", r.n_correct},
            {"accuracy", r.accuracy},
            {"per_lemma", per_lemma}};
}

int run_score(const ScoreArgs& a, InputRegistry& inputs) {
    std::istringstream pred_in(inputs.read(a.pred));
    auto predictions = eval::parse_predictions(pred_in);
    std::istringstream gold_in(inputs.read(a.gold));
    auto gold = eval::gold_from_instances(corpus::parse_instances(gold_in),
                                          a.exclude_proper_nouns);
    eval::ScoreReport report;
    const bool coarse = !a.coarse.empty();
    if (coarse) {
        std::istringstream coarse_in(inputs.read(a.coarse));
        report = eval::score_coarse(predictions, gold,
                                    eval::load_coarse_map(coarse_in));
    } else {
        report = eval::score_fine(predictions, gold);
    }

    json config{{"coarse", coarse},
                {"exclude_proper_nouns", a.exclude_proper_nouns}};
    json counts{{"predictions", predictions.size()}, {"gold", gold.size()}};
    json doc = score_report_json(report);
    doc["run"] = make_run_report("score", inputs, config, counts);
    emit_document(doc, a.output);
    return 0;
}

struct McNemarArgs {
    std::string pred_a, pred_b, gold, output, config;
    bool exclude_proper_nouns = false;
};

int run_mcnemar(const McNemarArgs& a, InputRegistry& inputs) {
    std::istringstream a_in(inputs.read(a.pred_a));
    auto pa = eval::parse_predictions(a_in);
    std::istringstream b_in(inputs.read(a.pred_b));
    auto pb = eval::parse_predictions(b_in);
    std::istringstream gold_in(inputs.read(a.gold));
    auto gold = eval::gold_from_instances(corpus::parse_instances(gold_in),
                                          a.exclude_proper_nouns);
    auto r = eval::mcnemar_test(pa, pb, gold);

    json config{{"exclude_proper_nouns", a.exclude_proper_nouns}};
    json counts{{"predictions", pa.size()}};
    json doc{{"b", r.b},
             {"c", r.c},
             {"statistic", r.statistic},
             {"p_value", r.p_value},
             {"method",
              r.method == eval::McNemarMethod::kExact ? "exact" : "chi2cc"}};
    doc["run"] = make_run_report("mcnemar", inputs, config, counts);
    emit_document(doc, a.output);
    return 0;
}

struct AlignArgs {
    std::string source, target, output, table_out, config;
    int iterations = 5, threads = 0;
};

int run_align(const AlignArgs& a, InputRegistry& inputs) {
    std::istringstream src_in(inputs.read(a.source));
    std::istringstream tgt_in(inputs.read(a.target));
    auto corpus = xling::load_parallel_corpus(src_in, tgt_in);
    auto result = xling::ibm1_train(corpus, a.iterations, a.threads);
    auto alignment = xling::viterbi_align(corpus, result.table);

    OutputSet outputs;
    outputs.write(a.output, xling::serialize_alignment(alignment));
    if (!a.table_out.empty()) {
        outputs.write(a.table_out, result.table.serialize());
    }
    std::size_t links = 0;
    for (const auto& pair : alignment.pairs) links += pair.size();
    json config{{"iterations", a.iterations}, {"threads", a.threads}};
    json counts{{"pairs", corpus.pairs.size()},
                {"links", links},
                {"log_likelihood", result.log_likelihood}};
    outputs.finish(a.output, make_run_report("align", inputs, config, counts));
    return 0;
}

struct BuildXlingArgs {
    std::string source, target, alignment, dict, output, counts_out, config;
};

int run_build_xling(const BuildXlingArgs& a, InputRegistry& inputs) {
    std::istringstream src_in(inputs.read(a.source));
    std::istringstream tgt_in(inputs.read(a.target));
    auto corpus = xling::load_parallel_corpus(src_in, tgt_in);
    std::istringstream align_in(inputs.read(a.alignment));
    auto alignment = xling::read_alignment_file(align_in);
    std::istringstream dict_in(inputs.read(a.dict));
    auto dict = xling::load_dictionary(dict_in);

    auto build = xling::build_xling_training(corpus, alignment, dict);

    OutputSet outputs;
    outputs.write(a.output, corpus::serialize_instances(build.instances));
    if (!a.counts_out.empty()) {
        outputs.write(a.counts_out, xling::serialize_counts(build.dictionary));
    }
    json counts{{"pairs", corpus.pairs.size()},
                {"emitted", build.emitted},
                {"skipped_unlisted", build.skipped_unlisted},
                {"unaligned_headwords", build.unaligned_headwords}};
    outputs.finish(a.output, make_run_report("build-xling", inputs,
                                             json::object(), counts));
    return 0;
}

struct FilterGoldArgs {
    std::string annotations, mode = "include_all", instances, output, config;
};

int run_filter_gold(const FilterGoldArgs& a, InputRegistry& inputs) {
    std::istringstream ann_in(inputs.read(a.annotations));
    auto records = xling::parse_annotations(ann_in);
    auto retained = xling::filter_annotations(
        records, xling::filter_mode_from_name(a.mode));

    OutputSet outputs;
    std::size_t instances_in = 0;
    if (!a.instances.empty()) {
        std::istringstream inst_in(inputs.read(a.instances));
        auto instances = corpus::parse_instances(inst_in);
        instances_in = instances.size();
        std::unordered_set<std::string> keep(retained.begin(), retained.end());
        std::vector<corpus::Instance> filtered;
        for (auto& inst : instances) {
            if (keep.count(inst.id)) filtered.push_back(std::move(inst));
        }
        outputs.write(a.output, corpus::serialize_instances(filtered));
    } else {
        std::string lines;
        for (const auto& id : retained) {
            lines += id;
            lines += '\n';
        }
        outputs.write(a.output, lines);
    }
    json config{{"mode", a.mode}};
    json counts{{"records", records.size()},
                {"instances_in", instances_in},
                {"retained", retained.size()}};
    outputs.finish(a.output,
                   make_run_report("filter-gold", inputs, config, counts));
    return 0;
}

struct KappaArgs {
    std::string annotations, gold, dict, counts, output, config;
};

int run_kappa(const KappaArgs& a, InputRegistry& inputs) {
    std::istringstream ann_in(inputs.read(a.annotations));
    auto records = xling::parse_annotations(ann_in);
    std::istringstream dict_in(inputs.read(a.dict));
    auto dict = xling::load_dictionary(dict_in);
    if (!a.counts.empty()) {
        std::istringstream counts_in(inputs.read(a.counts));
        xling::load_counts(dict, counts_in);
    }
    std::istringstream gold_in(inputs.read(a.gold));
    auto instances = corpus::parse_instances(gold_in);
    std::map<std::string, std::string> lemma_of;
    for (const auto& inst : instances) lemma_of[inst.id] = inst.target_lemma;

    auto r = xling::compute_kappa(records, lemma_of, dict);

    json config{{"counts_supplied", !a.counts.empty()}};
    json counts{{"records", records.size()}, {"pairs", r.n_pairs}};
    json doc{{"kappa", r.kappa},
             {"p_a", r.p_a},
             {"p_e", r.p_e},
             {"n_pairs", r.n_pairs}};
    doc["run"] = make_run_report("kappa", inputs, config, counts);
    emit_document(doc, a.output);
    return 0;
}

struct StatsArgs {
    std::string instances, annotations, embeddings, format = "plain", output,
        config;
};

int run_stats(const StatsArgs& a, InputRegistry& inputs) {
    json doc = json::object();
    std::map<std::string, std::string> lemma_of;
    if (!a.instances.empty()) {
        std::istringstream in(inputs.read(a.instances));
        auto instances = corpus::parse_instances(in);
        std::size_t labeled = 0, multi_label = 0, proper = 0;
        std::set<std::string> lemmas;
        for (const auto& inst : instances) {
            lemma_of[inst.id] = inst.target_lemma;
            lemmas.insert(inst.target_lemma);
            if (!inst.gold.empty()) ++labeled;
            if (inst.gold.size() > 1) ++multi_label;
            if (inst.proper_noun) ++proper;
        }
        doc["instances"] = {{"count", instances.size()},
                            {"lemmas", lemmas.size()},
                            {"labeled", labeled},
                            {"multi_label", multi_label},
                            {"proper_noun", proper}};
    }
    if (!a.annotations.empty()) {
        std::istringstream in(inputs.read(a.annotations));
        auto records = xling::parse_annotations(in);
        json modes = json::object();
        json mode_lemmas = json::object();
        for (auto mode :
             {xling::FilterMode::kIncludeAll, xling::FilterMode::kExcludeOov,
              xling::FilterMode::kPartialAgreement,
              xling::FilterMode::kCompleteAgreement}) {
            auto retained = xling::filter_annotations(records, mode);
            modes[xling::filter_mode_name(mode)] = retained.size();
            if (!lemma_of.empty()) {
                std::set<std::string> lemmas;
                for (const auto& id : retained) {
                    auto it = lemma_of.find(id);
                    if (it != lemma_of.end()) lemmas.insert(it->second);
                }
                mode_lemmas[xling::filter_mode_name(mode)] = lemmas.size();
            }
        }
        std::set<std::string> annotators, annotated;
        for (const auto& rec : records) {
            annotators.insert(rec.annotator_id);
            annotated.insert(rec.instance_id);
        }
        doc["annotations"] = {{"records", records.size()},
                              {"instances", annotated.size()},
                              {"annotators", annotators.size()},
                              {"modes", modes}};
        if (!lemma_of.empty()) doc["annotations"]["mode_lemmas"] = mode_lemmas;
    }
    if (!a.embeddings.empty()) {
        std::istringstream in(inputs.read(a.embeddings));
        auto table =
            emb::load_embeddings(in, vector_format(a.format), a.embeddings);
        doc["embeddings"] = {{"entries", table.size()},
                             {"dimension", table.dimension()}};
    }
    doc["run"] =
        make_run_report("stats", inputs, json::object(), json::object());
    emit_document(doc, a.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervised word-sense disambiguation toolkit"};
    app.require_subcommand(1);

    ScaleArgs scale_args;
    auto* scale =
        app.add_subcommand("scale-embeddings",
                           "Rescale every embedding dimension to a target "
                           "standard deviation");
    scale->add_option("input", scale_args.input, "input vector file")
        ->required();
    scale->add_option("output", scale_args.output, "output vector file")
        ->required();
    scale->add_option("--sigma", scale_args.sigma, "target stdev per dimension")
        ->check(CLI::PositiveNumber);
    scale->add_option("--format", scale_args.format, "plain|header")
        ->check(CLI::IsMember({"plain", "header"}));
    scale->add_option("--threads", scale_args.threads, "0 = all cores");
    scale->add_option("--config", scale_args.config, "JSON config file");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train one model per lemma");
    train->add_option("--instances", train_args.instances, "training JSONL")
        ->required();
    train->add_option("--embeddings", train_args.embeddings, "vector file");
    train->add_option("--out", train_args.output, "model store path")
        ->required();
    train->add_option("--sigma", train_args.sigma, "scaling constant")
        ->check(CLI::PositiveNumber);
    train->add_option("--window", train_args.window)->check(OddWindow);
    train
        ->add_option("--composition", train_args.composition,
                     "sum|average|concat|off")
        ->check(CLI::IsMember({"sum", "average", "concat", "off"}));
    train->add_option("--concat-window", train_args.concat_window,
                      "0 = same as --window")
        ->check(OddWindowOrZero);
    train->add_option("--lambda", train_args.lambda)->check(CLI::PositiveNumber);
    train->add_option("--epochs", train_args.epochs)->check(CLI::PositiveNumber);
    train->add_option("--seed", train_args.seed, "seed base");
    train->add_option("--threads", train_args.threads, "0 = all cores");
    train->add_option("--stoplist", train_args.stoplist, "stoplist override");
    train->add_option("--format", train_args.format, "plain|header")
        ->check(CLI::IsMember({"plain", "header"}));
    train->add_flag("--no-surrounding-words", train_args.no_sw);
    train->add_flag("--no-collocations", train_args.no_colloc);
    train->add_flag("--no-pos", train_args.no_pos);
    train->add_option("--config", train_args.config, "JSON config file");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Predict senses");
    predict->add_option("--model", predict_args.model)->required();
    predict->add_option("--instances", predict_args.instances)->required();
    predict->add_option("--embeddings", predict_args.embeddings);
    predict->add_option("--out", predict_args.output)->required();
    predict->add_option("--inventory", predict_args.inventory,
                        "fallback sense inventory TSV");
    predict->add_option("--stoplist", predict_args.stoplist);
    predict->add_option("--format", predict_args.format)
        ->check(CLI::IsMember({"plain", "header"}));
    predict->add_flag("--mfs", predict_args.mfs,
                      "first-sense baseline instead of the models");
    predict->add_option("--threads", predict_args.threads);
    predict->add_option("--config", predict_args.config, "JSON config file");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score predictions against gold");
    score->add_option("--pred", score_args.pred)->required();
    score->add_option("--gold", score_args.gold)->required();
    score->add_option("--coarse", score_args.coarse, "sense->cluster TSV");
    score->add_flag("--exclude-proper-nouns", score_args.exclude_proper_nouns);
    score->add_option("--out", score_args.output, "default: stdout");
    score->add_option("--config", score_args.config, "JSON config file");

    McNemarArgs mcnemar_args;
    auto* mcnemar = app.add_subcommand("mcnemar", "Compare two systems");
    mcnemar->add_option("--pred-a", mcnemar_args.pred_a)->required();
    mcnemar->add_option("--pred-b", mcnemar_args.pred_b)->required();
    mcnemar->add_option("--gold", mcnemar_args.gold)->required();
    mcnemar->add_flag("--exclude-proper-nouns",
                      mcnemar_args.exclude_proper_nouns);
    mcnemar->add_option("--out", mcnemar_args.output, "default: stdout");
    mcnemar->add_option("--config", mcnemar_args.config, "JSON config file");

    AlignArgs align_args;
    auto* align = app.add_subcommand("align", "IBM-1 word alignment");
    align->add_option("--source", align_args.source)->required();
    align->add_option("--target", align_args.target)->required();
    align->add_option("--out", align_args.output, "Pharaoh output")->required();
    align->add_option("--iterations", align_args.iterations)
        ->check(CLI::PositiveNumber);
    align->add_option("--threads", align_args.threads);
    align->add_option("--table-out", align_args.table_out,
                      "translation table TSV");
    align->add_option("--config", align_args.config, "JSON config file");

    BuildXlingArgs build_args;
    auto* build = app.add_subcommand(
        "build-xling", "Project translation labels into training instances");
    build->add_option("--source", build_args.source)->required();
    build->add_option("--target", build_args.target)->required();
    build->add_option("--alignment", build_args.alignment)->required();
    build->add_option("--dict", build_args.dict)->required();
    build->add_option("--out", build_args.output, "instances JSONL")->required();
    build->add_option("--counts-out", build_args.counts_out,
                      "translation counts TSV");
    build->add_option("--config", build_args.config, "JSON config file");

    FilterGoldArgs filter_args;
    auto* filter = app.add_subcommand(
        "filter-gold", "Filter instances by annotation agreement");
    filter->add_option("--annotations", filter_args.annotations)->required();
    filter->add_option("--mode", filter_args.mode)
        ->check(CLI::IsMember({"include_all", "exclude_oov",
                               "partial_agreement", "complete_agreement"}));
    filter->add_option("--instances", filter_args.instances,
                       "filter this JSONL instead of emitting ids");
    filter->add_option("--out", filter_args.output)->required();
    filter->add_option("--config", filter_args.config, "JSON config file");

    KappaArgs kappa_args;
    auto* kappa = app.add_subcommand("kappa", "Pairwise annotator agreement");
    kappa->add_option("--annotations", kappa_args.annotations)->required();
    kappa->add_option("--gold", kappa_args.gold, "instances JSONL")->required();
    kappa->add_option("--dict", kappa_args.dict)->required();
    kappa->add_option("--counts", kappa_args.counts, "translation counts TSV");
    kappa->add_option("--out", kappa_args.output, "default: stdout");
    kappa->add_option("--config", kappa_args.config, "JSON config file");

    StatsArgs stats_args;
    auto* stats =
        app.add_subcommand("stats", "Corpus and annotation statistics");
    stats->add_option("--instances", stats_args.instances);
    stats->add_option("--annotations", stats_args.annotations);
    stats->add_option("--embeddings", stats_args.embeddings);
    stats->add_option("--format", stats_args.format)
        ->check(CLI::IsMember({"plain", "header"}));
    stats->add_option("--out", stats_args.output, "default: stdout");
    stats->add_option("--config", stats_args.config, "JSON config file");

    InputRegistry inputs;
    try {
        app.parse(argc, argv);
        if (*scale) apply_config_file(scale, scale_args.config, inputs);
        if (*train) apply_config_file(train, train_args.config, inputs);
        if (*predict) apply_config_file(predict, predict_args.config, inputs);
        if (*score) apply_config_file(score, score_args.config, inputs);
        if (*mcnemar) apply_config_file(mcnemar, mcnemar_args.config, inputs);
        if (*align) apply_config_file(align, align_args.config, inputs);
        if (*build) apply_config_file(build, build_args.config, inputs);
        if (*filter) apply_config_file(filter, filter_args.config, inputs);
        if (*kappa) apply_config_file(kappa, kappa_args.config, inputs);
        if (*stats) apply_config_file(stats, stats_args.config, inputs);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return kDataError;
    }

    try {
        if (*scale) return run_scale(scale_args, inputs);
        if (*train) return run_train(train_args, inputs);
        if (*predict) return run_predict(predict_args, inputs);
        if (*score) return run_score(score_args, inputs);
        if (*mcnemar) return run_mcnemar(mcnemar_args, inputs);
        if (*build) return run_build_xling(build_args, inputs);
        if (*align) return run_align(align_args, inputs);
        if (*filter) return run_filter_gold(filter_args, inputs);
        if (*kappa) return run_kappa(kappa_args, inputs);
        if (*stats) return run_stats(stats_args, inputs);
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return kDataError;
    }
    return kUsageError;
}
