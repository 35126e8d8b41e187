#include "wsd/xling.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>

#include "wsd/error.hpp"
#include "wsd/util.hpp"

namespace wsd::xling {

std::size_t BilingualDictionary::translation_rank(
    const std::string& lemma, const std::string& translation) const {
    auto it = entries.find(lemma);
    if (it == entries.end()) return static_cast<std::size_t>(-1);
    auto pos = std::find(it->second.translations.begin(),
                         it->second.translations.end(), translation);
    if (pos == it->second.translations.end()) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(pos - it->second.translations.begin());
}

std::vector<std::string> BilingualDictionary::inventory_order(
    const std::string& lemma) const {
    auto it = entries.find(lemma);
    if (it == entries.end()) throw Error("MissingLemma", lemma);
    const Entry& e = it->second;
    std::vector<std::size_t> order(e.translations.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return e.counts[a] > e.counts[b];
                     });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (std::size_t i : order) out.push_back(e.translations[i]);
    return out;
}

std::vector<std::pair<std::string, std::size_t>> BilingualDictionary::top_k(
    const std::string& lemma, std::size_t k) const {
    auto it = entries.find(lemma);
    if (it == entries.end()) throw Error("MissingLemma", lemma);
    const Entry& e = it->second;
    std::vector<std::size_t> order(e.translations.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return e.counts[a] > e.counts[b];
                     });
    std::vector<std::pair<std::string, std::size_t>> out;
    for (std::size_t i = 0; i < order.size() && i < k; ++i) {
        out.emplace_back(e.translations[order[i]], e.counts[order[i]]);
    }
    return out;
}

corpus::SenseInventory BilingualDictionary::as_inventory() const {
    corpus::SenseInventory inv;
    for (const auto& [lemma, entry] : entries) {
        (void)entry;
        inv.senses[lemma] = inventory_order(lemma);
    }
    return inv;
}

BilingualDictionary load_dictionary(std::istream& in) {
    BilingualDictionary dict;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.empty()) continue;
        auto fields = util::split(text, '\t');
        if (fields.size() < 2 || fields[0].empty()) {
            throw Error("MalformedRecord",
                        "dictionary line " + std::to_string(line) +
                            ": expected 'lemma<TAB>translation...'");
        }
        const std::string lemma = util::lower_ascii(fields[0]);
        if (dict.entries.count(lemma)) throw Error("DuplicateWord", lemma);
        BilingualDictionary::Entry entry;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i].empty()) continue;
            if (std::find(entry.translations.begin(), entry.translations.end(),
                          fields[i]) != entry.translations.end()) {
                throw Error("MalformedRecord",
                            "dictionary line " + std::to_string(line) +
                                ": duplicate translation '" + fields[i] + "'");
            }
            entry.translations.push_back(fields[i]);
        }
        if (entry.translations.empty()) {
            throw Error("MalformedRecord", "dictionary line " +
                                               std::to_string(line) +
                                               ": no translations");
        }
        entry.counts.assign(entry.translations.size(), 0);
        dict.entries.emplace(lemma, std::move(entry));
    }
    return dict;
}

std::string serialize_dictionary(const BilingualDictionary& dict) {
    std::string out;
    for (const auto& [lemma, entry] : dict.entries) {
        out += lemma;
        for (const auto& t : entry.translations) {
            out += '\t';
            out += t;
        }
        out += '\n';
    }
    return out;
}

void load_counts(BilingualDictionary& dict, std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.empty()) continue;
        auto fields = util::split(text, '\t');
        long long count = 0;
        if (fields.size() != 3 ||
            !util::parse_nonnegative_int(fields[2], &count)) {
            throw Error("MalformedRecord",
                        "counts line " + std::to_string(line) +
                            ": expected 'lemma<TAB>translation<TAB>count'");
        }
        const std::string lemma = util::lower_ascii(fields[0]);
        const std::size_t rank = dict.translation_rank(lemma, fields[1]);
        if (rank == static_cast<std::size_t>(-1)) {
            throw Error("MalformedRecord",
                        "counts line " + std::to_string(line) + ": '" +
                            fields[1] + "' is not a translation of '" + lemma +
                            "'");
        }
        dict.entries.at(lemma).counts[rank] = static_cast<std::size_t>(count);
    }
}

std::string serialize_counts(const BilingualDictionary& dict) {
    std::string out;
    for (const auto& [lemma, entry] : dict.entries) {
        for (std::size_t i = 0; i < entry.translations.size(); ++i) {
            out += lemma;
            out += '\t';
            out += entry.translations[i];
            out += '\t';
            out += std::to_string(entry.counts[i]);
            out += '\n';
        }
    }
    return out;
}

XlingBuild build_xling_training(const ParallelCorpus& corpus,
                                const AlignmentTable& alignment,
                                const BilingualDictionary& dictionary) {
    if (alignment.pairs.size() != corpus.pairs.size()) {
        throw Error("AlignmentCountMismatch",
                    "alignment has " + std::to_string(alignment.pairs.size()) +
                        " pairs, corpus has " +
                        std::to_string(corpus.pairs.size()));
    }
    XlingBuild build;
    build.dictionary = dictionary;

    for (std::size_t p = 0; p < corpus.pairs.size(); ++p) {
        const auto& pair = corpus.pairs[p];
        std::set<int> linked_sources;
        for (const auto& [i, j] : alignment.pairs[p]) {
            if (i < 0 || static_cast<std::size_t>(i) >= pair.source.size() ||
                j < 0 || static_cast<std::size_t>(j) >= pair.target.size()) {
                throw Error("LinkOutOfRange",
                            "pair " + std::to_string(p) + ": link " +
                                std::to_string(i) + "-" + std::to_string(j));
            }
            linked_sources.insert(i);
            const std::string& lemma = pair.source[static_cast<std::size_t>(i)];
            if (!build.dictionary.is_headword(lemma)) continue;
            const std::string& translation =
                pair.target[static_cast<std::size_t>(j)];
            const std::size_t rank =
                build.dictionary.translation_rank(lemma, translation);
            if (rank == static_cast<std::size_t>(-1)) {
                ++build.skipped_unlisted;
                continue;
            }
            corpus::Instance inst;
            inst.id = "p" + std::to_string(p) + "-s" + std::to_string(i) + "-t" +
                      std::to_string(j);
            inst.target_lemma = lemma;
            inst.target_index = static_cast<std::size_t>(i);
            for (const auto& w : pair.source) {
                inst.tokens.push_back({w, w, "", 0, false});
            }
            inst.gold.push_back(translation);
            build.instances.push_back(std::move(inst));
            ++build.dictionary.entries.at(lemma).counts[rank];
            ++build.emitted;
        }
        for (std::size_t i = 0; i < pair.source.size(); ++i) {
            if (build.dictionary.is_headword(pair.source[i]) &&
                !linked_sources.count(static_cast<int>(i))) {
                ++build.unaligned_headwords;
            }
        }
    }
    return build;
}

std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
    std::vector<AnnotationRecord> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.empty()) continue;
        auto fields = util::split(text, '\t');
        if (fields.size() < 2 || fields.size() > 4 || fields[0].empty() ||
            fields[1].empty()) {
            throw Error(
                "MalformedRecord",
                "annotations line " + std::to_string(line) +
                    ": expected 'instance<TAB>annotator<TAB>selections<TAB>oov'");
        }
        AnnotationRecord rec;
        rec.instance_id = fields[0];
        rec.annotator_id = fields[1];
        auto parse_list = [](const std::string& field) {
            std::vector<std::string> items;
            for (const auto& item : util::split(field, ',')) {
                if (item.empty()) continue;
                if (std::find(items.begin(), items.end(), item) == items.end()) {
                    items.push_back(item);
                }
            }
            return items;
        };
        if (fields.size() >= 3) rec.selected = parse_list(fields[2]);
        if (fields.size() >= 4) rec.added_oov = parse_list(fields[3]);
        out.push_back(std::move(rec));
    }
    return out;
}

FilterMode filter_mode_from_name(const std::string& name) {
    if (name == "include_all") return FilterMode::kIncludeAll;
    if (name == "exclude_oov") return FilterMode::kExcludeOov;
    if (name == "partial_agreement") return FilterMode::kPartialAgreement;
    if (name == "complete_agreement") return FilterMode::kCompleteAgreement;
    throw Error("BadFilterMode", name);
}

const char* filter_mode_name(FilterMode mode) {
    switch (mode) {
        case FilterMode::kIncludeAll: return "include_all";
        case FilterMode::kExcludeOov: return "exclude_oov";
        case FilterMode::kPartialAgreement: return "partial_agreement";
        case FilterMode::kCompleteAgreement: return "complete_agreement";
    }
    return "include_all";
}

namespace {

struct GroupedAnnotations {
    std::vector<std::string> order;  // instance ids, first appearance
    std::map<std::string, std::vector<const AnnotationRecord*>> by_instance;
};

GroupedAnnotations group_records(const std::vector<AnnotationRecord>& records) {
    GroupedAnnotations g;
    for (const auto& rec : records) {
        auto [it, inserted] = g.by_instance.try_emplace(rec.instance_id);
        if (inserted) g.order.push_back(rec.instance_id);
        it->second.push_back(&rec);
    }
    return g;
}

bool annotation_non_empty(const AnnotationRecord& rec) {
    return !rec.selected.empty() || !rec.added_oov.empty();
}

// Count of annotators that selected each label.
std::map<std::string, std::size_t> selection_counts(
    const std::vector<const AnnotationRecord*>& records) {
    std::map<std::string, std::size_t> counts;
    for (const auto* rec : records) {
        for (const auto& s : rec->selected) ++counts[s];
    }
    return counts;
}

}  // namespace

std::vector<std::string> filter_annotations(
    const std::vector<AnnotationRecord>& records, FilterMode mode) {
    GroupedAnnotations g = group_records(records);
    std::vector<std::string> out;
    for (const auto& id : g.order) {
        const auto& recs = g.by_instance.at(id);
        const bool any_non_empty =
            std::any_of(recs.begin(), recs.end(),
                        [](const AnnotationRecord* r) {
                            return annotation_non_empty(*r);
                        });
        if (!any_non_empty) continue;
        bool keep = true;
        switch (mode) {
            case FilterMode::kIncludeAll:
                break;
            case FilterMode::kExcludeOov:
                keep = std::none_of(recs.begin(), recs.end(),
                                    [](const AnnotationRecord* r) {
                                        return !r->added_oov.empty();
                                    });
                break;
            case FilterMode::kPartialAgreement: {
                const auto counts = selection_counts(recs);
                keep = std::any_of(counts.begin(), counts.end(),
                                   [](const auto& kv) { return kv.second >= 2; });
                break;
            }
            case FilterMode::kCompleteAgreement: {
                // Agreement needs at least two annotators; otherwise a
                // singleton record would count as unanimous.
                const auto counts = selection_counts(recs);
                keep = recs.size() >= 2 &&
                       std::any_of(counts.begin(), counts.end(),
                                   [&](const auto& kv) {
                                       return kv.second == recs.size();
                                   });
                break;
            }
        }
        if (keep) out.push_back(id);
    }
    return out;
}

KappaResult compute_kappa(
    const std::vector<AnnotationRecord>& records,
    const std::map<std::string, std::string>& lemma_of_instance,
    const BilingualDictionary& dict) {
    GroupedAnnotations g = group_records(records);

    double agree_sum = 0.0;
    double chance_sum = 0.0;
    std::size_t n_pairs = 0;

    for (const auto& id : g.order) {
        const auto& recs = g.by_instance.at(id);
        // Instances where every annotator left the annotation blank do not
        // count anywhere.
        const bool any_non_empty =
            std::any_of(recs.begin(), recs.end(),
                        [](const AnnotationRecord* r) {
                            return annotation_non_empty(*r);
                        });
        if (!any_non_empty) continue;
        if (recs.size() < 2) continue;  // no pair to compare

        auto lemma_it = lemma_of_instance.find(id);
        if (lemma_it == lemma_of_instance.end()) {
            throw Error("UnknownInstanceId", id);
        }
        const auto top = dict.top_k(lemma_it->second, 3);
        double total = 0.0;
        for (const auto& [s, count] : top) {
            (void)s;
            total += static_cast<double>(count);
        }
        // Same-sense chance over the top 3; uniform when no counts exist.
        double chance = 0.0;
        if (top.empty()) {
            chance = 0.0;
        } else if (total == 0.0) {
            chance = 1.0 / static_cast<double>(top.size());
        } else {
            for (const auto& [s, count] : top) {
                (void)s;
                const double q = static_cast<double>(count) / total;
                chance += q * q;
            }
        }

        for (std::size_t a = 0; a < recs.size(); ++a) {
            for (std::size_t b = a + 1; b < recs.size(); ++b) {
                // The optimistic single-label choice agrees iff the
                // selected sets intersect.
                bool intersects = false;
                for (const auto& s : recs[a]->selected) {
                    if (std::find(recs[b]->selected.begin(),
                                  recs[b]->selected.end(),
                                  s) != recs[b]->selected.end()) {
                        intersects = true;
                        break;
                    }
                }
                agree_sum += intersects ? 1.0 : 0.0;
                chance_sum += chance;
                ++n_pairs;
            }
        }
    }

    if (n_pairs == 0) throw Error("NoPairs", "no multiply-annotated instances");
    KappaResult r;
    r.n_pairs = n_pairs;
    r.p_a = agree_sum / static_cast<double>(n_pairs);
    r.p_e = chance_sum / static_cast<double>(n_pairs);
    if (r.p_e == 1.0) {
        throw Error("DegenerateAgreement", "chance agreement is 1");
    }
    r.kappa = (r.p_a - r.p_e) / (1.0 - r.p_e);
    return r;
}

}  // namespace wsd::xling
