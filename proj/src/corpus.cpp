#include "wsd/corpus.hpp"

#include <algorithm>
#include <istream>
#include <unordered_map>

#include <json.hpp>

#include "wsd/error.hpp"
#include "wsd/util.hpp"

namespace wsd::corpus {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
    throw Error("MalformedRecord", "line " + std::to_string(line) + ": " + reason);
}

std::string want_string(const json& j, const char* key, std::size_t line,
                        bool required, const std::string& fallback = "") {
    if (!j.contains(key)) {
        if (required) malformed(line, std::string("missing field '") + key + "'");
        return fallback;
    }
    if (!j[key].is_string()) {
        malformed(line, std::string("field '") + key + "' must be a string");
    }
    return j[key].get<std::string>();
}

long long want_int(const json& j, const char* key, std::size_t line,
                   bool required, long long fallback = 0) {
    if (!j.contains(key)) {
        if (required) malformed(line, std::string("missing field '") + key + "'");
        return fallback;
    }
    if (!j[key].is_number_integer()) {
        malformed(line, std::string("field '") + key + "' must be an integer");
    }
    return j[key].get<long long>();
}

bool want_bool(const json& j, const char* key, std::size_t line, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) {
        malformed(line, std::string("field '") + key + "' must be a boolean");
    }
    return j[key].get<bool>();
}

void reject_unknown_fields(const json& j, std::size_t line,
                           std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) malformed(line, "unknown field '" + it.key() + "'");
    }
}

Instance parse_instance_line(const std::string& line_text, std::size_t line) {
    json j;
    try {
        j = json::parse(line_text);
    } catch (const json::exception& e) {
        malformed(line, e.what());
    }
    if (!j.is_object()) malformed(line, "record is not a JSON object");
    reject_unknown_fields(j, line,
                          {"id", "target_lemma", "target_pos", "target_index",
                           "proper_noun", "gold", "tokens"});

    Instance inst;
    inst.id = want_string(j, "id", line, true);
    if (inst.id.empty()) malformed(line, "empty id");
    inst.target_lemma = util::lower_ascii(want_string(j, "target_lemma", line, true));
    if (inst.target_lemma.empty()) malformed(line, "empty target_lemma");
    inst.target_pos = want_string(j, "target_pos", line, false);
    const long long target_index = want_int(j, "target_index", line, true);
    inst.proper_noun = want_bool(j, "proper_noun", line, false);

    if (j.contains("gold")) {
        if (!j["gold"].is_array()) malformed(line, "field 'gold' must be an array");
        for (const auto& g : j["gold"]) {
            if (!g.is_string()) malformed(line, "gold entries must be strings");
            const auto sense = g.get<std::string>();
            if (sense.empty()) malformed(line, "empty gold sense id");
            if (std::find(inst.gold.begin(), inst.gold.end(), sense) !=
                inst.gold.end()) {
                malformed(line, "duplicate gold sense '" + sense + "'");
            }
            inst.gold.push_back(sense);
        }
    }

    if (!j.contains("tokens") || !j["tokens"].is_array()) {
        malformed(line, "missing or non-array field 'tokens'");
    }
    int prev_sent = -1;
    for (const auto& tj : j["tokens"]) {
        if (!tj.is_object()) malformed(line, "token is not a JSON object");
        reject_unknown_fields(tj, line, {"surface", "lemma", "pos", "sent", "punct"});
        Token t;
        t.surface = want_string(tj, "surface", line, false);
        t.lemma = util::lower_ascii(want_string(tj, "lemma", line, false));
        t.pos = want_string(tj, "pos", line, false);
        const long long sent = want_int(tj, "sent", line, false, 0);
        if (sent < 0) malformed(line, "negative sentence index");
        t.sent = static_cast<int>(sent);
        t.punct = want_bool(tj, "punct", line, false);
        if (t.lemma.empty() && !t.punct) {
            malformed(line, "token with empty lemma must be punctuation");
        }
        if (t.sent < prev_sent) malformed(line, "sentence index decreases");
        prev_sent = t.sent;
        inst.tokens.push_back(std::move(t));
    }

    if (target_index < 0 ||
        static_cast<std::size_t>(target_index) >= inst.tokens.size()) {
        throw Error("IndexOutOfRange",
                    "instance '" + inst.id + "': target_index " +
                        std::to_string(target_index) + " with " +
                        std::to_string(inst.tokens.size()) + " tokens");
    }
    inst.target_index = static_cast<std::size_t>(target_index);
    if (inst.tokens[inst.target_index].lemma != inst.target_lemma) {
        malformed(line, "token at target_index has lemma '" +
                            inst.tokens[inst.target_index].lemma +
                            "', expected '" + inst.target_lemma + "'");
    }
    return inst;
}

}  // namespace

std::vector<Instance> parse_instances(std::istream& in) {
    std::vector<Instance> out;
    std::unordered_set<std::string> seen_ids;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
        Instance inst = parse_instance_line(std::string(text), line);
        if (!seen_ids.insert(inst.id).second) {
            throw Error("DuplicateId", inst.id);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

std::string serialize_instances(const std::vector<Instance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        out += "{\"id\":\"" + util::json_escape(inst.id) + "\"";
        out += ",\"target_lemma\":\"" + util::json_escape(inst.target_lemma) + "\"";
        out += ",\"target_pos\":\"" + util::json_escape(inst.target_pos) + "\"";
        out += ",\"target_index\":" + std::to_string(inst.target_index);
        out += ",\"proper_noun\":";
        out += inst.proper_noun ? "true" : "false";
        out += ",\"gold\":[";
        for (std::size_t i = 0; i < inst.gold.size(); ++i) {
            if (i) out += ',';
            out += '"' + util::json_escape(inst.gold[i]) + '"';
        }
        out += "],\"tokens\":[";
        for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
            const Token& t = inst.tokens[i];
            if (i) out += ',';
            out += "{\"surface\":\"" + util::json_escape(t.surface) + "\"";
            out += ",\"lemma\":\"" + util::json_escape(t.lemma) + "\"";
            out += ",\"pos\":\"" + util::json_escape(t.pos) + "\"";
            out += ",\"sent\":" + std::to_string(t.sent);
            out += ",\"punct\":";
            out += t.punct ? "true" : "false";
            out += "}";
        }
        out += "]}\n";
    }
    return out;
}

NormalizedContext normalize_tokens(const Instance& instance,
                                   const std::unordered_set<std::string>& stoplist) {
    NormalizedContext out;
    for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
        const Token& t = instance.tokens[i];
        const bool is_target = (i == instance.target_index);
        if (!is_target && (t.punct || stoplist.count(t.lemma))) continue;
        if (is_target) out.target_index = out.tokens.size();
        out.tokens.push_back(t);
    }
    return out;
}

std::map<std::string, std::vector<Instance>> group_by_lemma(
    const std::vector<Instance>& instances) {
    std::map<std::string, std::vector<Instance>> out;
    for (const auto& inst : instances) {
        out[inst.target_lemma].push_back(inst);
    }
    return out;
}

bool SenseInventory::contains(const std::string& lemma,
                              const std::string& sense) const {
    auto it = senses.find(lemma);
    if (it == senses.end()) return false;
    return std::find(it->second.begin(), it->second.end(), sense) !=
           it->second.end();
}

const std::string& SenseInventory::first_sense(const std::string& lemma) const {
    auto it = senses.find(lemma);
    if (it == senses.end() || it->second.empty()) {
        throw Error("MissingLemma", lemma);
    }
    return it->second.front();
}

SenseInventory build_inventory(const std::vector<Instance>& training) {
    struct Entry {
        std::string sense;
        std::size_t count = 0;
        std::size_t first_seen = 0;
    };
    std::map<std::string, std::vector<Entry>> acc;
    std::size_t tick = 0;
    for (const auto& inst : training) {
        for (const auto& sense : inst.gold) {
            auto& entries = acc[inst.target_lemma];
            auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const Entry& e) { return e.sense == sense; });
            if (it == entries.end()) {
                entries.push_back({sense, 1, tick});
            } else {
                ++it->count;
            }
            ++tick;
        }
    }
    SenseInventory inv;
    for (auto& [lemma, entries] : acc) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Entry& a, const Entry& b) {
                             if (a.count != b.count) return a.count > b.count;
                             return a.first_seen < b.first_seen;
                         });
        auto& list = inv.senses[lemma];
        for (const auto& e : entries) list.push_back(e.sense);
    }
    return inv;
}

SenseInventory load_inventory(std::istream& in) {
    SenseInventory inv;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.empty()) continue;
        auto fields = util::split(text, '\t');
        if (fields.size() < 2 || fields[0].empty()) {
            throw Error("MalformedRecord",
                        "inventory line " + std::to_string(line) +
                            ": expected 'lemma<TAB>sense...'");
        }
        const std::string lemma = util::lower_ascii(fields[0]);
        auto& list = inv.senses[lemma];
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i].empty()) continue;
            if (std::find(list.begin(), list.end(), fields[i]) != list.end()) {
                throw Error("MalformedRecord",
                            "inventory line " + std::to_string(line) +
                                ": duplicate sense '" + fields[i] + "'");
            }
            list.push_back(fields[i]);
        }
    }
    return inv;
}

std::string serialize_inventory(const SenseInventory& inv) {
    std::string out;
    for (const auto& [lemma, list] : inv.senses) {
        out += lemma;
        for (const auto& s : list) {
            out += '\t';
            out += s;
        }
        out += '\n';
    }
    return out;
}

}  // namespace wsd::corpus
