#include "wsd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include <json.hpp>

#include "wsd/error.hpp"
#include "wsd/util.hpp"

namespace wsd::eval {

GoldMap gold_from_instances(const std::vector<corpus::Instance>& instances,
                            bool exclude_proper_nouns) {
    GoldMap out;
    for (const auto& inst : instances) {
        if (exclude_proper_nouns && inst.proper_noun) continue;
        out[inst.id] = GoldEntry{inst.gold, inst.target_lemma};
    }
    return out;
}

namespace {

const GoldEntry& gold_for(const GoldMap& gold, const std::string& id) {
    auto it = gold.find(id);
    if (it == gold.end()) throw Error("UnknownInstanceId", id);
    return it->second;
}

std::string cluster_of(const CoarseMap& coarse, const std::string& sense) {
    auto it = coarse.find(sense);
    return it == coarse.end() ? sense : it->second;
}

ScoreReport score_with(const Predictions& predictions, const GoldMap& gold,
                       const CoarseMap* coarse) {
    ScoreReport report;
    for (const auto& [id, sense] : predictions) {
        const GoldEntry& entry = gold_for(gold, id);
        if (entry.senses.empty()) continue;  // no correct sense: not scored
        bool correct = false;
        if (coarse) {
            const std::string pc = cluster_of(*coarse, sense);
            for (const auto& g : entry.senses) {
                if (cluster_of(*coarse, g) == pc) {
                    correct = true;
                    break;
                }
            }
        } else {
            correct = std::find(entry.senses.begin(), entry.senses.end(),
                                sense) != entry.senses.end();
        }
        ++report.n_scored;
        auto& pl = report.per_lemma[entry.lemma];
        ++pl.n;
        if (correct) {
            ++report.n_correct;
            ++pl.correct;
        }
    }
    report.accuracy =
        report.n_scored == 0
            ? 0.0
            : static_cast<double>(report.n_correct) /
                  static_cast<double>(report.n_scored);
    return report;
}

}  // namespace

ScoreReport score_fine(const Predictions& predictions, const GoldMap& gold) {
    return score_with(predictions, gold, nullptr);
}

ScoreReport score_coarse(const Predictions& predictions, const GoldMap& gold,
                         const CoarseMap& coarse) {
    return score_with(predictions, gold, &coarse);
}

double mcnemar_exact_p(std::size_t b, std::size_t c) {
    const std::size_t n = b + c;
    if (n == 0) return 1.0;
    const std::size_t k = std::min(b, c);
    // p = min(1, 2 * sum_{i<=k} C(n,i) * 0.5^n); the branch only runs for
    // n < 25 where C(n,i) and 0.5^n are exact doubles.
    double tail = 0.0;
    double coeff = 1.0;  // C(n,0)
    const double pow_half = std::pow(0.5, static_cast<double>(n));
    for (std::size_t i = 0; i <= k; ++i) {
        if (i > 0) {
            coeff *= static_cast<double>(n - i + 1) / static_cast<double>(i);
        }
        tail += coeff * pow_half;
    }
    return std::min(1.0, 2.0 * tail);
}

double mcnemar_chi2cc_statistic(std::size_t b, std::size_t c) {
    const double diff =
        std::abs(static_cast<double>(b) - static_cast<double>(c));
    const double corrected = diff - 1.0;
    return corrected * corrected / static_cast<double>(b + c);
}

double chi2_sf_1df(double x) {
    if (x <= 0.0) return 1.0;
    // P(X > x) for chi-square(1) = erfc(sqrt(x/2))
    return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar_test(const Predictions& a, const Predictions& b,
                           const GoldMap& gold) {
    if (a.size() != b.size()) {
        throw Error("MismatchedIds", "prediction sets differ in size");
    }
    McNemarResult r;
    for (const auto& [id, sense_a] : a) {
        auto it = b.find(id);
        if (it == b.end()) throw Error("MismatchedIds", id);
        const GoldEntry& entry = gold_for(gold, id);
        if (entry.senses.empty()) continue;
        const bool ok_a = std::find(entry.senses.begin(), entry.senses.end(),
                                    sense_a) != entry.senses.end();
        const bool ok_b = std::find(entry.senses.begin(), entry.senses.end(),
                                    it->second) != entry.senses.end();
        if (ok_a && !ok_b) ++r.b;
        if (!ok_a && ok_b) ++r.c;
    }
    const std::size_t n = r.b + r.c;
    if (n == 0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.method = McNemarMethod::kExact;
        return r;
    }
    if (n < 10) {
        r.method = McNemarMethod::kExact;
        r.statistic = static_cast<double>(std::min(r.b, r.c));
        r.p_value = mcnemar_exact_p(r.b, r.c);
    } else {
        r.method = McNemarMethod::kChi2cc;
        r.statistic = mcnemar_chi2cc_statistic(r.b, r.c);
        r.p_value = chi2_sf_1df(r.statistic);
    }
    return r;
}

Predictions parse_predictions(std::istream& in) {
    using nlohmann::json;
    Predictions out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw Error("MalformedRecord",
                        "line " + std::to_string(line) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("sense") ||
            !j["id"].is_string() || !j["sense"].is_string() || j.size() != 2) {
            throw Error("MalformedRecord",
                        "line " + std::to_string(line) +
                            ": expected {\"id\": str, \"sense\": str}");
        }
        const auto id = j["id"].get<std::string>();
        if (!out.emplace(id, j["sense"].get<std::string>()).second) {
            throw Error("DuplicateId", id);
        }
    }
    return out;
}

std::string serialize_predictions(
    const std::vector<std::pair<std::string, std::string>>& ordered) {
    std::string out;
    for (const auto& [id, sense] : ordered) {
        out += "{\"id\":\"" + util::json_escape(id) + "\",\"sense\":\"" +
               util::json_escape(sense) + "\"}\n";
    }
    return out;
}

CoarseMap load_coarse_map(std::istream& in) {
    CoarseMap out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = util::strip_cr(raw);
        if (text.empty()) continue;
        auto fields = util::split(text, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw Error("MalformedRecord",
                        "coarse map line " + std::to_string(line) +
                            ": expected 'sense<TAB>cluster'");
        }
        out[fields[0]] = fields[1];
    }
    return out;
}

}  // namespace wsd::eval
