#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wsd/corpus.hpp"

namespace wsd::eval {

struct GoldEntry {
    std::vector<std::string> senses;  // empty = no correct sense, not scored
    std::string lemma;
};

// id -> gold. exclude_proper_nouns drops flagged instances entirely.
using GoldMap = std::map<std::string, GoldEntry>;
GoldMap gold_from_instances(const std::vector<corpus::Instance>& instances,
                            bool exclude_proper_nouns = false);

using Predictions = std::map<std::string, std::string>;  // id -> sense

struct PerLemma {
    std::size_t n = 0;
    std::size_t correct = 0;
};

struct ScoreReport {
    std::size_t n_scored = 0;
    std::size_t n_correct = 0;
    double accuracy = 0.0;  // 0 when nothing was scored
    std::map<std::string, PerLemma> per_lemma;
};

// Correct iff the predicted sense is in the gold set; instances with an
// empty gold set are excluded from n_scored. Every prediction id must
// exist in gold (UnknownInstanceId).
ScoreReport score_fine(const Predictions& predictions, const GoldMap& gold);

// sense -> cluster; senses absent from the map are their own cluster.
using CoarseMap = std::map<std::string, std::string>;
ScoreReport score_coarse(const Predictions& predictions, const GoldMap& gold,
                         const CoarseMap& coarse);

enum class McNemarMethod { kExact, kChi2cc };

struct McNemarResult {
    std::size_t b = 0;  // A correct, B wrong
    std::size_t c = 0;  // A wrong, B correct
    double statistic = 0.0;
    double p_value = 1.0;
    McNemarMethod method = McNemarMethod::kExact;
};

// Paired comparison over the scored instances. Fewer than 10 discordant
// pairs: exact two-sided binomial (statistic = min(b, c)); otherwise
// continuity-corrected chi-square with 1 df. b+c = 0 degenerates to p = 1,
// statistic 0. Throws MismatchedIds when A and B cover different ids.
McNemarResult mcnemar_test(const Predictions& a, const Predictions& b,
                           const GoldMap& gold);

// Branch primitives, exposed so the boundary behaviour can be checked.
double mcnemar_exact_p(std::size_t b, std::size_t c);
double mcnemar_chi2cc_statistic(std::size_t b, std::size_t c);
double chi2_sf_1df(double x);  // upper tail of chi-square with 1 df

// JSONL {"id": ..., "sense": ...}. Throws MalformedRecord, DuplicateId.
Predictions parse_predictions(std::istream& in);
std::string serialize_predictions(
    const std::vector<std::pair<std::string, std::string>>& ordered);

// TSV "sense<TAB>cluster".
CoarseMap load_coarse_map(std::istream& in);

}  // namespace wsd::eval
