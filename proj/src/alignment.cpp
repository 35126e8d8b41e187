#include "wsd/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>

#include "wsd/error.hpp"
#include "wsd/parallel.hpp"
#include "wsd/util.hpp"

namespace wsd::xling {

ParallelCorpus load_parallel_corpus(std::istream& source, std::istream& target) {
    std::vector<std::vector<std::string>> src_lines, tgt_lines;
    std::string raw;
    while (std::getline(source, raw)) {
        auto toks = util::split_whitespace(util::strip_cr(raw));
        for (auto& t : toks) t = util::lower_ascii(t);
        src_lines.push_back(std::move(toks));
    }
    while (std::getline(target, raw)) {
        tgt_lines.push_back(util::split_whitespace(util::strip_cr(raw)));
    }
    if (src_lines.size() != tgt_lines.size()) {
        throw Error("PairCountMismatch",
                    "source has " + std::to_string(src_lines.size()) +
                        " sentences, target has " +
                        std::to_string(tgt_lines.size()));
    }
    ParallelCorpus corpus;
    for (std::size_t i = 0; i < src_lines.size(); ++i) {
        if (src_lines[i].empty() || tgt_lines[i].empty()) {
            throw Error("EmptySentence", "pair " + std::to_string(i));
        }
        corpus.pairs.push_back(
            {std::move(src_lines[i]), std::move(tgt_lines[i])});
    }
    return corpus;
}

namespace {

std::size_t find_slot(const std::vector<std::size_t>& row_begin,
                      const std::vector<std::size_t>& col, std::size_t e,
                      std::size_t f) {
    auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_begin[e]);
    auto end = col.begin() + static_cast<std::ptrdiff_t>(row_begin[e + 1]);
    auto it = std::lower_bound(begin, end, f);
    return static_cast<std::size_t>(it - col.begin());
}

}  // namespace

double TranslationTable::prob(const std::string& source_word,
                              const std::string& target_word) const {
    auto se = source_ids_.find(source_word);
    auto te = target_ids_.find(target_word);
    if (se == source_ids_.end() || te == target_ids_.end()) return 0.0;
    const std::size_t e = se->second, f = te->second;
    auto begin = col_.begin() + static_cast<std::ptrdiff_t>(row_begin_[e]);
    auto end = col_.begin() + static_cast<std::ptrdiff_t>(row_begin_[e + 1]);
    auto it = std::lower_bound(begin, end, f);
    if (it == end || *it != f) return 0.0;
    return t_[static_cast<std::size_t>(it - col_.begin())];
}

double TranslationTable::prob_null(const std::string& target_word) const {
    return prob("", target_word);
}

std::map<std::string, std::map<std::string, double>> TranslationTable::rows()
    const {
    std::map<std::string, std::map<std::string, double>> out;
    for (std::size_t e = 0; e < source_vocab_.size(); ++e) {
        auto& row = out[source_vocab_[e]];
        for (std::size_t k = row_begin_[e]; k < row_begin_[e + 1]; ++k) {
            row[target_vocab_[col_[k]]] = t_[k];
        }
    }
    return out;
}

std::string TranslationTable::serialize() const {
    std::string out;
    for (std::size_t e = 0; e < source_vocab_.size(); ++e) {
        const std::string& src =
            source_vocab_[e].empty() ? "<NULL>" : source_vocab_[e];
        for (std::size_t k = row_begin_[e]; k < row_begin_[e + 1]; ++k) {
            out += src;
            out += '\t';
            out += target_vocab_[col_[k]];
            out += '\t';
            out += util::format_g17(t_[k]);
            out += '\n';
        }
    }
    return out;
}

// Indexed corpus plus the EM loop. Expected counts are always applied in
// (pair, target position, source position) order, so the parallel E-step
// reproduces the serial reference bit for bit.
struct Ibm1Trainer {
    TranslationTable table;
    // Per pair: source row ids (NULL first), target ids, and the CSR slot
    // of every (source, target) combination, target-major.
    std::vector<std::vector<std::size_t>> pair_sources;
    std::vector<std::vector<std::size_t>> pair_targets;
    std::vector<std::vector<std::size_t>> pair_slots;

    explicit Ibm1Trainer(const ParallelCorpus& corpus) {
        if (corpus.pairs.empty()) throw Error("EmptyCorpus", "no sentence pairs");

        std::set<std::string> src_words, tgt_words;
        for (const auto& pair : corpus.pairs) {
            src_words.insert(pair.source.begin(), pair.source.end());
            tgt_words.insert(pair.target.begin(), pair.target.end());
        }
        table.source_vocab_.push_back("");  // NULL
        table.source_vocab_.insert(table.source_vocab_.end(), src_words.begin(),
                                   src_words.end());
        table.target_vocab_.assign(tgt_words.begin(), tgt_words.end());
        for (std::size_t i = 0; i < table.source_vocab_.size(); ++i) {
            table.source_ids_[table.source_vocab_[i]] = i;
        }
        for (std::size_t i = 0; i < table.target_vocab_.size(); ++i) {
            table.target_ids_[table.target_vocab_[i]] = i;
        }

        // Co-occurrence support; NULL co-occurs with every target word.
        std::vector<std::set<std::size_t>> support(table.source_vocab_.size());
        for (const auto& pair : corpus.pairs) {
            for (const auto& f : pair.target) {
                const std::size_t fid = table.target_ids_.at(f);
                support[0].insert(fid);
                for (const auto& e : pair.source) {
                    support[table.source_ids_.at(e)].insert(fid);
                }
            }
        }
        table.row_begin_.assign(table.source_vocab_.size() + 1, 0);
        for (std::size_t e = 0; e < support.size(); ++e) {
            table.row_begin_[e + 1] = table.row_begin_[e] + support[e].size();
            table.col_.insert(table.col_.end(), support[e].begin(),
                              support[e].end());
        }
        table.t_.assign(table.col_.size(), 0.0);
        for (std::size_t e = 0; e < support.size(); ++e) {
            const std::size_t n = table.row_begin_[e + 1] - table.row_begin_[e];
            if (n == 0) continue;
            const double uniform = 1.0 / static_cast<double>(n);
            for (std::size_t k = table.row_begin_[e]; k < table.row_begin_[e + 1];
                 ++k) {
                table.t_[k] = uniform;
            }
        }

        pair_sources.resize(corpus.pairs.size());
        pair_targets.resize(corpus.pairs.size());
        pair_slots.resize(corpus.pairs.size());
        for (std::size_t p = 0; p < corpus.pairs.size(); ++p) {
            const auto& pair = corpus.pairs[p];
            auto& sources = pair_sources[p];
            sources.push_back(0);
            for (const auto& e : pair.source) {
                sources.push_back(table.source_ids_.at(e));
            }
            for (const auto& f : pair.target) {
                pair_targets[p].push_back(table.target_ids_.at(f));
            }
            auto& slots = pair_slots[p];
            slots.reserve(pair_targets[p].size() * sources.size());
            for (std::size_t f : pair_targets[p]) {
                for (std::size_t e : sources) {
                    slots.push_back(
                        find_slot(table.row_begin_, table.col_, e, f));
                }
            }
        }
    }

    // One E-step contribution set for a pair: posterior of every (j, i)
    // combination plus the per-position normalizers, computed from the
    // current table only.
    void pair_posteriors(std::size_t p, std::vector<double>& contribs,
                         std::vector<double>& normalizers) const {
        const auto& slots = pair_slots[p];
        const std::size_t m1 = pair_sources[p].size();
        const std::size_t nj = pair_targets[p].size();
        contribs.resize(slots.size());
        normalizers.resize(nj);
        for (std::size_t j = 0; j < nj; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < m1; ++i) {
                z += table.t_[slots[j * m1 + i]];
            }
            normalizers[j] = z;
            for (std::size_t i = 0; i < m1; ++i) {
                contribs[j * m1 + i] = table.t_[slots[j * m1 + i]] / z;
            }
        }
    }

    Ibm1Result run(int iterations, int threads, bool parallel_estep) {
        std::vector<double> counts(table.t_.size());
        std::vector<double> totals(table.source_vocab_.size());
        std::vector<double> history;

        std::vector<std::vector<double>> scratch_contribs;
        std::vector<std::vector<double>> scratch_norms;
        if (parallel_estep) {
            scratch_contribs.resize(pair_slots.size());
            scratch_norms.resize(pair_slots.size());
        }

        for (int iter = 0; iter < iterations; ++iter) {
            std::fill(counts.begin(), counts.end(), 0.0);
            std::fill(totals.begin(), totals.end(), 0.0);
            double ll = 0.0;

            if (parallel_estep) {
                par::for_each_index(pair_slots.size(), threads, [&](std::size_t p) {
                    pair_posteriors(p, scratch_contribs[p], scratch_norms[p]);
                });
                for (std::size_t p = 0; p < pair_slots.size(); ++p) {
                    const std::size_t m1 = pair_sources[p].size();
                    const auto& slots = pair_slots[p];
                    const auto& contribs = scratch_contribs[p];
                    for (std::size_t j = 0; j < pair_targets[p].size(); ++j) {
                        ll += std::log(scratch_norms[p][j] /
                                       static_cast<double>(m1));
                        for (std::size_t i = 0; i < m1; ++i) {
                            const double c = contribs[j * m1 + i];
                            counts[slots[j * m1 + i]] += c;
                            totals[pair_sources[p][i]] += c;
                        }
                    }
                }
            } else {
                for (std::size_t p = 0; p < pair_slots.size(); ++p) {
                    const std::size_t m1 = pair_sources[p].size();
                    const auto& slots = pair_slots[p];
                    for (std::size_t j = 0; j < pair_targets[p].size(); ++j) {
                        double z = 0.0;
                        for (std::size_t i = 0; i < m1; ++i) {
                            z += table.t_[slots[j * m1 + i]];
                        }
                        ll += std::log(z / static_cast<double>(m1));
                        for (std::size_t i = 0; i < m1; ++i) {
                            const double c = table.t_[slots[j * m1 + i]] / z;
                            counts[slots[j * m1 + i]] += c;
                            totals[pair_sources[p][i]] += c;
                        }
                    }
                }
            }

            if (!history.empty() &&
                ll < history.back() - 1e-9 * (1.0 + std::fabs(history.back()))) {
                throw Error("LikelihoodDecreased",
                            "iteration " + std::to_string(iter) + ": " +
                                util::format_g17(history.back()) + " -> " +
                                util::format_g17(ll));
            }
            history.push_back(ll);

            // M-step
            for (std::size_t e = 0; e < table.source_vocab_.size(); ++e) {
                if (totals[e] == 0.0) continue;
                for (std::size_t k = table.row_begin_[e];
                     k < table.row_begin_[e + 1]; ++k) {
                    table.t_[k] = counts[k] / totals[e];
                }
            }
        }
        return {std::move(table), std::move(history)};
    }
};

Ibm1Result ibm1_train_serial(const ParallelCorpus& corpus, int iterations) {
    Ibm1Trainer trainer(corpus);
    return trainer.run(iterations, 1, /*parallel_estep=*/false);
}

Ibm1Result ibm1_train(const ParallelCorpus& corpus, int iterations,
                      int threads) {
    Ibm1Trainer trainer(corpus);
    return trainer.run(iterations, threads, /*parallel_estep=*/true);
}

AlignmentTable viterbi_align(const ParallelCorpus& corpus,
                             const TranslationTable& table) {
    AlignmentTable out;
    out.pairs.resize(corpus.pairs.size());
    for (std::size_t p = 0; p < corpus.pairs.size(); ++p) {
        const auto& pair = corpus.pairs[p];
        for (std::size_t j = 0; j < pair.target.size(); ++j) {
            double best = 0.0;
            long long best_i = -1;
            for (std::size_t i = 0; i < pair.source.size(); ++i) {
                const double t = table.prob(pair.source[i], pair.target[j]);
                if (t > best) {  // ties keep the smallest position
                    best = t;
                    best_i = static_cast<long long>(i);
                }
            }
            // NULL absorbs the position only with strictly greater mass.
            if (best_i >= 0 && !(table.prob_null(pair.target[j]) > best)) {
                out.pairs[p].emplace_back(static_cast<int>(best_i),
                                          static_cast<int>(j));
            }
        }
        std::sort(out.pairs[p].begin(), out.pairs[p].end());
    }
    return out;
}

AlignmentTable read_alignment_file(std::istream& in) {
    AlignmentTable out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        LinkSet links;
        for (const auto& tok : util::split_whitespace(util::strip_cr(raw))) {
            const auto dash = tok.find('-');
            if (dash == std::string::npos) {
                throw Error("MalformedLink",
                            "line " + std::to_string(line) + ": '" + tok + "'");
            }
            long long i = 0, j = 0;
            if (!util::parse_nonnegative_int(tok.substr(0, dash), &i) ||
                !util::parse_nonnegative_int(tok.substr(dash + 1), &j)) {
                throw Error("MalformedLink",
                            "line " + std::to_string(line) + ": '" + tok + "'");
            }
            links.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
        std::sort(links.begin(), links.end());
        links.erase(std::unique(links.begin(), links.end()), links.end());
        out.pairs.push_back(std::move(links));
    }
    return out;
}

std::string serialize_alignment(const AlignmentTable& alignment) {
    std::string out;
    for (const auto& links : alignment.pairs) {
        for (std::size_t k = 0; k < links.size(); ++k) {
            if (k) out += ' ';
            out += std::to_string(links[k].first) + '-' +
                   std::to_string(links[k].second);
        }
        out += '\n';
    }
    return out;
}

}  // namespace wsd::xling
