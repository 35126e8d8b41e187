// wsd-bench — compares the OpenMP kernels against their serial reference
// implementations on synthetic data and verifies both produce the same
// bytes.
//
//   wsd-bench [threads]       threads = 0 means all cores (default)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "wsd/alignment.hpp"
#include "wsd/classifier.hpp"
#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/features.hpp"
#include "wsd/parallel.hpp"
#include "wsd/util.hpp"

using namespace wsd;

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

void report(const char* name, double ts, double tp, bool same) {
    std::printf("%-20s %12.4f %12.4f %8.2fx %10s\n", name, ts, tp,
                ts / (tp > 0 ? tp : 1e-12), same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
    std::printf("threads: %d (hardware: %d)\n", par::resolve(threads),
                par::hardware_threads());
    std::printf("%-20s %12s %12s %9s %10s\n", "kernel", "serial [s]", "omp [s]",
                "speedup", "identical");

    // --- embedding column stats + scaling ---------------------------------
    {
        Rng rng(1);
        std::string text;
        for (int i = 0; i < 50000; ++i) {
            text += "w" + std::to_string(i);
            for (int c = 0; c < 100; ++c) {
                text += ' ';
                text += util::format_g17(rng.uniform() * 2.0 - 1.0);
            }
            text += '\n';
        }
        std::istringstream in(text);
        auto table = emb::load_embeddings(in, emb::VectorFormat::kPlain);

        auto t0 = std::chrono::steady_clock::now();
        auto stats_serial = emb::column_stdevs_serial(table);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto stats_par = emb::column_stdevs(table, threads);
        const double tp = seconds_since(t0);
        report("column_stdevs", ts, tp, stats_serial == stats_par);

        t0 = std::chrono::steady_clock::now();
        auto scaled_serial = emb::scale_embeddings_serial(table, 0.1);
        const double ss = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto scaled_par = emb::scale_embeddings(table, 0.1, threads);
        const double sp = seconds_since(t0);
        report("scale_embeddings", ss, sp,
               emb::serialize_embeddings(scaled_serial) ==
                   emb::serialize_embeddings(scaled_par));
    }

    // --- per-lemma training and batch prediction --------------------------
    {
        Rng rng(2);
        std::vector<corpus::Instance> data;
        for (int lemma = 0; lemma < 60; ++lemma) {
            const std::string name = "lemma" + std::to_string(lemma);
            for (int i = 0; i < 120; ++i) {
                corpus::Instance inst;
                inst.id = name + "-" + std::to_string(i);
                const bool a = (i % 2) == 0;
                inst.tokens.push_back(
                    {a ? "cuea" : "cueb", a ? "cuea" : "cueb", "", 0, false});
                inst.tokens.push_back({name, name, "", 0, false});
                for (int f = 0; f < 6; ++f) {
                    const std::string w = "f" + std::to_string(rng.next() % 500);
                    inst.tokens.push_back({w, w, "", 0, false});
                }
                inst.target_index = 1;
                inst.target_lemma = name;
                inst.gold = {a ? "sA" : "sB"};
                data.push_back(std::move(inst));
            }
        }
        auto grouped = corpus::group_by_lemma(data);
        auto inventory = corpus::build_inventory(data);
        feat::FeatureConfig fconfig;
        fconfig.composition = feat::Composition::kOff;

        auto t0 = std::chrono::steady_clock::now();
        auto serial = clf::train_all(grouped, nullptr, fconfig, {}, inventory,
                                     corpus::default_stoplist(), 1, nullptr);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto par_store = clf::train_all(grouped, nullptr, fconfig, {}, inventory,
                                        corpus::default_stoplist(), threads,
                                        nullptr);
        const double tp = seconds_since(t0);
        report("train_all", ts, tp,
               clf::serialize_model_store(serial) ==
                   clf::serialize_model_store(par_store));

        auto t1 = std::chrono::steady_clock::now();
        auto preds_serial = clf::predict_all(serial, data, nullptr, inventory,
                                             corpus::default_stoplist(), 1);
        const double ps = seconds_since(t1);
        t1 = std::chrono::steady_clock::now();
        auto preds_par = clf::predict_all(serial, data, nullptr, inventory,
                                          corpus::default_stoplist(), threads);
        const double pp = seconds_since(t1);
        bool same = preds_serial.size() == preds_par.size();
        for (std::size_t i = 0; same && i < preds_serial.size(); ++i) {
            same = preds_serial[i].sense == preds_par[i].sense;
        }
        report("predict_all", ps, pp, same);
    }

    // --- IBM-1 EM ----------------------------------------------------------
    {
        Rng rng(3);
        std::string src, tgt;
        for (int p = 0; p < 4000; ++p) {
            const int len = 6 + static_cast<int>(rng.next() % 8);
            for (int i = 0; i < len; ++i) {
                const auto w = std::to_string(rng.next() % 2000);
                src += "e" + w + " ";
                tgt += "f" + w + " ";
            }
            src += '\n';
            tgt += '\n';
        }
        std::istringstream src_in(src), tgt_in(tgt);
        auto corpus = xling::load_parallel_corpus(src_in, tgt_in);

        auto t0 = std::chrono::steady_clock::now();
        auto serial = xling::ibm1_train_serial(corpus, 5);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto parallel = xling::ibm1_train(corpus, 5, threads);
        const double tp = seconds_since(t0);
        report("ibm1_em", ts, tp,
               serial.table.serialize() == parallel.table.serialize());
    }

    return 0;
}
