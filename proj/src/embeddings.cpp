#include "wsd/embeddings.hpp"

#include <cmath>
#include <istream>
#include <utility>

#include "wsd/error.hpp"
#include "wsd/parallel.hpp"
#include "wsd/util.hpp"

namespace wsd::emb {

namespace detail {
struct TableBuilder {
    EmbeddingTable table;

    void set_dimension(std::size_t d) { table.dim_ = d; }
    void set_provenance(std::string p) { table.provenance_ = std::move(p); }
    void set_scaled_sigma(double s) { table.scaled_sigma_ = s; }

    // Throws DuplicateWord; word must already be lowercased.
    void append(const std::string& word, const double* values, std::size_t n) {
        if (table.index_.count(word)) throw Error("DuplicateWord", word);
        table.index_.emplace(word, table.words_.size());
        table.words_.push_back(word);
        table.data_.insert(table.data_.end(), values, values + n);
    }

    std::vector<double>& data() { return table.data_; }
    EmbeddingTable finish() { return std::move(table); }
};
}  // namespace detail

using detail::TableBuilder;

std::optional<std::span<const double>> EmbeddingTable::lookup(
    std::string_view word) const {
    auto it = index_.find(util::lower_ascii(word));
    if (it == index_.end()) return std::nullopt;
    return row(it->second);
}

EmbeddingTable load_embeddings(std::istream& in, VectorFormat format,
                               std::string provenance) {
    TableBuilder b;
    b.set_provenance(std::move(provenance));

    std::size_t dim = 0;
    std::size_t line_no = 0;
    std::size_t n_records = 0;
    bool header_seen = false;
    long long declared_count = -1;
    std::vector<double> values;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        auto fields = util::split_whitespace(util::strip_cr(raw));
        if (fields.empty()) continue;  // blank line
        if (format == VectorFormat::kHeader && !header_seen) {
            header_seen = true;
            long long v = 0, d = 0;
            if (fields.size() != 2 || !util::parse_nonnegative_int(fields[0], &v) ||
                !util::parse_nonnegative_int(fields[1], &d) || d <= 0) {
                throw Error("NonNumericValue",
                            "line 1: malformed header, expected 'V d'");
            }
            declared_count = v;
            dim = static_cast<std::size_t>(d);
            continue;
        }
        if (fields.size() < 2) {
            throw Error("DimensionMismatch",
                        "line " + std::to_string(line_no) +
                            ": record has no values");
        }
        const std::size_t arity = fields.size() - 1;
        if (dim == 0) {
            dim = arity;
        } else if (arity != dim) {
            throw Error("DimensionMismatch",
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " values, got " +
                            std::to_string(arity));
        }
        values.clear();
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double v;
            if (!util::parse_finite_double(fields[k], &v)) {
                throw Error("NonNumericValue", "line " + std::to_string(line_no) +
                                                   ": '" + fields[k] + "'");
            }
            values.push_back(v);
        }
        b.append(util::lower_ascii(fields[0]), values.data(), values.size());
        ++n_records;
    }
    if (n_records == 0) throw Error("EmptyInput", "no embedding records");
    if (declared_count >= 0 &&
        static_cast<std::size_t>(declared_count) != n_records) {
        throw Error("HeaderRecordCount",
                    "header declares " + std::to_string(declared_count) +
                        " records, file has " + std::to_string(n_records));
    }
    b.set_dimension(dim);
    return b.finish();
}

std::string serialize_embeddings(const EmbeddingTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += table.words()[i];
        for (double v : table.row(i)) {
            out += ' ';
            out += util::format_g17(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

// Two-pass sample (n-1) stdev of one column.
double column_stdev_at(const EmbeddingTable& t, std::size_t col) {
    const std::size_t n = t.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += t.row(i)[col];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = t.row(i)[col] - mean;
        ss += dev * dev;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

void require_stats_ready(const EmbeddingTable& t) {
    if (t.size() < 2) {
        throw Error("TooFewEntries",
                    "need at least 2 entries, have " + std::to_string(t.size()));
    }
}

EmbeddingTable scale_with_stdevs(const EmbeddingTable& table, double sigma,
                                 const std::vector<double>& stdevs,
                                 int threads) {
    if (!(sigma > 0.0)) {
        throw Error("NonPositiveSigma",
                    "sigma must be > 0, got " + util::format_g17(sigma));
    }
    std::vector<double> factor(stdevs.size());
    for (std::size_t c = 0; c < stdevs.size(); ++c) {
        if (stdevs[c] == 0.0) {
            throw Error("ZeroVarianceDimension",
                        "dimension " + std::to_string(c) + " is constant");
        }
        factor[c] = sigma / stdevs[c];
    }
    TableBuilder b;
    b.set_dimension(table.dimension());
    b.set_provenance(table.provenance());
    b.set_scaled_sigma(sigma);
    const std::size_t d = table.dimension();
    for (std::size_t i = 0; i < table.size(); ++i) {
        b.append(table.words()[i], table.row(i).data(), d);
    }
    double* dst = b.data().data();
    par::for_each_index(table.size(), threads, [&](std::size_t i) {
        for (std::size_t c = 0; c < d; ++c) dst[i * d + c] *= factor[c];
    });
    return b.finish();
}

}  // namespace

std::vector<double> column_stdevs_serial(const EmbeddingTable& table) {
    require_stats_ready(table);
    std::vector<double> out(table.dimension());
    for (std::size_t c = 0; c < table.dimension(); ++c) {
        out[c] = column_stdev_at(table, c);
    }
    return out;
}

std::vector<double> column_stdevs(const EmbeddingTable& table, int threads) {
    require_stats_ready(table);
    std::vector<double> out(table.dimension());
    // Column-independent work; identical arithmetic at any thread count.
    par::for_each_index(table.dimension(), threads,
                        [&](std::size_t c) { out[c] = column_stdev_at(table, c); });
    return out;
}

EmbeddingTable scale_embeddings_serial(const EmbeddingTable& table, double sigma) {
    return scale_with_stdevs(table, sigma, column_stdevs_serial(table), 1);
}

EmbeddingTable scale_embeddings(const EmbeddingTable& table, double sigma,
                                int threads) {
    return scale_with_stdevs(table, sigma, column_stdevs(table, threads), threads);
}

}  // namespace wsd::emb
