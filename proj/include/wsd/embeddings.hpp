#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wsd::emb {

enum class VectorFormat { kPlain, kHeader };

namespace detail {
struct TableBuilder;
}

// Vocabulary-indexed matrix of d-dimensional word vectors. Keys are
// ASCII-lowercased; entries keep file order so that serialization
// round-trips byte for byte. Immutable after construction, safe to read
// from concurrent workers.
class EmbeddingTable {
public:
    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    const std::string& provenance() const { return provenance_; }
    std::optional<double> scaled_sigma() const { return scaled_sigma_; }

    const std::vector<std::string>& words() const { return words_; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }

    // Exact match after ASCII-lowercasing the query. Absent for OOV words.
    std::optional<std::span<const double>> lookup(std::string_view word) const;

private:
    EmbeddingTable() = default;

    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<double> data_;  // row-major, size() * dim_
    std::unordered_map<std::string, std::size_t> index_;
    std::string provenance_;
    std::optional<double> scaled_sigma_;

    friend struct detail::TableBuilder;
};

// `kPlain`: one record per line, "word v1 ... vd"; d comes from the first
// record. `kHeader`: first line "V d", then V plain records. Whitespace is
// runs of ASCII spaces/tabs; LF or CRLF line endings. Blank lines are
// skipped. Throws DimensionMismatch, DuplicateWord, NonNumericValue,
// EmptyInput, HeaderRecordCount.
EmbeddingTable load_embeddings(std::istream& in, VectorFormat format,
                               std::string provenance = "");

// Plain format with 17-significant-digit floats; entries in table order.
std::string serialize_embeddings(const EmbeddingTable& table);

// Sample (n-1) standard deviation of each dimension over all entries.
// Throws TooFewEntries for tables with fewer than 2 entries.
std::vector<double> column_stdevs_serial(const EmbeddingTable& table);
std::vector<double> column_stdevs(const EmbeddingTable& table, int threads = 1);

// Returns a new table with dimension i multiplied by sigma / stdev(i), so
// every column's sample stdev becomes sigma. Idempotent at fixed sigma.
// Throws NonPositiveSigma, ZeroVarianceDimension, TooFewEntries.
EmbeddingTable scale_embeddings_serial(const EmbeddingTable& table, double sigma);
EmbeddingTable scale_embeddings(const EmbeddingTable& table, double sigma,
                                int threads = 1);

}  // namespace wsd::emb
