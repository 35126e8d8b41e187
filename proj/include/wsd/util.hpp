#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wsd::util {

// ASCII-only case folding; non-ASCII bytes pass through untouched.
std::string lower_ascii(std::string_view s);

// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string> split_whitespace(std::string_view line);

// Exact split on a separator; keeps empty fields.
std::vector<std::string> split(std::string_view s, char sep);

// Removes a single trailing '\r' (CRLF input).
std::string_view strip_cr(std::string_view line);

// Strict finite-double parse of a whole token. Rejects trailing junk,
// NaN and infinities.
bool parse_finite_double(const std::string& token, double* out);

bool parse_nonnegative_int(const std::string& token, long long* out);

// printf("%.17g") — 17 significant digits round-trip IEEE754 doubles.
std::string format_g17(double v);

std::uint64_t fnv1a64(std::string_view bytes);
// "fnv1a64:<16 hex digits>"
std::string content_hash(std::string_view bytes);

std::string read_file(const std::string& path);  // throws Error("FileNotFound")
void write_file(const std::string& path, std::string_view content);

std::string json_escape(std::string_view s);

}  // namespace wsd::util
