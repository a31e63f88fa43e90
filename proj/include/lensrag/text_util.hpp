#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lensrag {

// Lowercase, trim, collapse internal whitespace runs to one space.
std::string normalize_query(std::string_view text);

// Lowercased alphanumeric tokens (ASCII letters/digits; other bytes split).
std::vector<std::string> tokenize(std::string_view text);

// tokenize() minus a small English stopword list.
std::vector<std::string> content_tokens(std::string_view text);

bool contains_icase(std::string_view haystack, std::string_view needle);
std::size_t find_icase(std::string_view haystack, std::string_view needle);
std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

std::string sha256_hex(std::string_view data);
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string base64_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Every balanced `{...}` span in `text` that parses as a JSON object, in
/// order of appearance. Braces inside JSON strings are respected.
std::vector<nlohmann::json> extract_json_objects(std::string_view text);

/// The first balanced span that parses as a JSON object, if any.
std::optional<nlohmann::json> first_json_object(std::string_view text);

/// Round half away from zero at `digits` decimals, tolerant of binary noise
/// (44.10 - 32.82 must display as 11.28).
double round_half_up(double value, int digits);

/// Fixed-point display with `digits` decimals after round_half_up.
std::string format_fixed(double value, int digits);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace lensrag
