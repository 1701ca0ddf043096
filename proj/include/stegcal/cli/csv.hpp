#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stegcal::csv {

// Quotes a field when it contains a separator, quote or newline.
std::string escape(std::string_view field);

// RFC 4180-style parse: quoted fields, doubled quotes, LF or CRLF rows.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Shortest text that round-trips the double exactly.
std::string number(double v);

std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace stegcal::csv
