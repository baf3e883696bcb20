#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "avgh/types.hpp"

namespace avgh {

/// Locale-independent text with 17 significant digits; inf/nan spelled out.
std::string format_number(double x);
/// "re", "re+imi" or "re-imi".
std::string format_complex(cplx z);
/// Rows separated by "; ", entries by spaces.
std::string format_matrix(const Mat& m);
std::string format_vector(const Vec& v);

/// Parses the format_complex spelling plus plain reals, "i", "-2i", "1e-3+2.5i".
cplx parse_complex(const std::string& token);
/// Parses "a b; c d". Throws ValidationError on ragged rows.
Mat parse_matrix(const std::string& text);

/// Writes the file through a sibling temporary and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace avgh
