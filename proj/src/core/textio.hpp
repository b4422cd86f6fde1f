#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fxcast {

// Shortest fixed-significant-digit decimal form, locale-independent.
std::string fmt_sig(double x, int significant_digits);

std::vector<std::string> split_csv_line(const std::string& line);

// Locale-independent strict parsers; `context` names the row/column in errors.
double parse_double(const std::string& text, const std::string& context);
std::int64_t parse_int64(const std::string& text, const std::string& context);

}  // namespace fxcast
