#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lendfair {

/// Fixed 10-significant-digit rendering used by every CSV output.
std::string format_sig10(double value);

/// Splits one CSV line on commas and trims surrounding whitespace. No quoting.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace lendfair
