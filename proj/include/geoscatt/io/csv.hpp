// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geoscatt {

/// Splits one CSV record. Double-quoted fields may contain the delimiter;
/// "" inside quotes is a literal quote. Trailing CR is dropped.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter = ',');

std::string_view trim(std::string_view s);

/// Quotes a field if it contains the delimiter, a quote or a newline.
std::string csv_escape(std::string_view field, char delimiter = ',');

}  // namespace geoscatt
