// SPDX-License-Identifier: Apache-2.0
//
// Locale-independent CSV emission: comma separators, '\n' line ends,
// 9 significant digits.
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynoffset
{

using CsvField = std::variant<double, long long, std::string>;

//! Shortest general form with 9 significant digits; "inf", "-inf", "nan".
std::string format_number(double x);

class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> header);

    //! Throws Error when the row width differs from the header.
    void add_row(std::vector<CsvField> row);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvField>> rows_;
};

//! Parse the subset of CSV this module writes (no quoting).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace dynoffset
