// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "dynoffset/errors.hpp"

namespace dynoffset
{

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                   std::chars_format::general, 9);
    if (ec != std::errc())
        throw Error("number formatting failed");
    return std::string(buf.data(), ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header))
{
}

void CsvTable::add_row(std::vector<CsvField> row)
{
    if (row.size() != header_.size())
        throw Error("csv row has " + std::to_string(row.size())
                    + " fields, header has " + std::to_string(header_.size()));
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&out](const auto& fields, auto&& render) {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i)
                out += ',';
            out += render(fields[i]);
        }
        out += '\n';
    };
    line(header_, [](const std::string& s) { return s; });
    for (const auto& row : rows_)
    {
        line(row, [](const CsvField& f) {
            if (auto d = std::get_if<double>(&f))
                return format_number(*d);
            if (auto i = std::get_if<long long>(&f))
                return std::to_string(*i);
            return std::get<std::string>(f);
        });
    }
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> out;
    while (!text.empty())
    {
        const auto end = text.find('\n');
        const auto line = text.substr(0, end);
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true)
        {
            const auto comma = line.find(',', start);
            fields.emplace_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        out.push_back(std::move(fields));
        if (end == std::string_view::npos)
            break;
        text.remove_prefix(end + 1);
    }
    return out;
}

}  // namespace dynoffset
