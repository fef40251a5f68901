#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fb/common/error.hpp"
#include "fb/data/data.hpp"

namespace fb::data {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t line, std::size_t column)
{
    double value = 0.0;
    const char* end = cell.data() + cell.size();
    // from_chars rejects a leading '+', which people do write.
    const char* begin = cell.data();
    if (!cell.empty() && cell.front() == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw DataError(fmt::format("{}: line {}, column {}: not a number: '{}'", source, line, column, cell));
    if (!std::isfinite(value))
        throw DataError(fmt::format("{}: line {}, column {}: non-finite value '{}'", source, line, column, cell));
    return value;
}

}  // namespace

Dataset parse_csv(std::string_view text, std::string_view source)
{
    std::size_t columns = 0;
    std::vector<double> inputs;
    std::vector<double> targets;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        const std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty())
            continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            columns = fields.size();
            if (columns < 2)
                throw DataError(fmt::format("{}: need at least 2 columns (features and a target), found {}", source,
                                            columns));
            continue;
        }
        if (fields.size() != columns)
            throw DataError(fmt::format("{}: line {}: expected {} columns, found {}", source, line_no, columns,
                                        fields.size()));
        for (std::size_t c = 0; c + 1 < columns; ++c)
            inputs.push_back(parse_cell(fields[c], source, line_no, c + 1));
        targets.push_back(parse_cell(fields.back(), source, line_no, columns));
    }
    if (!header_seen)
        throw DataError(fmt::format("{}: empty file (no header)", source));
    if (targets.empty())
        throw DataError(fmt::format("{}: no data rows", source));
    return Dataset(columns - 1, std::move(inputs), std::move(targets));
}

Dataset load_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), path);
}

std::string format_csv(const Dataset& data)
{
    std::string out;
    for (std::size_t i = 0; i < data.dim(); ++i)
        out += fmt::format("x{},", i);
    out += "y\n";
    for (std::size_t n = 0; n < data.size(); ++n) {
        for (double v : data.row(n))
            out += fmt::format("{},", v);
        out += fmt::format("{}\n", data.target(n));
    }
    return out;
}

void save_csv(const std::string& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    out << format_csv(data);
    if (!out)
        throw DataError("failed writing '" + path + "'");
}

}  // namespace fb::data
