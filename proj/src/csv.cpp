#include "lendfair/csv.hpp"

#include <cmath>
#include <cstdio>

namespace lendfair {

std::string format_sig10(double value)
{
    if (std::isnan(value))
    {
        return "nan";
    }
    if (std::isinf(value))
    {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0)
    {
        return "0";  // folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    auto trim = [](std::string_view s) {
        auto const first = s.find_first_not_of(" \t\r");
        if (first == std::string_view::npos)
        {
            return std::string{};
        }
        auto const last = s.find_last_not_of(" \t\r");
        return std::string{s.substr(first, last - first + 1)};
    };
    std::size_t start = 0;
    for (;;)
    {
        auto const comma = line.find(',', start);
        if (comma == std::string_view::npos)
        {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

}  // namespace lendfair
