#include "slotnet/csv.hpp"

#include <cmath>
#include <cstdio>

namespace slotnet {

std::string format_value(double value)
{
    if (value == 0.0) {
        return "0";  // folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_csv(std::ostream& out, const ProtocolResult& result)
{
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        out << (i ? "," : "") << result.columns[i];
    }
    out << '\n';
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_value(row[i]);
        }
        out << '\n';
    }
}

}  // namespace slotnet
