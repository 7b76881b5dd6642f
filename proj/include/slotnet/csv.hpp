#pragma once

#include <ostream>
#include <string>

#include "slotnet/experiments.hpp"

namespace slotnet {

// Formats a value with 9 significant digits.
std::string format_value(double value);

// Header line, then one line per row.
void write_csv(std::ostream& out, const ProtocolResult& result);

}  // namespace slotnet
