#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "slotnet/growth.hpp"

namespace slotnet {

inline constexpr const char* kNetworkFormat = "slotnet-network";
inline constexpr int kNetworkSchemaVersion = 1;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Single JSON document with a format tag and schema version.
void save_network(const Network& net, std::ostream& out);
Network load_network(std::istream& in);

void save_network_file(const Network& net, const std::string& path);
Network load_network_file(const std::string& path);

}  // namespace slotnet
