#pragma once

#include <cstdint>
#include <string>

namespace overdx {

// FNV-1a 64-bit, used to fingerprint input files in reports.
std::uint64_t fnv1a64(const std::string& data);
std::string digest_hex(const std::string& data);
std::string digest_file(const std::string& path);  // throws on missing file

}  // namespace overdx
