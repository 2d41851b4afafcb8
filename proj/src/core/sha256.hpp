#pragma once

#include <cstdint>
#include <string>

namespace levyham {

/// SHA-256 digest as a lowercase hex string.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
/// Digest of a file's bytes; throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace levyham
