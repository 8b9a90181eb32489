#pragma once

#include <cstdint>
#include <string>

namespace coopmag {

// FNV-1a 64-bit; stable, documented checksum for run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

// Write-to-temp then rename, so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
void ensure_directory(const std::string& path);
std::size_t file_size(const std::string& path);

// Shortest round-trippable decimal form ("%.17g"); bit-stable outputs.
std::string format_double(double v);

}  // namespace coopmag
