#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace costreach {

// FNV-1a, 64 bit. Used to fingerprint buffers, files and resolved configs;
// not a cryptographic hash.
std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::uint64_t fnv1a64(std::string_view text);

std::string to_hex(std::uint64_t value);

std::string digest_bytes(std::span<const std::byte> bytes);
std::string digest_text(std::string_view text);
std::string digest_doubles(std::span<const double> values);
std::string digest_file(const std::filesystem::path& path);

}  // namespace costreach
