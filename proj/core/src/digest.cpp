#include "costreach/digest.hpp"

#include <fstream>
#include <vector>

#include "costreach/errors.hpp"

namespace costreach {

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::byte b : bytes) {
    hash ^= static_cast<std::uint64_t>(b);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string digest_bytes(std::span<const std::byte> bytes) { return to_hex(fnv1a64(bytes)); }

std::string digest_text(std::string_view text) { return to_hex(fnv1a64(text)); }

std::string digest_doubles(std::span<const double> values) {
  return digest_bytes(std::as_bytes(values));
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file for digest: " + path.string());
  std::vector<char> buffer(std::istreambuf_iterator<char>(in), {});
  return digest_bytes(std::as_bytes(std::span<const char>(buffer)));
}

}  // namespace costreach
