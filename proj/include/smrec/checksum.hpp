#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <type_traits>

namespace smrec {

/// 64-bit FNV-1a. Used for input fingerprints and cache keys, not security.
class Fnv1a {
public:
  void add_bytes(std::span<const unsigned char> bytes) {
    for (unsigned char b : bytes) {
      state_ ^= b;
      state_ *= 0x100000001b3ULL;
    }
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void add_value(const T& value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    add_bytes(buf);
  }

  std::uint64_t digest() const noexcept { return state_; }

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Checksum of a file's bytes. Throws DataError if the file cannot be read.
std::uint64_t file_checksum(const std::filesystem::path& path);

std::string to_hex(std::uint64_t value);

}  // namespace smrec
