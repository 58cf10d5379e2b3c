#include "smrec/checksum.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "smrec/common.hpp"

namespace smrec {

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  Fnv1a hash;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    hash.add_bytes({reinterpret_cast<const unsigned char*>(buf.data()), got});
  }
  return hash.digest();
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace smrec
