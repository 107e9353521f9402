#include "sccl/fixture.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "sccl/errors.hpp"

namespace sccl {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'X', '1'};

void put_u64_le(std::uint64_t v, unsigned char* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t get_u64_le(const unsigned char* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

void fixture_write(const Tensor4& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");

  unsigned char header[4 + 4 * 8];
  std::memcpy(header, kMagic, 4);
  put_u64_le(static_cast<std::uint64_t>(t.n()), header + 4);
  put_u64_le(static_cast<std::uint64_t>(t.c()), header + 12);
  put_u64_le(static_cast<std::uint64_t>(t.h()), header + 20);
  put_u64_le(static_cast<std::uint64_t>(t.w()), header + 28);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));

  const std::int64_t count = t.size();
  const double* data = t.data();
  std::vector<unsigned char> payload(static_cast<std::size_t>(count) * 8);
  for (std::int64_t i = 0; i < count; ++i) {
    put_u64_le(std::bit_cast<std::uint64_t>(data[i]), payload.data() + 8 * i);
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError("write to '" + path + "' failed");
}

Tensor4 fixture_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");

  unsigned char header[4 + 4 * 8];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(header))) {
    throw FormatError("'" + path + "': truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    throw FormatError("'" + path + "': bad magic tag");
  }

  const std::uint64_t extents[4] = {get_u64_le(header + 4), get_u64_le(header + 12),
                                    get_u64_le(header + 20), get_u64_le(header + 28)};
  // Reject extents that are zero or could not fit in memory anyway; the
  // product bound also stops overflow in the element count below.
  constexpr std::uint64_t kMaxElements = 1ull << 32;
  std::uint64_t count = 1;
  for (std::uint64_t e : extents) {
    if (e == 0 || e > kMaxElements || count > kMaxElements / e) {
      throw FormatError("'" + path + "': nonsensical extents in header");
    }
    count *= e;
  }

  Tensor4 t(static_cast<std::int64_t>(extents[0]), static_cast<std::int64_t>(extents[1]),
            static_cast<std::int64_t>(extents[2]), static_cast<std::int64_t>(extents[3]));
  std::vector<unsigned char> payload(static_cast<std::size_t>(count) * 8);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    throw FormatError("'" + path + "': payload shorter than extents imply");
  }
  char extra;
  in.read(&extra, 1);
  if (!in.eof()) throw FormatError("'" + path + "': trailing bytes after payload");

  double* data = t.data();
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<double>(get_u64_le(payload.data() + 8 * i));
  }
  return t;
}

}  // namespace sccl
