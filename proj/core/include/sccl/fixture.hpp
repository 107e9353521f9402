#pragma once

#include <string>

#include "sccl/tensor.hpp"

namespace sccl {

/// Binary tensor fixture format: 4-byte magic tag "DSX1", four 64-bit
/// little-endian unsigned extents (n, c, h, w), then n*c*h*w IEEE-754
/// doubles, little-endian, row-major. Round-trips are bit-exact.

/// Writes t to path; throws FormatError when the file cannot be written.
void fixture_write(const Tensor4& t, const std::string& path);

/// Reads a fixture; throws FormatError on a missing file, bad magic,
/// nonsensical extents, truncated payload, or trailing bytes.
Tensor4 fixture_read(const std::string& path);

}  // namespace sccl
