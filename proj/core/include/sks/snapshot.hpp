#pragma once

#include <cstdint>
#include <string>

#include "sks/domain.hpp"

namespace sks {

/// Grid snapshot file. Layout (little-endian):
///   bytes 0..3   magic "SKS1"
///   uint32       n
///   float64      L (half-width)
///   float64      t
///   uint64       params digest (FNV-1a 64 of the resolved config text)
///   float64[n*n] values, row-major (x fastest)
struct SnapshotHeader {
    std::uint32_t n = 0;
    double half_width = 0.0;
    double t = 0.0;
    std::uint64_t params_digest = 0;
};

std::uint64_t fnv1a64(const std::string& text);

void write_snapshot(const std::string& path, const Field& f, double t,
                    std::uint64_t params_digest);

/// Throws std::runtime_error on a missing, truncated or corrupted file.
Field read_snapshot(const std::string& path, SnapshotHeader* header = nullptr);

}  // namespace sks
