#pragma once

#include <filesystem>

#include "rcrl/oracle/grid.hpp"

namespace rcrl::oracle {

// CSV: header `axis0,axis1,...,value`, one row per node in row-major order.
void WriteGridCsv(const std::filesystem::path& path, const ValueGrid& grid);
void WriteMaskCsv(const std::filesystem::path& path, const KernelMask& mask);
/// Rebuilds the grid from node coordinates. Throws std::runtime_error on a
/// malformed file or a non-rectangular / incomplete set of nodes.
ValueGrid ReadGridCsv(const std::filesystem::path& path);

// Binary: 16-byte header (8-byte magic "RCRLGRID", uint32 version, uint32
// dims), then per axis {double lower, double upper, uint32 count, uint32 pad},
// then the float64 values, all little-endian.
void WriteGridBinary(const std::filesystem::path& path, const ValueGrid& grid);
ValueGrid ReadGridBinary(const std::filesystem::path& path);

}  // namespace rcrl::oracle
