#pragma once

#include "calabi/potential.hpp"

#include <cstdint>
#include <filesystem>

namespace calabi {

// Binary snapshot of a potential's perturbation field.  Layout, all
// little-endian:
//   bytes 0..3   magic "CLBF"
//   bytes 4..7   format version (currently 1)
//   bytes 8..11  grid dimension
//   bytes 12..15 points per axis
//   then point_count() IEEE doubles, row-major.
// Round trips are bit-exact, which checkpoint/resume relies on.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const SymplecticPotential& u);
SymplecticPotential read_snapshot(const std::filesystem::path& path);

} // namespace calabi
