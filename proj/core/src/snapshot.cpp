#include "calabi/snapshot.hpp"

#include "calabi/errors.hpp"
#include "calabi/grid.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace calabi {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'L', 'B', 'F'};

void put_u32(std::ostream& os, std::uint32_t v)
{
    std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xff),
                                   static_cast<unsigned char>((v >> 8) & 0xff),
                                   static_cast<unsigned char>((v >> 16) & 0xff),
                                   static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b.data()), b.size());
}

std::uint32_t get_u32(std::istream& is)
{
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), b.size());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8)
           | (static_cast<std::uint32_t>(b[2]) << 16)
           | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b.data()), b.size());
}

double get_f64(std::istream& is)
{
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), b.size());
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const SymplecticPotential& u)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw TraceIoError("cannot open snapshot for writing: " + path.string());
    }
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, kSnapshotVersion);
    put_u32(os, static_cast<std::uint32_t>(u.grid().dim));
    put_u32(os, static_cast<std::uint32_t>(u.grid().points_per_axis));
    for (double v : u.perturbation().values()) put_f64(os, v);
    if (!os) {
        throw TraceIoError("short write for snapshot: " + path.string());
    }
}

SymplecticPotential read_snapshot(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw TraceIoError("cannot open snapshot: " + path.string());
    }
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) {
        throw TraceIoError("bad snapshot magic in " + path.string());
    }
    const std::uint32_t version = get_u32(is);
    if (version != kSnapshotVersion) {
        throw TraceIoError("unsupported snapshot version " + std::to_string(version)
                           + " in " + path.string());
    }
    const std::uint32_t dim = get_u32(is);
    const std::uint32_t n = get_u32(is);
    if (!is) {
        throw TraceIoError("truncated snapshot header in " + path.string());
    }
    const Grid grid = make_grid(static_cast<int>(dim), static_cast<int>(n));

    std::vector<double> values(grid.point_count());
    for (double& v : values) v = get_f64(is);
    if (!is) {
        throw TraceIoError("truncated snapshot payload in " + path.string());
    }
    // Exactly the stored bytes, then one probe to confirm there is no junk tail.
    char extra;
    if (is.read(&extra, 1)) {
        throw TraceIoError("snapshot has trailing bytes: " + path.string());
    }
    return SymplecticPotential(ScalarField(grid, std::move(values)));
}

} // namespace calabi
