#include "calabi/grid.hpp"

#include "calabi/errors.hpp"

#include <string>

namespace calabi {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

Grid make_grid(int dim, int points_per_axis)
{
    if (dim != 1 && dim != 2) {
        throw ConfigError("grid dim must be 1 or 2, got " + std::to_string(dim));
    }
    if (points_per_axis < 16 || !is_power_of_two(points_per_axis)) {
        throw ConfigError("points_per_axis must be a power of two >= 16, got "
                          + std::to_string(points_per_axis));
    }
    return Grid{dim, points_per_axis};
}

} // namespace calabi
