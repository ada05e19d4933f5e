#pragma once

#include <cstddef>

namespace calabi {

// Uniform periodic grid on [0,1)^dim.  Only dim 1 and 2 are supported, and
// the per-axis point count must be a power of two >= 16 so that the spectral
// transforms and the 2/3-rule dealias cutoff are always well defined.
struct Grid {
    int dim = 1;
    int points_per_axis = 0;

    double spacing() const noexcept { return 1.0 / points_per_axis; }

    std::size_t point_count() const noexcept {
        std::size_t n = static_cast<std::size_t>(points_per_axis);
        return dim == 1 ? n : n * n;
    }

    // Largest retained wavenumber under the 2/3 rule.
    int dealias_cutoff() const noexcept { return points_per_axis / 3; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

// Validating constructor; throws ConfigError on unsupported parameters.
Grid make_grid(int dim, int points_per_axis);

} // namespace calabi
