#pragma once

#include "calabi/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace calabi {

// Real scalar field sampled on a Grid.  Dim-2 fields are stored row-major
// (value at (ix, iy) sits at ix * n + iy); dim-1 fields are indexed by ix
// alone.  All norms and inner products below use the normalized grid
// measure (mean over points), which matches integration over the unit cell.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(Grid grid, double fill = 0.0);
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double at(int ix, int iy = 0) const noexcept { return values_[flat_index(ix, iy)]; }
    double& at(int ix, int iy = 0) noexcept { return values_[flat_index(ix, iy)]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double c);

    double mean() const;
    double sup_norm() const;
    // sqrt of the mean square: the L2 norm for the unit-volume cell.
    double l2_norm() const;
    // Mean of the pointwise product: the matching L2 inner product.
    double dot(const ScalarField& other) const;

    bool all_finite() const;

private:
    std::size_t flat_index(int ix, int iy) const noexcept {
        // One-dimensional fields ignore the second index entirely.
        return grid_.dim == 1 ? static_cast<std::size_t>(ix)
                              : static_cast<std::size_t>(ix) * grid_.points_per_axis + iy;
    }

    Grid grid_{};
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);

// Pointwise product, with grid agreement checked.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Throws GridMismatch unless both fields share a grid.
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

} // namespace calabi
