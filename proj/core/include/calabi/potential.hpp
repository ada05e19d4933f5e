#pragma once

#include "calabi/field.hpp"
#include "calabi/grid.hpp"

#include <array>
#include <span>

namespace calabi {

// One cosine mode of the periodic perturbation: wavevector k (second entry
// ignored in dim 1) and amplitude.
struct ModeAmplitude {
    std::array<int, 2> k{0, 0};
    double amplitude = 0.0;
};

// Torus-invariant Kahler data in action-angle form.  The potential is
// u(x) = |x|^2/2 + f(x) with f periodic on the unit cell; only the
// perturbation f is stored, the quadratic part is implicit.  The gauge is
// fixed by requiring f to have zero grid mean, which pins the additive
// constant that the geometry cannot see.
class SymplecticPotential {
public:
    SymplecticPotential() = default;
    explicit SymplecticPotential(ScalarField f);

    static SymplecticPotential flat(Grid grid);
    static SymplecticPotential from_modes(Grid grid, std::span<const ModeAmplitude> modes);

    const Grid& grid() const noexcept { return f_.grid(); }
    const ScalarField& perturbation() const noexcept { return f_; }
    bool gauge_fixed() const noexcept { return gauge_fixed_; }

private:
    ScalarField f_;
    bool gauge_fixed_ = false;
};

// Project onto the zero-mean gauge slice by subtracting the grid mean of f.
SymplecticPotential normalize(const SymplecticPotential& u);

// L2 difference of perturbations; grids must agree.
ScalarField perturbation_difference(const SymplecticPotential& a, const SymplecticPotential& b);

} // namespace calabi
