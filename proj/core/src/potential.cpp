#include "calabi/potential.hpp"

#include "calabi/errors.hpp"

#include <cmath>
#include <numbers>

namespace calabi {

namespace {

// Absolute tolerance on the grid mean below which a perturbation counts as
// gauge-fixed.  Exact-zero sums are not reachable in floating point, so the
// constructor classifies rather than demands bitwise zero.
constexpr double kGaugeTol = 1e-12;

} // namespace

SymplecticPotential::SymplecticPotential(ScalarField f) : f_(std::move(f))
{
    gauge_fixed_ = std::abs(f_.mean()) <= kGaugeTol;
}

SymplecticPotential SymplecticPotential::flat(Grid grid)
{
    return SymplecticPotential(ScalarField(grid, 0.0));
}

SymplecticPotential SymplecticPotential::from_modes(Grid grid,
                                                    std::span<const ModeAmplitude> modes)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ScalarField f(grid);
    const int n = grid.points_per_axis;
    const double h = grid.spacing();
    for (const ModeAmplitude& m : modes) {
        if (m.k[0] == 0 && (grid.dim == 1 || m.k[1] == 0)) {
            throw ConfigError("from_modes: the zero mode is fixed by the gauge");
        }
        if (grid.dim == 1) {
            for (int i = 0; i < n; ++i) {
                f.at(i) += m.amplitude * std::cos(two_pi * m.k[0] * i * h);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    f.at(i, j) += m.amplitude
                                  * std::cos(two_pi * (m.k[0] * i * h + m.k[1] * j * h));
                }
            }
        }
    }
    return SymplecticPotential(std::move(f));
}

SymplecticPotential normalize(const SymplecticPotential& u)
{
    ScalarField f = u.perturbation();
    const double mu = f.mean();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= mu;
    return SymplecticPotential(std::move(f));
}

ScalarField perturbation_difference(const SymplecticPotential& a, const SymplecticPotential& b)
{
    require_same_grid(a.perturbation(), b.perturbation(), "perturbation_difference");
    return a.perturbation() - b.perturbation();
}

} // namespace calabi
