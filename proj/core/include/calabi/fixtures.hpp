#pragma once

#include "calabi/grid.hpp"
#include "calabi/potential.hpp"

#include <cstdint>
#include <string_view>

namespace calabi {

// Named test potentials used across the suites and the CLI:
//   F0   flat metric (zero perturbation)
//   F1   0.01  * cos(2 pi x)            dim 1, comfortably admissible
//   F1b  0.001 * cos(2 pi x)            dim 1, near-linear regime
//   F2   0.005 * (cos(2 pi x) + cos(2 pi y))   dim 2
//   F2r  0.005 * cos(2 pi x)            dim 1 restriction of F2's x-axis part
//   F3   0.05  * cos(2 pi x)            dim 1, NOT admissible (eigenvalue < 0)
SymplecticPotential fixture(std::string_view name, const Grid& grid);

// The conventional grid each fixture is quoted on (dim 2, 64 for F2;
// dim 1, 256 otherwise).
Grid default_fixture_grid(std::string_view name);

bool is_fixture_name(std::string_view name);

// Deterministic random band-limited perturbation: modes up to wavenumber 6
// per axis with amplitudes amp * |k|^{-decay} and Gaussian weights drawn
// from mt19937_64(seed).  Gauge-fixed by construction.
SymplecticPotential random_potential(const Grid& grid, std::uint64_t seed,
                                     double decay, double amp = 0.01);

// Random potential rescaled so the Hessian keeps min eigenvalue >= floor.
SymplecticPotential random_admissible(const Grid& grid, std::uint64_t seed,
                                      double floor = 0.7);

} // namespace calabi
