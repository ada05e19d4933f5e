#include "calabi/fixtures.hpp"

#include "calabi/errors.hpp"
#include "calabi/toric.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace calabi {

namespace {

SymplecticPotential cosine_1d(const Grid& grid, double amplitude)
{
    const ModeAmplitude mode{{1, 0}, amplitude};
    return SymplecticPotential::from_modes(grid, {&mode, 1});
}

} // namespace

bool is_fixture_name(std::string_view name)
{
    return name == "F0" || name == "F1" || name == "F1b" || name == "F2"
           || name == "F2r" || name == "F3";
}

Grid default_fixture_grid(std::string_view name)
{
    if (!is_fixture_name(name)) {
        throw ConfigError("unknown fixture '" + std::string(name) + "'");
    }
    return name == "F2" ? make_grid(2, 64) : make_grid(1, 256);
}

SymplecticPotential fixture(std::string_view name, const Grid& grid)
{
    if (name == "F0") return SymplecticPotential::flat(grid);
    if (name == "F1") return cosine_1d(grid, 0.01);
    if (name == "F1b") return cosine_1d(grid, 0.001);
    if (name == "F3") return cosine_1d(grid, 0.05);
    if (name == "F2r") return cosine_1d(grid, 0.005);
    if (name == "F2") {
        if (grid.dim != 2) throw ConfigError("fixture F2 needs a dim-2 grid");
        const ModeAmplitude modes[] = {{{1, 0}, 0.005}, {{0, 1}, 0.005}};
        return SymplecticPotential::from_modes(grid, modes);
    }
    throw ConfigError("unknown fixture '" + std::string(name) + "'");
}

SymplecticPotential random_potential(const Grid& grid, std::uint64_t seed,
                                     double decay, double amp)
{
    constexpr int kMaxWavenumber = 6;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ModeAmplitude> modes;
    auto weight = [&](int k0, int k1) {
        const double kk = std::sqrt(static_cast<double>(k0) * k0
                                    + static_cast<double>(k1) * k1);
        return amp * std::pow(kk, -decay) * gauss(rng);
    };
    if (grid.dim == 1) {
        for (int k = 1; k <= kMaxWavenumber; ++k) {
            modes.push_back({{k, 0}, weight(k, 0)});
        }
    } else {
        // Half-plane of wavevectors (conjugates are implied by using cosines).
        for (int k0 = 0; k0 <= kMaxWavenumber; ++k0) {
            for (int k1 = -kMaxWavenumber; k1 <= kMaxWavenumber; ++k1) {
                if (k0 == 0 && k1 <= 0) continue;
                modes.push_back({{k0, k1}, weight(k0, k1)});
            }
        }
    }
    return SymplecticPotential::from_modes(grid, modes);
}

SymplecticPotential random_admissible(const Grid& grid, std::uint64_t seed, double floor)
{
    if (!(floor > 0.0 && floor < 1.0)) {
        throw ConfigError("random_admissible: floor must be in (0,1)");
    }
    const SymplecticPotential raw = random_potential(grid, seed, /*decay=*/2.0);
    const SymmetricMatrixField h = hessian(raw);
    const ScalarField lo = h.min_eigenvalues();
    double lmin = std::numeric_limits<double>::infinity();
    for (double v : lo.values()) lmin = std::min(lmin, v);
    // Hess(raw) has min eigenvalue lmin - 1; scaling f by tau scales that
    // linearly, so tau * (1 - lmin) <= 1 - floor keeps the bound.
    const double deficit = 1.0 - lmin;
    double tau = 1.0;
    if (deficit > 1.0 - floor) tau = (1.0 - floor) / deficit;
    ScalarField f = raw.perturbation();
    f *= tau;
    return SymplecticPotential(std::move(f));
}

} // namespace calabi
