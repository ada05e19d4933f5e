#include "calabi/mabuchi.hpp"

#include "calabi/energetics.hpp"
#include "calabi/errors.hpp"

#include <stdexcept>
#include <utility>

namespace calabi {

GeodesicSegment make_geodesic(SymplecticPotential start, SymplecticPotential end)
{
    require_same_grid(start.perturbation(), end.perturbation(), "make_geodesic");
    if (!start.gauge_fixed() || !end.gauge_fixed()) {
        throw std::invalid_argument("make_geodesic requires gauge-fixed endpoints");
    }
    return GeodesicSegment{std::move(start), std::move(end)};
}

SymplecticPotential geodesic_point(const GeodesicSegment& seg, double t)
{
    if (t < 0.0 || t > 1.0) {
        throw ConfigError("geodesic_point: parameter outside [0,1]");
    }
    ScalarField f = seg.start.perturbation();
    f *= (1.0 - t);
    ScalarField g = seg.end.perturbation();
    g *= t;
    f += g;
    return SymplecticPotential(std::move(f));
}

double distance(const SymplecticPotential& a, const SymplecticPotential& b)
{
    return perturbation_difference(a, b).l2_norm();
}

double distance_derivative(const SymplecticPotential& moving,
                           const ScalarField& velocity,
                           const SymplecticPotential& anchor)
{
    const double d = distance(moving, anchor);
    if (d == 0.0) {
        throw ConfigError("distance_derivative is undefined at coincident potentials");
    }
    const ScalarField diff = perturbation_difference(moving, anchor);
    return diff.dot(velocity) / d;
}

ConvexityBound convexity_lower_bound(const SymplecticPotential& u,
                                     const SymplecticPotential& v)
{
    require_same_grid(u.perturbation(), v.perturbation(), "convexity_lower_bound");
    const ScalarField grad = k_energy_gradient(u);
    const ScalarField dir = perturbation_difference(v, u);
    return ConvexityBound{k_energy(v) - k_energy(u), grad.dot(dir)};
}

} // namespace calabi
