#include "calabi/energetics.hpp"

#include <stdexcept>

namespace calabi {

double mean_scalar(const SymplecticPotential& u)
{
    return abreu_scalar_curvature(u).mean();
}

double k_energy(const SymplecticPotential& u)
{
    if (!u.gauge_fixed()) {
        throw std::invalid_argument("k_energy requires a gauge-fixed potential");
    }
    return -log_det_hessian(u).mean();
}

ScalarField k_energy_gradient(const SymplecticPotential& u)
{
    return abreu_scalar_curvature(u);
}

double calabi_energy(const SymplecticPotential& u)
{
    const ScalarField s = abreu_scalar_curvature(u);
    return s.dot(s);
}

EnergyReport energy_report(const SymplecticPotential& u)
{
    const ScalarField s = abreu_scalar_curvature(u);
    EnergyReport rep;
    rep.k_energy = k_energy(u);
    rep.calabi_energy = s.dot(s);
    rep.mean_scalar = s.mean();
    return rep;
}

} // namespace calabi
