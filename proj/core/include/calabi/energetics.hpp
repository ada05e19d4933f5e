#pragma once

#include "calabi/potential.hpp"
#include "calabi/toric.hpp"

namespace calabi {

struct EnergyReport {
    double k_energy = 0.0;
    double calabi_energy = 0.0;
    double mean_scalar = 0.0;
};

// Grid mean of the scalar curvature.  Vanishes identically for periodic
// potentials (S is a sum of derivatives), so the returned value doubles as
// a discretization diagnostic.
double mean_scalar(const SymplecticPotential& u);

// K-energy relative to the flat potential:
//   K(u) = -integral of log det Hess u ,
// normalized so K(flat) = 0.  Requires an admissible, gauge-fixed u.
double k_energy(const SymplecticPotential& u);

// L2 gradient of K on the gauge slice; coincides with the scalar curvature.
ScalarField k_energy_gradient(const SymplecticPotential& u);

// Calabi energy: the squared L2 norm of (S - mean S), with mean S = 0 here.
double calabi_energy(const SymplecticPotential& u);

EnergyReport energy_report(const SymplecticPotential& u);

} // namespace calabi
