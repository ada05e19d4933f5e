#pragma once

#include "calabi/flow.hpp"
#include "calabi/potential.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace calabi {

// Uniform-geometry class: two-sided Hessian eigenvalue bounds plus a C^3
// surrogate bound on the perturbation.
struct StabilityClass {
    double lambda = 0.0;   // lower eigenvalue bound
    double Lambda = 0.0;   // upper eigenvalue bound
    double k_bound = 0.0;  // bound on the C^3 surrogate
};

bool class_membership(const SymplecticPotential& u, const StabilityClass& cls);

// Tightest class containing every recorded state of a trace.
StabilityClass class_envelope(const FlowTrace& trace);

// The segment s -> s * phi of scaled perturbations.
std::vector<SymplecticPotential> path_family(const SymplecticPotential& phi,
                                             std::span<const double> s_values);

struct SweepRun {
    double s = 0.0;
    bool initial_admissible = false;
    Termination verdict = Termination::AdmissibilityLoss;
    std::optional<FlowTrace> trace;  // absent when the start was inadmissible
};

struct SweepResult {
    std::vector<SweepRun> runs;
    // Maximal closed intervals [s_lo, s_hi] of consecutive converged runs.
    std::vector<std::pair<double, double>> converged_intervals;
};

// Flow every member of the family s*phi for s on a uniform grid over [0,1];
// the runs execute concurrently.
SweepResult sweep(const SymplecticPotential& phi, int s_steps, const FlowConfig& config);

struct StabilityProbeResult {
    double t0 = 0.0;
    std::vector<double> epsilons;
    std::vector<double> deviations;       // C^5 surrogate of u_eps(t0) - u_0(t0)
    std::vector<double> deviations_high;  // order-7 surrogate (smoothing trend)
    std::vector<double> ratios;           // deviations / eps
    double measured_constant = 0.0;       // max ratio: the Lipschitz estimate
};

// Continuous dependence on initial data: flow the base potential and
// perturbations base + eps * direction to time t0 and compare.
StabilityProbeResult stability_probe(const SymplecticPotential& base,
                                     const ScalarField& direction, double t0,
                                     std::span<const double> epsilons,
                                     const FlowConfig& config);

struct DeltaCrossing {
    std::size_t run_index = 0;
    bool never_above = false;              // Calabi energy never exceeded delta
    std::optional<double> last_crossing;   // last downward crossing of delta
};

// For each trace, the last time its Calabi energy crossed delta from above
// (linear interpolation between recorded states).
std::vector<DeltaCrossing> delta_level_probe(std::span<const FlowTrace> traces,
                                             double delta);

} // namespace calabi
