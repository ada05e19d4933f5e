#pragma once

#include "calabi/energetics.hpp"
#include "calabi/potential.hpp"
#include "calabi/toric.hpp"

#include <optional>
#include <span>
#include <vector>

namespace calabi {

enum class Termination {
    Converged,          // C^5 surrogate fell below the threshold
    MaxTime,            // reached t_max
    AdmissibilityLoss,  // positivity failed and the step size collapsed
    RicciCapExceeded,   // monitored Ricci bound was violated
};

const char* termination_name(Termination t);

struct FlowConfig {
    double t_max = 1e-2;
    double dt_init = 1e-6;
    double conv_threshold = 1e-8;       // on the C^5 surrogate of f
    std::optional<double> ricci_cap;    // sup-norm bound on the Ricci endomorphism
    int record_every = 1;               // record every k-th accepted step
    double margin = kDefaultAdmissibilityMargin;
    std::optional<double> dt_max;       // optional ceiling on the adaptive step

    void validate() const;  // throws ConfigError
};

// Snapshot of the evolving potential plus every monitored diagnostic.
struct FlowState {
    double t = 0.0;
    SymplecticPotential u;
    EnergyReport energy;
    RicciReport ricci;
    double c5 = 0.0;
    double dt = 0.0;  // size of the accepted step that produced this state
};

FlowState make_flow_state(double t, SymplecticPotential u);

// Why a trial step was rejected (or None when it was accepted).
enum class RejectReason { None, ErrorEstimate, EnergyGuard, CalabiGuard, Admissibility };

const char* reject_reason_name(RejectReason r);

// One attempted step, accepted or not, in attempt order.
struct StepRecord {
    double t = 0.0;   // time at the start of the attempt
    double dt = 0.0;
    bool accepted = false;
    RejectReason reason = RejectReason::None;
};

struct FlowTrace {
    FlowConfig config;
    std::vector<FlowState> states;
    std::vector<StepRecord> step_log;
    Termination termination = Termination::MaxTime;
    double next_dt = 0.0;  // step proposal a resumed run continues with

    const FlowState& initial() const { return states.front(); }
    const FlowState& final_state() const { return states.back(); }

    // Index of the recorded state at time t (within tol), if any.
    std::optional<std::size_t> index_at_time(double t, double tol = 1e-12) const;
};

// C^5 convergence surrogate of the perturbation.
double c5_norm(const SymplecticPotential& u);

// One accepted integrator step of size dt from the given state, bypassing
// the adaptive controller.  Throws InadmissibleMetric if positivity fails.
FlowState step(const FlowState& state, double dt, const FlowConfig& config = {});

// Evolve the potential under du/dt = -S(u) with the stabilized two-stage
// scheme and adaptive step control.  Every time in sync_times (plus t_max)
// is landed on exactly and recorded, so synchronized runs share grids of
// recorded times.  Throws InadmissibleMetric if the initial data already
// violates the margin.
FlowTrace run(const FlowConfig& config, const SymplecticPotential& initial,
              std::span<const double> sync_times = {});

// Resume a trace from its final recorded state and keep integrating until
// config.t_max.  With the same config and sync grid this reproduces an
// uninterrupted run bit for bit.
FlowTrace continue_run(const FlowConfig& config, const FlowTrace& checkpoint,
                       std::span<const double> sync_times = {});

} // namespace calabi
