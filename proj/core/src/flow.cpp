#include "calabi/flow.hpp"

#include "calabi/errors.hpp"
#include "calabi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace calabi {

namespace {

constexpr double kStepRtol = 1e-5;      // relative embedded-error tolerance
constexpr double kGuardTol = 1e-10;     // allowed uphill drift for K and the Calabi energy
constexpr double kDtMin = 1e-14;        // below this the run is declared lost
constexpr double kRelFloor = 1e-14;     // error-denominator floor near the flat state
constexpr int kC5Order = 5;

double fourth_power_symbol()
{
    const double two_pi = 2.0 * std::numbers::pi;
    return two_pi * two_pi * two_pi * two_pi;
}

struct StepOutcome {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    double error_rel = 0.0;
    ScalarField f;
    ScalarField s;
    double k_energy = 0.0;
    double calabi = 0.0;
};

// Integrating-factor Heun scheme for df/dt = L f + N(f) with L = -Lap^2
// treated exactly and N(f) = Lap^2 f - S(f) treated explicitly:
//   predictor  p = E (f + dt N(f))
//   corrector  c = E f + (dt/2)(E N(f) + N(p)),  E = exp(L dt) per mode.
// The corrector-predictor gap is the embedded error estimate.
class Engine {
public:
    Engine(const FlowConfig& cfg, const SymplecticPotential& u0, double t0,
           std::span<const double> sync_times)
        : cfg_(cfg), ws_(workspace_for(u0.grid())), t_(t0)
    {
        const SymplecticPotential u = u0.gauge_fixed() ? u0 : normalize(u0);
        require_admissible(u, cfg_.margin, "flow initial data");
        f_ = u.perturbation();
        s_ = abreu_scalar_curvature(u);
        k_ = k_energy(u);
        calabi_ = s_.dot(s_);

        sync_.assign(sync_times.begin(), sync_times.end());
        sync_.push_back(cfg_.t_max);
        std::sort(sync_.begin(), sync_.end());
        sync_.erase(std::unique(sync_.begin(), sync_.end()), sync_.end());
    }

    double t() const noexcept { return t_; }

    SymplecticPotential potential() const { return SymplecticPotential(f_); }

    // Attempt one step of the given effective size; updates the cached state
    // only on acceptance.
    StepOutcome attempt(double dt)
    {
        StepOutcome out = trial(dt);
        if (out.accepted) {
            f_ = std::move(out.f);
            s_ = std::move(out.s);
            k_ = out.k_energy;
            calabi_ = out.calabi;
        }
        return out;
    }

    // Next synchronization target strictly ahead of the current time.
    double next_sync() const
    {
        for (double s : sync_) {
            if (s > t_) return s;
        }
        return cfg_.t_max;
    }

    void set_time(double t) noexcept { t_ = t; }

    double current_k() const noexcept { return k_; }
    double current_calabi() const noexcept { return calabi_; }

private:
    StepOutcome trial(double dt)
    {
        const double c4 = fourth_power_symbol();
        const auto& ksq = ws_.wavenumber_sq();
        const std::vector<double> decay = ws_.decay_factors(dt);

        Spectrum fh = ws_.analyze(f_);
        Spectrum sh = ws_.analyze(s_);

        // N(f) in Fourier space.
        Spectrum n1{f_.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
        for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
            n1.coeff[j] = c4 * ksq[j] * ksq[j] * fh.coeff[j] - sh.coeff[j];
        }

        Spectrum ph{f_.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
        for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
            ph.coeff[j] = decay[j] * (fh.coeff[j] + dt * n1.coeff[j]);
        }
        ph.coeff[0] = 0.0;  // gauge projection
        const ScalarField p = ws_.synthesize(ph);

        StepOutcome out;
        const SymplecticPotential up(p);
        if (!check_admissibility(up, cfg_.margin).pass) {
            out.reason = RejectReason::Admissibility;
            return out;
        }

        const ScalarField sp = abreu_scalar_curvature(up);
        const Spectrum sph = ws_.analyze(sp);

        Spectrum ch{f_.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
        for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
            const std::complex<double> n2 =
                c4 * ksq[j] * ksq[j] * ph.coeff[j] - sph.coeff[j];
            ch.coeff[j] = decay[j] * fh.coeff[j]
                          + 0.5 * dt * (decay[j] * n1.coeff[j] + n2);
        }
        ch.coeff[0] = 0.0;
        ScalarField c = ws_.synthesize(ch);

        double err = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            err = std::max(err, std::abs(c[i] - p[i]));
        }
        out.error_rel = err / std::max(c.sup_norm(), kRelFloor);
        if (out.error_rel > kStepRtol) {
            out.reason = RejectReason::ErrorEstimate;
            return out;
        }

        SymplecticPotential uc(std::move(c));
        if (!check_admissibility(uc, cfg_.margin).pass) {
            out.reason = RejectReason::Admissibility;
            return out;
        }

        const ScalarField sc = abreu_scalar_curvature(uc);
        const double k_new = k_energy(uc);
        const double calabi_new = sc.dot(sc);
        if (k_new > k_ + kGuardTol) {
            out.reason = RejectReason::EnergyGuard;
            return out;
        }
        if (calabi_new > calabi_ + kGuardTol) {
            out.reason = RejectReason::CalabiGuard;
            return out;
        }

        out.accepted = true;
        out.f = uc.perturbation();
        out.s = sc;
        out.k_energy = k_new;
        out.calabi = calabi_new;
        return out;
    }

    FlowConfig cfg_;
    SpectralWorkspace& ws_;
    double t_;
    ScalarField f_;
    ScalarField s_;
    double k_ = 0.0;
    double calabi_ = 0.0;
    std::vector<double> sync_;
};

FlowTrace drive(const FlowConfig& cfg, Engine& engine, FlowTrace trace,
                double dt_proposal)
{
    const double t_end = cfg.t_max;
    double dt = dt_proposal;

    std::size_t accepted = 0;
    for (const StepRecord& r : trace.step_log) {
        if (r.accepted) ++accepted;
    }

    auto record_state = [&](FlowState&& st) {
        if (!trace.states.empty() && trace.states.back().t == st.t) return;
        trace.states.push_back(std::move(st));
    };

    if (trace.states.empty()) {
        trace.states.push_back(make_flow_state(engine.t(), engine.potential()));
    }

    // Terminal conditions can already hold at the starting state.
    {
        const FlowState& st = trace.states.back();
        if (st.c5 <= cfg.conv_threshold) {
            trace.termination = Termination::Converged;
            trace.next_dt = dt;
            return trace;
        }
        if (cfg.ricci_cap && st.ricci.sup_ricci_norm > *cfg.ricci_cap) {
            trace.termination = Termination::RicciCapExceeded;
            trace.next_dt = dt;
            return trace;
        }
    }

    while (true) {
        if (engine.t() >= t_end) {
            trace.termination = Termination::MaxTime;
            break;
        }

        const double target = engine.next_sync();
        double dt_eff = std::min(dt, target - engine.t());
        if (cfg.dt_max) dt_eff = std::min(dt_eff, *cfg.dt_max);
        const bool clipped = dt_eff < dt;

        StepOutcome out = engine.attempt(dt_eff);
        trace.step_log.push_back(StepRecord{engine.t(), dt_eff, out.accepted, out.reason});

        if (!out.accepted) {
            dt = 0.5 * dt_eff;
            if (dt < kDtMin) {
                trace.termination = Termination::AdmissibilityLoss;
                record_state(make_flow_state(engine.t(), engine.potential()));
                break;
            }
            continue;
        }

        const bool hit_target = dt_eff == target - engine.t();
        engine.set_time(hit_target ? target : engine.t() + dt_eff);
        ++accepted;

        if (!clipped && out.error_rel < 0.25 * kStepRtol) {
            dt = 2.0 * dt;
            if (cfg.dt_max) dt = std::min(dt, *cfg.dt_max);
        }

        FlowState st = make_flow_state(engine.t(), engine.potential());
        st.dt = dt_eff;

        const bool conv = st.c5 <= cfg.conv_threshold;
        const bool cap_hit = cfg.ricci_cap && st.ricci.sup_ricci_norm > *cfg.ricci_cap;
        const bool cadence = accepted % static_cast<std::size_t>(cfg.record_every) == 0;
        if (cadence || hit_target || conv || cap_hit) {
            record_state(std::move(st));
        }

        if (conv) {
            trace.termination = Termination::Converged;
            break;
        }
        if (cap_hit) {
            trace.termination = Termination::RicciCapExceeded;
            break;
        }
    }

    // The final integrated state always ends up recorded.
    record_state(make_flow_state(engine.t(), engine.potential()));
    trace.next_dt = dt;
    return trace;
}

} // namespace

const char* termination_name(Termination t)
{
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxTime: return "max_time";
        case Termination::AdmissibilityLoss: return "admissibility_loss";
        case Termination::RicciCapExceeded: return "ricci_cap_exceeded";
    }
    return "unknown";
}

const char* reject_reason_name(RejectReason r)
{
    switch (r) {
        case RejectReason::None: return "none";
        case RejectReason::ErrorEstimate: return "error_estimate";
        case RejectReason::EnergyGuard: return "energy_guard";
        case RejectReason::CalabiGuard: return "calabi_guard";
        case RejectReason::Admissibility: return "admissibility";
    }
    return "unknown";
}

void FlowConfig::validate() const
{
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (!(dt_init > 0.0)) throw ConfigError("dt_init must be positive");
    if (dt_init > t_max) throw ConfigError("dt_init exceeds t_max");
    if (!(conv_threshold >= 0.0)) throw ConfigError("conv_threshold must be >= 0");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    if (!(margin > 0.0)) throw ConfigError("margin must be positive");
    if (ricci_cap && !(*ricci_cap > 0.0)) throw ConfigError("ricci_cap must be positive");
    if (dt_max && !(*dt_max >= dt_init)) throw ConfigError("dt_max must be >= dt_init");
}

FlowState make_flow_state(double t, SymplecticPotential u)
{
    FlowState st;
    st.t = t;
    st.energy = energy_report(u);
    st.ricci = ricci_monitor(u);
    st.c5 = derivative_sup_norm(u.perturbation(), kC5Order);
    st.u = std::move(u);
    return st;
}

std::optional<std::size_t> FlowTrace::index_at_time(double t, double tol) const
{
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (std::abs(states[i].t - t) <= tol) return i;
    }
    return std::nullopt;
}

double c5_norm(const SymplecticPotential& u)
{
    return derivative_sup_norm(u.perturbation(), kC5Order);
}

FlowState step(const FlowState& state, double dt, const FlowConfig& config)
{
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    auto& ws = workspace_for(state.u.grid());
    const double c4 = fourth_power_symbol();
    const auto& ksq = ws.wavenumber_sq();
    const std::vector<double> decay = ws.decay_factors(dt);

    const SymplecticPotential u0 =
        state.u.gauge_fixed() ? state.u : normalize(state.u);
    require_admissible(u0, config.margin, "step");

    Spectrum fh = ws.analyze(u0.perturbation());
    Spectrum sh = ws.analyze(abreu_scalar_curvature(u0));

    Spectrum n1{u0.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
    for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
        n1.coeff[j] = c4 * ksq[j] * ksq[j] * fh.coeff[j] - sh.coeff[j];
    }
    Spectrum ph{u0.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
    for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
        ph.coeff[j] = decay[j] * (fh.coeff[j] + dt * n1.coeff[j]);
    }
    ph.coeff[0] = 0.0;
    const SymplecticPotential up(ws.synthesize(ph));
    require_admissible(up, config.margin, "step predictor");

    const Spectrum sph = ws.analyze(abreu_scalar_curvature(up));
    Spectrum ch{u0.grid(), std::vector<std::complex<double>>(fh.coeff.size())};
    for (std::size_t j = 0; j < fh.coeff.size(); ++j) {
        const std::complex<double> n2 = c4 * ksq[j] * ksq[j] * ph.coeff[j] - sph.coeff[j];
        ch.coeff[j] = decay[j] * fh.coeff[j] + 0.5 * dt * (decay[j] * n1.coeff[j] + n2);
    }
    ch.coeff[0] = 0.0;
    SymplecticPotential uc(ws.synthesize(ch));
    require_admissible(uc, config.margin, "step corrector");
    return make_flow_state(state.t + dt, std::move(uc));
}

FlowTrace run(const FlowConfig& config, const SymplecticPotential& initial,
              std::span<const double> sync_times)
{
    config.validate();
    Engine engine(config, initial, 0.0, sync_times);
    FlowTrace trace;
    trace.config = config;
    return drive(config, engine, std::move(trace), config.dt_init);
}

FlowTrace continue_run(const FlowConfig& config, const FlowTrace& checkpoint,
                       std::span<const double> sync_times)
{
    config.validate();
    if (checkpoint.states.empty()) {
        throw TraceIoError("continue_run: checkpoint has no recorded states");
    }
    const FlowState& last = checkpoint.final_state();
    Engine engine(config, last.u, last.t, sync_times);
    FlowTrace trace = checkpoint;
    trace.config = config;
    const double dt0 = checkpoint.next_dt > 0.0 ? checkpoint.next_dt : config.dt_init;
    return drive(config, engine, std::move(trace), dt0);
}

} // namespace calabi
