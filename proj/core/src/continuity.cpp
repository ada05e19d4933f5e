#include "calabi/continuity.hpp"

#include "calabi/errors.hpp"
#include "calabi/spectral.hpp"
#include "calabi/toric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace calabi {

namespace {

constexpr int kC3Order = 3;

// Eigenvalue range of Hess u over the grid.
std::pair<double, double> eigen_range(const SymplecticPotential& u)
{
    const SymmetricMatrixField h = hessian(u);
    const ScalarField lo = h.min_eigenvalues();
    const ScalarField hi = h.max_eigenvalues();
    double lmin = std::numeric_limits<double>::infinity();
    double lmax = -lmin;
    for (double v : lo.values()) lmin = std::min(lmin, v);
    for (double v : hi.values()) lmax = std::max(lmax, v);
    return {lmin, lmax};
}

// Run fn(i) for i in [0, n) on up to hardware_concurrency() threads.  Each
// worker pulls indices from a shared counter; exceptions are rethrown on the
// calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto body = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

bool class_membership(const SymplecticPotential& u, const StabilityClass& cls)
{
    const auto [lmin, lmax] = eigen_range(u);
    if (lmin < cls.lambda || lmax > cls.Lambda) return false;
    return derivative_sup_norm(u.perturbation(), kC3Order) <= cls.k_bound;
}

StabilityClass class_envelope(const FlowTrace& trace)
{
    StabilityClass cls;
    cls.lambda = std::numeric_limits<double>::infinity();
    cls.Lambda = -cls.lambda;
    cls.k_bound = 0.0;
    for (const FlowState& st : trace.states) {
        const auto [lmin, lmax] = eigen_range(st.u);
        cls.lambda = std::min(cls.lambda, lmin);
        cls.Lambda = std::max(cls.Lambda, lmax);
        cls.k_bound =
            std::max(cls.k_bound, derivative_sup_norm(st.u.perturbation(), kC3Order));
    }
    return cls;
}

std::vector<SymplecticPotential> path_family(const SymplecticPotential& phi,
                                             std::span<const double> s_values)
{
    std::vector<SymplecticPotential> family;
    family.reserve(s_values.size());
    for (double s : s_values) {
        ScalarField f = phi.perturbation();
        f *= s;
        family.emplace_back(std::move(f));
    }
    return family;
}

SweepResult sweep(const SymplecticPotential& phi, int s_steps, const FlowConfig& config)
{
    if (s_steps < 2) throw ConfigError("sweep needs at least two family members");
    config.validate();

    std::vector<double> s_values(static_cast<std::size_t>(s_steps));
    for (int i = 0; i < s_steps; ++i) {
        s_values[static_cast<std::size_t>(i)] = static_cast<double>(i) / (s_steps - 1);
    }
    const std::vector<SymplecticPotential> family = path_family(phi, s_values);

    SweepResult res;
    res.runs.resize(family.size());
    parallel_for(family.size(), [&](std::size_t i) {
        SweepRun& r = res.runs[i];
        r.s = s_values[i];
        try {
            FlowTrace tr = run(config, family[i]);
            r.initial_admissible = true;
            r.verdict = tr.termination;
            r.trace = std::move(tr);
        } catch (const InadmissibleMetric&) {
            r.initial_admissible = false;
            r.verdict = Termination::AdmissibilityLoss;
        }
    });

    // Stitch consecutive converged runs into closed parameter intervals.
    std::optional<double> open;
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        const bool conv = res.runs[i].verdict == Termination::Converged;
        if (conv && !open) open = res.runs[i].s;
        const bool closes = open && (!conv || i + 1 == res.runs.size());
        if (closes) {
            const double hi = conv ? res.runs[i].s : res.runs[i - 1].s;
            res.converged_intervals.emplace_back(*open, hi);
            open.reset();
        }
    }
    return res;
}

StabilityProbeResult stability_probe(const SymplecticPotential& base,
                                     const ScalarField& direction, double t0,
                                     std::span<const double> epsilons,
                                     const FlowConfig& config)
{
    if (epsilons.empty()) throw ConfigError("stability_probe: no epsilons given");
    if (!(t0 > 0.0)) throw ConfigError("stability_probe: t0 must be positive");
    require_same_grid(base.perturbation(), direction, "stability_probe");

    // Integrate exactly to t0: convergence cutoffs are disabled so every run
    // reports a state at the comparison time.
    FlowConfig cfg = config;
    cfg.t_max = t0;
    cfg.conv_threshold = 0.0;

    // The direction must stay on the gauge slice.
    ScalarField dir = direction;
    const double mu = dir.mean();
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] -= mu;

    std::vector<SymplecticPotential> starts;
    starts.push_back(base);
    for (double eps : epsilons) {
        ScalarField f = base.perturbation();
        ScalarField scaled = dir;
        scaled *= eps;
        f += scaled;
        starts.emplace_back(std::move(f));
    }

    std::vector<FlowTrace> traces(starts.size());
    parallel_for(starts.size(),
                 [&](std::size_t i) { traces[i] = run(cfg, starts[i]); });

    StabilityProbeResult res;
    res.t0 = t0;
    res.epsilons.assign(epsilons.begin(), epsilons.end());
    const SymplecticPotential& u0 = traces[0].final_state().u;
    for (std::size_t i = 0; i < res.epsilons.size(); ++i) {
        const ScalarField diff =
            perturbation_difference(traces[i + 1].final_state().u, u0);
        res.deviations.push_back(derivative_sup_norm(diff, 5));
        res.deviations_high.push_back(derivative_sup_norm(diff, 7));
        res.ratios.push_back(res.deviations.back() / res.epsilons[i]);
    }
    res.measured_constant = *std::max_element(res.ratios.begin(), res.ratios.end());
    return res;
}

std::vector<DeltaCrossing> delta_level_probe(std::span<const FlowTrace> traces,
                                             double delta)
{
    if (!(delta > 0.0)) throw ConfigError("delta_level_probe: delta must be positive");
    std::vector<DeltaCrossing> out;
    for (std::size_t idx = 0; idx < traces.size(); ++idx) {
        const FlowTrace& tr = traces[idx];
        DeltaCrossing cr;
        cr.run_index = idx;
        cr.never_above = true;
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
            const double c = tr.states[i].energy.calabi_energy;
            if (c > delta) {
                cr.never_above = false;
                cr.last_crossing.reset();
            } else if (!cr.never_above && !cr.last_crossing && i > 0) {
                const double c_prev = tr.states[i - 1].energy.calabi_energy;
                const double t_prev = tr.states[i - 1].t;
                const double t_cur = tr.states[i].t;
                const double frac = (c_prev - delta) / (c_prev - c);
                cr.last_crossing = t_prev + frac * (t_cur - t_prev);
            }
        }
        out.push_back(cr);
    }
    return out;
}

} // namespace calabi
