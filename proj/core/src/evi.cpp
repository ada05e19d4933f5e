#include "calabi/evi.hpp"

#include "calabi/energetics.hpp"
#include "calabi/errors.hpp"
#include "calabi/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace calabi {

namespace {

constexpr double kMonotoneTol = 1e-10;   // matches the engine's descent guard
constexpr double kTimeMatchTol = 1e-12;  // recorded-time agreement across traces

// Indices of states whose times match between two traces (two-pointer walk;
// recorded times are strictly increasing).
std::vector<std::pair<std::size_t, std::size_t>>
shared_times(const FlowTrace& a, const FlowTrace& b)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < a.states.size() && j < b.states.size()) {
        const double ta = a.states[i].t;
        const double tb = b.states[j].t;
        if (std::abs(ta - tb) <= kTimeMatchTol) {
            out.emplace_back(i, j);
            ++i;
            ++j;
        } else if (ta < tb) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

EnergyLevel tail_level(const FlowTrace& tr)
{
    EnergyLevel lvl;
    const FlowState& last = tr.final_state();
    lvl.value = last.energy.calabi_energy;
    lvl.attained_at = last.t;

    const double t0 = tr.initial().t;
    const double window_start = last.t - 0.2 * (last.t - t0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const FlowState& st : tr.states) {
        if (st.t >= window_start) {
            lo = std::min(lo, st.energy.calabi_energy);
            hi = std::max(hi, st.energy.calabi_energy);
        }
    }
    lvl.tail_variation = hi > lo ? hi - lo : 0.0;
    return lvl;
}

} // namespace

const char* ineq_name(IneqName n)
{
    switch (n) {
        case IneqName::Evi1: return "evi1";
        case IneqName::EviIntegrated: return "evi_integrated";
        case IneqName::ChenRate: return "chen_rate";
        case IneqName::Contraction: return "contraction";
        case IneqName::LevelMatch: return "level_match";
        case IneqName::LevelGap: return "level_gap";
        case IneqName::PanelInf: return "panel_inf";
        case IneqName::Monotone: return "monotone";
    }
    return "unknown";
}

void InequalityLedger::append(LedgerEntry e)
{
    if (!entries.empty() && e.t < entries.back().t) {
        throw ConfigError("ledger entries must be appended in time order");
    }
    entries.push_back(e);
}

void InequalityLedger::extend(const InequalityLedger& other)
{
    for (const LedgerEntry& e : other.entries) append(e);
    skipped_times.insert(skipped_times.end(), other.skipped_times.begin(),
                         other.skipped_times.end());
}

bool InequalityLedger::all_pass() const
{
    return std::all_of(entries.begin(), entries.end(),
                       [](const LedgerEntry& e) { return e.pass; });
}

double InequalityLedger::worst_residual() const
{
    double worst = std::numeric_limits<double>::infinity();
    for (const LedgerEntry& e : entries) worst = std::min(worst, e.residual);
    return worst;
}

void InequalityLedger::write_csv(const std::filesystem::path& path) const
{
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw TraceIoError("cannot open ledger file " + path.string());
    os << "t,name,lhs,rhs,residual,pass\n";
    for (const LedgerEntry& e : entries) {
        os << format_double(e.t) << ',' << ineq_name(e.name) << ','
           << format_double(e.lhs) << ',' << format_double(e.rhs) << ','
           << format_double(e.residual) << ',' << (e.pass ? 1 : 0) << '\n';
    }
    if (!os) throw TraceIoError("failed writing ledger " + path.string());
}

InequalityLedger evi_pointwise(const FlowTrace& trace, const SymplecticPotential& ref,
                               double tol)
{
    InequalityLedger ledger;
    const double k_ref = k_energy(ref);

    std::vector<double> dist_sq(trace.states.size(), 0.0);
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const double d = distance(trace.states[i].u, ref);
        dist_sq[i] = d * d;
    }

    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const FlowState& st = trace.states[i];
        if (dist_sq[i] == 0.0) {
            ledger.skipped_times.push_back(st.t);
        } else {
            // du/dt = -S(u), so <u - v, du/dt> = -<u - v, S(u)>.
            const ScalarField s = k_energy_gradient(st.u);
            const ScalarField diff = perturbation_difference(st.u, ref);
            const double lhs = k_ref - st.energy.k_energy;
            const double rhs = -diff.dot(s);
            ledger.append(LedgerEntry{st.t, IneqName::Evi1, lhs, rhs, lhs - rhs,
                                      lhs - rhs >= -tol});
        }

        if (i + 1 < trace.states.size()) {
            const FlowState& nx = trace.states[i + 1];
            const double dt = nx.t - st.t;
            if (dt <= 0.0) continue;
            // Difference quotient of (1/2) d^2 over [t_i, t_{i+1}] against
            // the value of K(v) - K(u) at the later endpoint; K decreases
            // along the flow, so this comparison stays one-sided.
            const double lhs = 0.5 * (dist_sq[i + 1] - dist_sq[i]) / dt;
            const double rhs = k_ref - nx.energy.k_energy;
            ledger.append(LedgerEntry{st.t, IneqName::ChenRate, lhs, rhs, rhs - lhs,
                                      lhs <= rhs + tol});
        }
    }
    return ledger;
}

LedgerEntry evi_integrated(const FlowTrace& trace, const SymplecticPotential& ref,
                           double t, double s, double tol)
{
    if (!(s > 0.0)) throw ConfigError("evi_integrated: shift s must be positive");
    const auto i0 = trace.index_at_time(t);
    const auto i1 = trace.index_at_time(t + s);
    if (!i0 || !i1) {
        throw ConfigError("evi_integrated: t and t+s must both be recorded "
                          "(run the flow with matching sync times)");
    }
    const FlowState& a = trace.states[*i0];
    const FlowState& b = trace.states[*i1];
    const double da = distance(ref, a.u);
    const double db = distance(ref, b.u);
    const double lhs = 2.0 * s * (k_energy(ref) - b.energy.k_energy);
    const double rhs = db * db - da * da;
    return LedgerEntry{t, IneqName::EviIntegrated, lhs, rhs, lhs - rhs,
                       lhs - rhs >= -tol};
}

InequalityLedger k_inf_check(const FlowTrace& trace,
                             std::span<const SymplecticPotential> panel, double delta)
{
    InequalityLedger ledger;
    for (std::size_t i = 0; i + 1 < trace.states.size(); ++i) {
        const double k_now = trace.states[i].energy.k_energy;
        const double k_next = trace.states[i + 1].energy.k_energy;
        ledger.append(LedgerEntry{trace.states[i + 1].t, IneqName::Monotone, k_next,
                                  k_now, k_now - k_next, k_next <= k_now + kMonotoneTol});
    }
    const FlowState& last = trace.final_state();
    for (const SymplecticPotential& v : panel) {
        const double k_v = k_energy(v);
        const double lhs = last.energy.k_energy;
        const double rhs = k_v + delta;
        ledger.append(
            LedgerEntry{last.t, IneqName::PanelInf, lhs, rhs, rhs - lhs, lhs <= rhs});
    }
    return ledger;
}

TwoFlowResult two_flow_level(const FlowTrace& a, const FlowTrace& b, double tol)
{
    TwoFlowResult res;
    res.level_a = tail_level(a);
    res.level_b = tail_level(b);

    const auto shared = shared_times(a, b);

    // Tail windows: the last 20% of each trace.
    const double tail_a =
        res.level_a.attained_at - 0.2 * (res.level_a.attained_at - a.initial().t);
    const double tail_b =
        res.level_b.attained_at - 0.2 * (res.level_b.attained_at - b.initial().t);
    const double shift =
        shared.empty() ? 0.0 : 0.1 * a.states[shared.back().first].t;

    // One ascending pass over the shared grid so the ledger stays
    // time-ordered: integrated-gap entries (time shift = 10% of the shared
    // horizon) and, inside both tails, co-level entries that falsify any
    // persistent separation of the Calabi energies.
    for (const auto& [i, j] : shared) {
        const double t = a.states[i].t;
        if (shift > 0.0) {
            if (const auto ishift = a.index_at_time(t + shift)) {
                const double d = distance(b.states[j].u, a.states[i].u);
                const double lhs = d * d
                                   + 2.0 * shift
                                         * (b.states[j].energy.k_energy
                                            - a.states[*ishift].energy.k_energy);
                res.ledger.append(
                    LedgerEntry{t, IneqName::LevelGap, lhs, 0.0, lhs, lhs >= -tol});
            }
        }
        if (t >= std::max(tail_a, tail_b)) {
            const double gap = std::abs(a.states[i].energy.calabi_energy
                                        - b.states[j].energy.calabi_energy);
            res.ledger.append(
                LedgerEntry{t, IneqName::LevelMatch, gap, tol, tol - gap, gap <= tol});
        }
    }
    // Terminal level comparison even when the traces never share times.
    {
        const double gap = std::abs(res.level_a.value - res.level_b.value);
        const double t = std::max(res.level_a.attained_at, res.level_b.attained_at);
        res.ledger.append(
            LedgerEntry{t, IneqName::LevelMatch, gap, tol, tol - gap, gap <= tol});
    }

    auto settled = [&](const FlowTrace& tr, const EnergyLevel& lvl) {
        return tr.termination == Termination::Converged || lvl.tail_variation <= tol;
    };
    res.conclusive = settled(a, res.level_a) && settled(b, res.level_b);
    return res;
}

InequalityLedger contraction_check(const FlowTrace& a, const FlowTrace& b, double tol)
{
    const auto shared = shared_times(a, b);
    if (shared.size() < 2) {
        throw ConfigError("contraction_check: traces share fewer than two recorded "
                          "times; rerun with a common sync grid");
    }
    InequalityLedger ledger;
    double prev = distance(a.states[shared[0].first].u, b.states[shared[0].second].u);
    for (std::size_t k = 1; k < shared.size(); ++k) {
        const double t = a.states[shared[k].first].t;
        const double cur =
            distance(a.states[shared[k].first].u, b.states[shared[k].second].u);
        ledger.append(LedgerEntry{t, IneqName::Contraction, cur, prev,
                                  prev - cur, cur <= prev + tol});
        prev = cur;
    }
    return ledger;
}

} // namespace calabi
