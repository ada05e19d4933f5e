#include "calabi/trace_io.hpp"

#include "calabi/errors.hpp"
#include "calabi/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace calabi {

namespace {

namespace fs = std::filesystem;

std::string state_file_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu.clbf", index);
    return buf;
}

double parse_double(const std::string& s, const char* what)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw TraceIoError(std::string("cannot parse ") + what + " from '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s, const char* what)
{
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw TraceIoError(std::string("cannot parse ") + what + " from '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_csv_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Termination termination_from_name(const std::string& name)
{
    for (Termination t : {Termination::Converged, Termination::MaxTime,
                          Termination::AdmissibilityLoss, Termination::RicciCapExceeded}) {
        if (name == termination_name(t)) return t;
    }
    throw TraceIoError("unknown termination '" + name + "' in MANIFEST");
}

RejectReason reject_reason_from_name(const std::string& name)
{
    for (RejectReason r : {RejectReason::None, RejectReason::ErrorEstimate,
                           RejectReason::EnergyGuard, RejectReason::CalabiGuard,
                           RejectReason::Admissibility}) {
        if (name == reject_reason_name(r)) return r;
    }
    throw TraceIoError("unknown reject reason '" + name + "' in steps.csv");
}

// Relative agreement required between stored diagnostics and the ones
// recomputed from the snapshot.  Generous: any real corruption is orders of
// magnitude away, while honest round-trips agree bitwise.
bool close_enough(double stored, double recomputed)
{
    const double scale = std::max({std::abs(stored), std::abs(recomputed), 1e-12});
    return std::abs(stored - recomputed) <= 1e-9 * scale;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::pair<std::string, std::string>>
parse_key_value_file(const fs::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw TraceIoError("cannot open " + path.string());
    }
    // Hand-written configs may pad the separator ("key = value"); strip the
    // padding so both styles parse identically.
    auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string::npos) return std::string();
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    };
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(is, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw TraceIoError("malformed line '" + line + "' in " + path.string());
        }
        out.emplace_back(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return out;
}

void write_trace(const fs::path& dir, const FlowTrace& trace,
                 std::span<const std::pair<std::string, std::string>> extra_config)
{
    if (trace.states.empty()) {
        throw TraceIoError("write_trace: trace has no recorded states");
    }
    fs::create_directories(dir / "states");

    {
        std::ofstream os(dir / "config.txt", std::ios::trunc);
        const FlowConfig& c = trace.config;
        const Grid& g = trace.states.front().u.grid();
        os << "dim=" << g.dim << '\n';
        os << "grid=" << g.points_per_axis << '\n';
        os << "t_max=" << format_double(c.t_max) << '\n';
        os << "dt_init=" << format_double(c.dt_init) << '\n';
        os << "conv_threshold=" << format_double(c.conv_threshold) << '\n';
        os << "record_every=" << c.record_every << '\n';
        os << "margin=" << format_double(c.margin) << '\n';
        if (c.ricci_cap) os << "ricci_cap=" << format_double(*c.ricci_cap) << '\n';
        if (c.dt_max) os << "dt_max=" << format_double(*c.dt_max) << '\n';
        for (const auto& [k, v] : extra_config) os << k << '=' << v << '\n';
        if (!os) throw TraceIoError("failed writing " + (dir / "config.txt").string());
    }

    {
        std::ofstream os(dir / "trace.csv", std::ios::trunc);
        os << "t,k_energy,calabi_energy,mean_scalar,sup_ricci_norm,dt,c5_norm\n";
        for (const FlowState& st : trace.states) {
            os << format_double(st.t) << ',' << format_double(st.energy.k_energy) << ','
               << format_double(st.energy.calabi_energy) << ','
               << format_double(st.energy.mean_scalar) << ','
               << format_double(st.ricci.sup_ricci_norm) << ',' << format_double(st.dt)
               << ',' << format_double(st.c5) << '\n';
        }
        if (!os) throw TraceIoError("failed writing " + (dir / "trace.csv").string());
    }

    {
        std::ofstream os(dir / "steps.csv", std::ios::trunc);
        os << "t,dt,accepted,reason\n";
        for (const StepRecord& r : trace.step_log) {
            os << format_double(r.t) << ',' << format_double(r.dt) << ','
               << (r.accepted ? 1 : 0) << ',' << reject_reason_name(r.reason) << '\n';
        }
        if (!os) throw TraceIoError("failed writing " + (dir / "steps.csv").string());
    }

    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        write_snapshot(dir / "states" / state_file_name(i), trace.states[i].u);
    }

    {
        std::ofstream os(dir / "MANIFEST", std::ios::trunc);
        os << "version=1\n";
        os << "termination=" << termination_name(trace.termination) << '\n';
        os << "states=" << trace.states.size() << '\n';
        os << "steps=" << trace.step_log.size() << '\n';
        os << "next_dt=" << format_double(trace.next_dt) << '\n';
        if (!os) throw TraceIoError("failed writing " + (dir / "MANIFEST").string());
    }
}

FlowTrace read_trace(const fs::path& dir)
{
    FlowTrace trace;

    // config.txt
    {
        std::map<std::string, std::string> kv;
        for (auto& [k, v] : parse_key_value_file(dir / "config.txt")) kv[k] = v;
        auto need = [&](const char* key) -> const std::string& {
            auto it = kv.find(key);
            if (it == kv.end()) {
                throw TraceIoError(std::string("config.txt missing key '") + key + "'");
            }
            return it->second;
        };
        FlowConfig c;
        c.t_max = parse_double(need("t_max"), "t_max");
        c.dt_init = parse_double(need("dt_init"), "dt_init");
        c.conv_threshold = parse_double(need("conv_threshold"), "conv_threshold");
        c.record_every = static_cast<int>(parse_long(need("record_every"), "record_every"));
        c.margin = parse_double(need("margin"), "margin");
        if (kv.count("ricci_cap")) c.ricci_cap = parse_double(kv["ricci_cap"], "ricci_cap");
        if (kv.count("dt_max")) c.dt_max = parse_double(kv["dt_max"], "dt_max");
        trace.config = c;
    }

    // MANIFEST
    std::size_t n_states = 0;
    std::size_t n_steps = 0;
    {
        std::map<std::string, std::string> kv;
        for (auto& [k, v] : parse_key_value_file(dir / "MANIFEST")) kv[k] = v;
        if (!kv.count("termination") || !kv.count("states") || !kv.count("next_dt")) {
            throw TraceIoError("MANIFEST incomplete in " + dir.string());
        }
        trace.termination = termination_from_name(kv["termination"]);
        n_states = static_cast<std::size_t>(parse_long(kv["states"], "states"));
        n_steps = kv.count("steps")
                      ? static_cast<std::size_t>(parse_long(kv["steps"], "steps"))
                      : 0;
        trace.next_dt = parse_double(kv["next_dt"], "next_dt");
    }

    // trace.csv + snapshots
    {
        std::ifstream is(dir / "trace.csv");
        if (!is) throw TraceIoError("cannot open " + (dir / "trace.csv").string());
        std::string line;
        if (!std::getline(is, line)) {
            throw TraceIoError("empty trace.csv in " + dir.string());
        }
        std::size_t index = 0;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_row(line);
            if (cells.size() != 7) {
                throw TraceIoError("bad trace.csv row '" + line + "'");
            }
            const fs::path snap = dir / "states" / state_file_name(index);
            FlowState st = make_flow_state(parse_double(cells[0], "t"), read_snapshot(snap));
            st.dt = parse_double(cells[5], "dt");

            // Cross-check the stored diagnostics against the recomputation.
            if (!close_enough(parse_double(cells[1], "k_energy"), st.energy.k_energy)
                || !close_enough(parse_double(cells[2], "calabi_energy"),
                                 st.energy.calabi_energy)
                || !close_enough(parse_double(cells[6], "c5_norm"), st.c5)) {
                throw TraceIoError("trace.csv row " + std::to_string(index)
                                   + " disagrees with snapshot diagnostics");
            }
            trace.states.push_back(std::move(st));
            ++index;
        }
        if (index != n_states) {
            throw TraceIoError("MANIFEST states count does not match trace.csv");
        }
    }

    // steps.csv
    {
        std::ifstream is(dir / "steps.csv");
        if (!is) throw TraceIoError("cannot open " + (dir / "steps.csv").string());
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_row(line);
            if (cells.size() != 4) {
                throw TraceIoError("bad steps.csv row '" + line + "'");
            }
            StepRecord r;
            r.t = parse_double(cells[0], "t");
            r.dt = parse_double(cells[1], "dt");
            r.accepted = parse_long(cells[2], "accepted") != 0;
            r.reason = reject_reason_from_name(cells[3]);
            trace.step_log.push_back(r);
        }
        if (n_steps != 0 && trace.step_log.size() != n_steps) {
            throw TraceIoError("MANIFEST steps count does not match steps.csv");
        }
    }

    if (trace.states.empty()) {
        throw TraceIoError("trace in " + dir.string() + " has no states");
    }
    return trace;
}

} // namespace calabi
