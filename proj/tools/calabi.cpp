// calabi — command-line laboratory for torus-invariant Calabi flow.
//
// Subcommands: flow, evi, sweep, probe, export, geodesic.  Runs are driven
// by plain key=value config files; results land in run directories holding
// a config echo, CSV diagnostics, and binary state snapshots.
//
// Exit codes: 0 pass, 1 inequality fail, 2 inconclusive, 3 config error,
// 4 numerical abort.

#include "CLI11.hpp"

#include "calabi/continuity.hpp"
#include "calabi/energetics.hpp"
#include "calabi/errors.hpp"
#include "calabi/evi.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/flow.hpp"
#include "calabi/mabuchi.hpp"
#include "calabi/snapshot.hpp"
#include "calabi/trace_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace calabi;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitConfig = 3;
constexpr int kExitAbort = 4;

// ---------------------------------------------------------------------------
// Config handling

using ConfigMap = std::map<std::string, std::string>;

ConfigMap load_config(const fs::path& path) {
    ConfigMap map;
    for (const auto& [key, value] : parse_key_value_file(path)) {
        if (!map.emplace(key, value).second) {
            throw ConfigError("config key '" + key + "': duplicated in " + path.string());
        }
    }
    return map;
}

const std::string& require_key(const ConfigMap& cfg, const std::string& key) {
    auto it = cfg.find(key);
    if (it == cfg.end()) {
        throw ConfigError("config key '" + key + "': missing");
    }
    return it->second;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
}

int parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    }
}

double get_double(const ConfigMap& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : parse_double(key, it->second);
}

int get_int(const ConfigMap& cfg, const std::string& key, int fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : parse_int(key, it->second);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
    // Items may be separated by commas, spaces, or both.
    std::string spaced = text;
    for (char& c : spaced) {
        if (c == ',') c = ' ';
    }
    std::vector<double> out;
    std::stringstream ss(spaced);
    std::string item;
    while (ss >> item) out.push_back(parse_double(key, item));
    if (out.empty()) {
        throw ConfigError("config key '" + key + "': expected a list of numbers");
    }
    return out;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::stringstream ss(text);
    std::string w;
    while (ss >> w) words.push_back(w);
    return words;
}

// Keys the flow-style commands understand; anything else is a typo we want
// to reject loudly rather than silently ignore.
void check_known_keys(const ConfigMap& cfg, std::initializer_list<const char*> extra) {
    static const std::vector<std::string> base = {
        "dim",         "grid",       "t_max",  "dt_init", "conv_threshold",
        "ricci_cap",   "record_every", "margin", "dt_max", "initial",
        "output_dir",  "sync",
    };
    for (const auto& [key, value] : cfg) {
        (void)value;
        const bool known = std::find(base.begin(), base.end(), key) != base.end() ||
                           std::find(extra.begin(), extra.end(), key) != extra.end();
        if (!known) {
            throw ConfigError("config key '" + key + "': unknown");
        }
    }
}

Grid grid_from_config(const ConfigMap& cfg) {
    const int dim = parse_int("dim", require_key(cfg, "dim"));
    const int n = parse_int("grid", require_key(cfg, "grid"));
    return make_grid(dim, n);
}

FlowConfig flow_config_from(const ConfigMap& cfg) {
    FlowConfig fc;
    fc.t_max = get_double(cfg, "t_max", fc.t_max);
    fc.dt_init = get_double(cfg, "dt_init", fc.dt_init);
    fc.conv_threshold = get_double(cfg, "conv_threshold", fc.conv_threshold);
    fc.record_every = get_int(cfg, "record_every", fc.record_every);
    fc.margin = get_double(cfg, "margin", fc.margin);
    if (cfg.count("ricci_cap")) fc.ricci_cap = parse_double("ricci_cap", cfg.at("ricci_cap"));
    if (cfg.count("dt_max")) fc.dt_max = parse_double("dt_max", cfg.at("dt_max"));
    fc.validate();
    return fc;
}

// Initial-data grammar (also used for references and probe directions):
//   F1 | F2 | ...                       named fixture
//   modes K A [K A ...]                 cosine modes; K is "k" or "kx,ky"
//   snapshot PATH                       binary snapshot, grid must match
//   random seed=N decay=P [amp=A]       band-limited random data
SymplecticPotential make_potential(const std::string& desc, const Grid& grid) {
    const std::vector<std::string> words = split_words(desc);
    if (words.empty()) {
        throw ConfigError("config key 'initial': empty description");
    }
    const std::string& head = words[0];

    if (is_fixture_name(head)) {
        if (words.size() != 1) {
            throw ConfigError("config key 'initial': fixture '" + head +
                              "' takes no extra arguments");
        }
        return fixture(head, grid);
    }

    if (head == "modes") {
        if (words.size() < 3 || (words.size() - 1) % 2 != 0) {
            throw ConfigError("config key 'initial': 'modes' wants K A pairs");
        }
        std::vector<ModeAmplitude> modes;
        for (std::size_t i = 1; i + 1 < words.size(); i += 2) {
            ModeAmplitude m;
            const std::string& kspec = words[i];
            const auto comma = kspec.find(',');
            if (comma == std::string::npos) {
                m.k = {parse_int("initial", kspec), 0};
            } else {
                m.k = {parse_int("initial", kspec.substr(0, comma)),
                       parse_int("initial", kspec.substr(comma + 1))};
            }
            m.amplitude = parse_double("initial", words[i + 1]);
            modes.push_back(m);
        }
        return SymplecticPotential::from_modes(grid, modes);
    }

    if (head == "snapshot") {
        if (words.size() != 2) {
            throw ConfigError("config key 'initial': 'snapshot' wants one path");
        }
        SymplecticPotential u = read_snapshot(words[1]);
        if (!(u.grid() == grid)) {
            throw ConfigError("config key 'initial': snapshot grid does not match config grid");
        }
        return u;
    }

    if (head == "random") {
        std::optional<std::uint64_t> seed;
        double decay = 2.0;
        double amp = 0.01;
        for (std::size_t i = 1; i < words.size(); ++i) {
            const auto eq = words[i].find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config key 'initial': 'random' wants key=value terms");
            }
            const std::string k = words[i].substr(0, eq);
            const std::string v = words[i].substr(eq + 1);
            if (k == "seed") seed = static_cast<std::uint64_t>(parse_int("initial", v));
            else if (k == "decay") decay = parse_double("initial", v);
            else if (k == "amp") amp = parse_double("initial", v);
            else throw ConfigError("config key 'initial': unknown random term '" + k + "'");
        }
        if (!seed) throw ConfigError("config key 'initial': 'random' needs seed=N");
        return random_potential(grid, *seed, decay, amp);
    }

    throw ConfigError("config key 'initial': unrecognized form '" + head + "'");
}

// References on the command line reuse the initial-data grammar; a bare
// snapshot path is also accepted.
SymplecticPotential resolve_reference(const std::string& spec, const Grid& grid) {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".clbf") {
        SymplecticPotential u = read_snapshot(spec);
        if (!(u.grid() == grid)) {
            throw ConfigError("reference snapshot grid does not match the trace grid");
        }
        return u;
    }
    return make_potential(spec, grid);
}

fs::path resolve_output_dir(const std::string& configured) {
    fs::path dir = configured;
    if (dir.is_relative()) {
        if (const char* root = std::getenv("CALABI_OUTPUT_ROOT")) {
            dir = fs::path(root) / dir;
        }
    }
    return dir;
}

std::vector<std::pair<std::string, std::string>> config_echo(const ConfigMap& cfg) {
    std::vector<std::pair<std::string, std::string>> extra;
    for (const char* key : {"dim", "grid", "initial"}) {
        auto it = cfg.find(key);
        if (it != cfg.end()) extra.emplace_back(it->first, it->second);
    }
    return extra;
}

void print_state_line(const char* label, const FlowState& st) {
    std::printf("%s t=%s  K=%s  calabi=%s  c5=%s\n", label, format_double(st.t).c_str(),
                format_double(st.energy.k_energy).c_str(),
                format_double(st.energy.calabi_energy).c_str(),
                format_double(st.c5).c_str());
}

int exit_code_for(Termination t) {
    switch (t) {
        case Termination::Converged:
        case Termination::MaxTime: return kExitPass;
        case Termination::RicciCapExceeded: return kExitInconclusive;
        case Termination::AdmissibilityLoss: return kExitAbort;
    }
    return kExitAbort;
}

// ---------------------------------------------------------------------------
// flow

int cmd_flow(const fs::path& config_path, const std::string& resume_dir) {
    const ConfigMap cfg = load_config(config_path);
    check_known_keys(cfg, {});
    const Grid grid = grid_from_config(cfg);
    const FlowConfig fc = flow_config_from(cfg);
    const fs::path out = resolve_output_dir(require_key(cfg, "output_dir"));

    std::vector<double> sync;
    if (cfg.count("sync")) sync = parse_double_list("sync", cfg.at("sync"));

    FlowTrace trace;
    if (resume_dir.empty()) {
        const SymplecticPotential initial = make_potential(require_key(cfg, "initial"), grid);
        trace = run(fc, initial, sync);
    } else {
        const FlowTrace checkpoint = read_trace(resume_dir);
        trace = continue_run(fc, checkpoint, sync);
    }

    write_trace(out, trace, config_echo(cfg));
    std::printf("termination: %s  states: %zu  steps: %zu\n",
                termination_name(trace.termination), trace.states.size(),
                trace.step_log.size());
    print_state_line("final:", trace.final_state());
    std::printf("trace: %s\n", out.string().c_str());
    return exit_code_for(trace.termination);
}

// ---------------------------------------------------------------------------
// evi

int cmd_evi(const std::string& trace_dir, const std::string& reference,
            double tol_pointwise, double tol_integrated, const std::string& out_dir) {
    const FlowTrace trace = read_trace(trace_dir);
    const SymplecticPotential ref = resolve_reference(reference, trace.initial().u.grid());
    const fs::path out = out_dir.empty() ? fs::path(trace_dir) : fs::path(out_dir);

    const InequalityLedger pointwise = evi_pointwise(trace, ref, tol_pointwise);
    pointwise.write_csv(out / "evi_pointwise.csv");

    // Integrated form on a 5x5 grid of (start index, offset) pairs spread
    // over the recorded times.
    InequalityLedger integrated;
    const std::size_t n = trace.states.size();
    if (n >= 3) {
        for (int i = 0; i < 5; ++i) {
            const std::size_t a = static_cast<std::size_t>(i) * (n - 1) / 8;
            for (int j = 1; j <= 5; ++j) {
                const std::size_t b = std::min(a + static_cast<std::size_t>(j) * (n - 1) / 8,
                                               n - 1);
                if (b <= a) continue;
                const double t = trace.states[a].t;
                const double s = trace.states[b].t - t;
                integrated.append(evi_integrated(trace, ref, t, s, tol_integrated));
            }
        }
    }
    integrated.write_csv(out / "evi_integrated.csv");

    const bool inconclusive = n < 2 ||
                              trace.termination == Termination::AdmissibilityLoss ||
                              trace.termination == Termination::RicciCapExceeded;

    std::printf("pointwise entries: %zu (skipped %zu)  worst residual: %s\n",
                pointwise.entries.size(), pointwise.skipped_times.size(),
                format_double(pointwise.worst_residual()).c_str());
    std::printf("integrated entries: %zu  worst residual: %s\n", integrated.entries.size(),
                format_double(integrated.worst_residual()).c_str());

    if (inconclusive) {
        std::printf("verdict: inconclusive (termination %s, %zu states)\n",
                    termination_name(trace.termination), n);
        return kExitInconclusive;
    }
    const bool ok = pointwise.all_pass() && integrated.all_pass();
    std::printf("verdict: %s\n", ok ? "pass" : "fail");
    return ok ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const fs::path& config_path, int steps) {
    const ConfigMap cfg = load_config(config_path);
    check_known_keys(cfg, {});
    const Grid grid = grid_from_config(cfg);
    const FlowConfig fc = flow_config_from(cfg);
    const SymplecticPotential phi = make_potential(require_key(cfg, "initial"), grid);
    const fs::path out = resolve_output_dir(require_key(cfg, "output_dir"));

    const SweepResult result = sweep(phi, steps, fc);

    fs::create_directories(out);
    std::ofstream summary(out / "sweep_summary.csv");
    summary << "s,verdict,final_t,final_K,final_calabi,final_c5,trace_dir\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const SweepRun& r = result.runs[i];
        all_converged = all_converged && r.verdict == Termination::Converged;
        std::string dir;
        if (r.trace) {
            char name[32];
            std::snprintf(name, sizeof name, "s_%03zu", i);
            dir = name;
            write_trace(out / dir, *r.trace, config_echo(cfg));
            const FlowState& fin = r.trace->final_state();
            summary << format_double(r.s) << ',' << termination_name(r.verdict) << ','
                    << format_double(fin.t) << ',' << format_double(fin.energy.k_energy)
                    << ',' << format_double(fin.energy.calabi_energy) << ','
                    << format_double(fin.c5) << ',' << dir << '\n';
        } else {
            summary << format_double(r.s) << ',' << termination_name(r.verdict)
                    << ",,,,," << '\n';
        }
    }
    summary.close();

    for (const auto& [lo, hi] : result.converged_intervals) {
        std::printf("converged interval: [%s, %s]\n", format_double(lo).c_str(),
                    format_double(hi).c_str());
    }
    std::printf("summary: %s\n", (out / "sweep_summary.csv").string().c_str());
    return all_converged ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// probe

int cmd_probe(const fs::path& config_path) {
    const ConfigMap cfg = load_config(config_path);
    check_known_keys(cfg, {"direction", "t0", "epsilons"});
    const Grid grid = grid_from_config(cfg);
    const FlowConfig fc = flow_config_from(cfg);
    const SymplecticPotential base = make_potential(require_key(cfg, "initial"), grid);

    const std::string dir_spec = cfg.count("direction") ? cfg.at("direction") : "modes 2 1.0";
    const SymplecticPotential direction = make_potential(dir_spec, grid);
    const double t0 = get_double(cfg, "t0", fc.t_max);
    std::vector<double> eps = {1e-3, 1e-4, 1e-5};
    if (cfg.count("epsilons")) eps = parse_double_list("epsilons", cfg.at("epsilons"));

    const StabilityProbeResult probe =
        stability_probe(base, direction.perturbation(), t0, eps, fc);

    std::printf("t0=%s  measured constant: %s\n", format_double(probe.t0).c_str(),
                format_double(probe.measured_constant).c_str());
    for (std::size_t i = 0; i < probe.epsilons.size(); ++i) {
        std::printf("eps=%s  deviation=%s  high=%s  ratio=%s\n",
                    format_double(probe.epsilons[i]).c_str(),
                    format_double(probe.deviations[i]).c_str(),
                    format_double(probe.deviations_high[i]).c_str(),
                    format_double(probe.ratios[i]).c_str());
    }

    if (cfg.count("output_dir")) {
        const fs::path out = resolve_output_dir(cfg.at("output_dir"));
        fs::create_directories(out);
        std::ofstream csv(out / "probe_summary.csv");
        csv << "epsilon,deviation,deviation_high,ratio\n";
        for (std::size_t i = 0; i < probe.epsilons.size(); ++i) {
            csv << format_double(probe.epsilons[i]) << ','
                << format_double(probe.deviations[i]) << ','
                << format_double(probe.deviations_high[i]) << ','
                << format_double(probe.ratios[i]) << '\n';
        }
        std::printf("summary: %s\n", (out / "probe_summary.csv").string().c_str());
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------
// export

int cmd_export(const std::string& trace_dir, const std::vector<std::string>& refs,
               const std::string& out_file) {
    const FlowTrace trace = read_trace(trace_dir);
    const Grid grid = trace.initial().u.grid();

    std::vector<std::pair<std::string, SymplecticPotential>> anchors;
    for (const std::string& spec : refs) {
        anchors.emplace_back(spec, resolve_reference(spec, grid));
    }

    const fs::path out =
        out_file.empty() ? fs::path(trace_dir) / "export.csv" : fs::path(out_file);
    std::ofstream csv(out);
    csv << "t,k_energy,calabi_energy,c5_norm,sup_ricci_norm";
    for (const auto& [name, u] : anchors) {
        (void)u;
        csv << ",dist_" << name;
    }
    csv << '\n';
    for (const FlowState& st : trace.states) {
        csv << format_double(st.t) << ',' << format_double(st.energy.k_energy) << ','
            << format_double(st.energy.calabi_energy) << ',' << format_double(st.c5) << ','
            << format_double(st.ricci.sup_ricci_norm);
        for (const auto& [name, u] : anchors) {
            (void)name;
            csv << ',' << format_double(distance(st.u, u));
        }
        csv << '\n';
    }
    std::printf("export: %s (%zu rows)\n", out.string().c_str(), trace.states.size());
    return kExitPass;
}

// ---------------------------------------------------------------------------
// geodesic

int cmd_geodesic(const std::string& spec_a, const std::string& spec_b, int samples,
                 int dim, int grid_points, const std::string& out_file) {
    Grid grid{};
    if (grid_points > 0) {
        grid = make_grid(dim, grid_points);
    } else if (is_fixture_name(spec_a)) {
        grid = default_fixture_grid(spec_a);
    } else if (is_fixture_name(spec_b)) {
        grid = default_fixture_grid(spec_b);
    } else {
        grid = make_grid(1, 256);
    }
    const SymplecticPotential a = resolve_reference(spec_a, grid);
    const SymplecticPotential b = resolve_reference(spec_b, grid);
    if (samples < 3) {
        throw ConfigError("geodesic: need at least 3 samples");
    }

    const GeodesicSegment seg = make_geodesic(a, b);
    std::printf("distance: %s\n", format_double(distance(a, b)).c_str());

    std::vector<double> ks(samples);
    const double k0 = k_energy(a);
    const double k1 = k_energy(b);
    double worst_chord = 0.0;
    std::ostringstream csv;
    csv << "t,k_energy,chord,chord_gap\n";
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        ks[i] = k_energy(geodesic_point(seg, t));
        const double chord = (1.0 - t) * k0 + t * k1;
        worst_chord = std::min(worst_chord, chord - ks[i]);
        csv << format_double(t) << ',' << format_double(ks[i]) << ','
            << format_double(chord) << ',' << format_double(chord - ks[i]) << '\n';
    }
    double worst_second = 0.0;
    for (int i = 1; i + 1 < samples; ++i) {
        worst_second = std::min(worst_second, ks[i - 1] - 2.0 * ks[i] + ks[i + 1]);
    }

    const ConvexityBound fwd = convexity_lower_bound(a, b);
    const ConvexityBound bwd = convexity_lower_bound(b, a);
    std::printf("chord gap min: %s  second difference min: %s\n",
                format_double(worst_chord).c_str(), format_double(worst_second).c_str());
    std::printf("subgradient gap a->b: %s  b->a: %s\n", format_double(fwd.gap()).c_str(),
                format_double(bwd.gap()).c_str());

    if (!out_file.empty()) {
        std::ofstream out(out_file);
        out << csv.str();
    }

    const bool ok = worst_chord >= -1e-10 && worst_second >= -1e-10 &&
                    fwd.gap() >= -1e-10 && bwd.gap() >= -1e-10;
    std::printf("verdict: %s\n", ok ? "pass" : "fail");
    return ok ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"torus-invariant Calabi flow laboratory"};
    app.require_subcommand(1);

    std::string config_path, resume_dir;
    auto* flow = app.add_subcommand("flow", "integrate a flow and write a trace directory");
    flow->add_option("-c,--config", config_path, "key=value config file")->required();
    flow->add_option("--resume", resume_dir, "trace directory to continue from");

    std::string trace_dir, reference, ledger_out;
    double tol_pointwise = 1e-8, tol_integrated = 1e-6;
    auto* evi = app.add_subcommand("evi", "variational-inequality ledger for a trace");
    evi->add_option("-t,--trace", trace_dir, "trace directory")->required();
    evi->add_option("-r,--reference", reference, "fixture name, snapshot, or data description")
        ->required();
    evi->add_option("--tol-pointwise", tol_pointwise, "pointwise residual tolerance");
    evi->add_option("--tol-integrated", tol_integrated, "integrated residual tolerance");
    evi->add_option("--output", ledger_out, "directory for ledger CSVs (default: trace dir)");

    std::string sweep_config;
    int sweep_steps = 11;
    auto* swp = app.add_subcommand("sweep", "flow the scaled family s*phi for s in [0,1]");
    swp->add_option("-c,--config", sweep_config, "key=value config file")->required();
    swp->add_option("-n,--steps", sweep_steps, "number of s samples (default 11)");

    std::string probe_config;
    auto* prb = app.add_subcommand("probe", "continuous-dependence probe around a base run");
    prb->add_option("-c,--config", probe_config, "key=value config file")->required();

    std::string export_trace, export_out;
    std::vector<std::string> export_refs;
    auto* exp = app.add_subcommand("export", "plot-ready CSV from a trace directory");
    exp->add_option("-t,--trace", export_trace, "trace directory")->required();
    exp->add_option("-r,--references", export_refs,
                    "potentials to report distances to (repeatable)");
    exp->add_option("--output", export_out, "output file (default: <trace>/export.csv)");

    std::string geo_a, geo_b, geo_out;
    int geo_samples = 21, geo_dim = 1, geo_grid = 0;
    auto* geo = app.add_subcommand("geodesic", "distance/convexity table for two potentials");
    geo->add_option("a", geo_a, "first potential (fixture, snapshot, or description)")
        ->required();
    geo->add_option("b", geo_b, "second potential")->required();
    geo->add_option("--samples", geo_samples, "sample count along the segment");
    geo->add_option("--dim", geo_dim, "grid dimension when neither input fixes one");
    geo->add_option("--grid", geo_grid, "points per axis when neither input fixes one");
    geo->add_option("--output", geo_out, "optional CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (flow->parsed()) return cmd_flow(config_path, resume_dir);
        if (evi->parsed())
            return cmd_evi(trace_dir, reference, tol_pointwise, tol_integrated, ledger_out);
        if (swp->parsed()) return cmd_sweep(sweep_config, sweep_steps);
        if (prb->parsed()) return cmd_probe(probe_config);
        if (exp->parsed()) return cmd_export(export_trace, export_refs, export_out);
        if (geo->parsed())
            return cmd_geodesic(geo_a, geo_b, geo_samples, geo_dim, geo_grid, geo_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const TraceIoError& e) {
        std::fprintf(stderr, "trace error: %s\n", e.what());
        return kExitConfig;
    } catch (const GridMismatch& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InadmissibleMetric& e) {
        std::fprintf(stderr, "numerical abort: %s (min eigenvalue %s)\n", e.what(),
                     format_double(e.min_eigenvalue()).c_str());
        return kExitAbort;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return kExitAbort;
    }
    return kExitConfig;
}
