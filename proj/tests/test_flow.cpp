// Flow engine: linear decay rates, dissipation identities, guard behavior,
// synchronization, and the bit-exact trace/checkpoint round trip.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "calabi/errors.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/flow.hpp"
#include "calabi/mabuchi.hpp"
#include "calabi/snapshot.hpp"
#include "calabi/spectral.hpp"
#include "calabi/trace_io.hpp"

#include "reference_values.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace calabi;
namespace fs = std::filesystem;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

bool same_bytes(const ScalarField& a, const ScalarField& b) {
    return a.size() == b.size() &&
           std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

// Cosine-mode amplitude along a trace, read off the analyzed spectrum.
double mode_amplitude(const SymplecticPotential& u, int k) {
    Spectrum s = workspace_for(u.grid()).analyze(u.perturbation());
    return 2.0 * std::abs(s.coeff[static_cast<std::size_t>(k)]);
}

// Least-squares slope of ln(amp) against t.
double fitted_log_slope(const std::vector<double>& ts, const std::vector<double>& amps) {
    const std::size_t n = ts.size();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::log(amps[i]);
        st += ts[i];
        sy += y;
        stt += ts[i] * ts[i];
        sty += ts[i] * y;
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

fs::path temp_dir(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("calabi_flow_") + tag);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("flow config validation") {
    FlowConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    FlowConfig bad = cfg;
    bad.t_max = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dt_init = -1e-6;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dt_init = 1.0;  // exceeds t_max
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.record_every = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.margin = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.ricci_cap = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.dt_max = 1e-9;  // below dt_init
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("single modes decay at the biharmonic rates") {
    // In the near-linear regime the flow reduces to df/dt = -Lap^2 f, so a
    // k-mode of tiny amplitude must decay like exp(-(2 pi k)^4 t).  One
    // decade of decay per mode, fitted by least squares over all recorded
    // states.
    const Grid g = make_grid(1, 256);
    const std::array<double, 3> rates = {refvals::kRateK1, refvals::kRateK2,
                                         refvals::kRateK3};

    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        const double rate = rates[static_cast<std::size_t>(k - 1)];
        const std::array<ModeAmplitude, 1> modes{{{{k, 0}, 1e-6}}};
        const SymplecticPotential u0 = SymplecticPotential::from_modes(g, modes);

        FlowConfig cfg;
        cfg.t_max = std::log(10.0) / rate;  // one decade
        cfg.dt_init = cfg.t_max * 1e-4;
        cfg.conv_threshold = 0.0;
        const FlowTrace trace = run(cfg, u0);
        REQUIRE(trace.termination == Termination::MaxTime);
        REQUIRE(trace.states.size() >= 10);

        std::vector<double> ts, amps;
        for (const FlowState& st : trace.states) {
            ts.push_back(st.t);
            amps.push_back(mode_amplitude(st.u, k));
        }
        CHECK(amps.front() / amps.back() == doctest::Approx(10.0).epsilon(0.01));
        const double slope = fitted_log_slope(ts, amps);
        CHECK(rel_diff(-slope, rate) < 1e-3);
    }
}

TEST_CASE("the F1 run relaxes to the flat metric") {
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 0.05;
    cfg.conv_threshold = 1e-8;
    const FlowTrace trace = run(cfg, fixture("F1", g));

    CHECK(trace.termination == Termination::Converged);
    CHECK(trace.final_state().c5 <= 1e-8);
    CHECK(trace.final_state().t < cfg.t_max);
    CHECK(distance(trace.final_state().u, fixture("F0", g)) < 1e-10);
    CHECK(trace.next_dt > 0.0);

    SUBCASE("energies are monotone along recorded states") {
        for (std::size_t i = 1; i < trace.states.size(); ++i) {
            CHECK(trace.states[i].t > trace.states[i - 1].t);
            CHECK(trace.states[i].energy.k_energy
                  <= trace.states[i - 1].energy.k_energy + 1e-10);
            CHECK(trace.states[i].energy.calabi_energy
                  <= trace.states[i - 1].energy.calabi_energy + 1e-10);
        }
    }
    SUBCASE("admissibility margin holds at every recorded state") {
        for (const FlowState& st : trace.states) {
            CHECK(check_admissibility(st.u, cfg.margin).pass);
        }
    }
    SUBCASE("accepted step growth is capped at doubling") {
        double prev = 0.0;
        for (const StepRecord& r : trace.step_log) {
            if (!r.accepted) {
                prev = 0.0;  // halving resets the ladder
                continue;
            }
            if (prev > 0.0) CHECK(r.dt <= 2.0 * prev * (1.0 + 1e-12));
            prev = r.dt;
        }
    }
}

TEST_CASE("dissipation identity at controlled step size") {
    // With the step capped, consecutive recorded states satisfy
    // (K_{i+1} - K_i)/dt = -(C_i + C_{i+1})/2 up to O(dt^2) quadrature error.
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 2e-3;
    cfg.conv_threshold = 0.0;
    cfg.dt_max = 2e-5;
    const FlowTrace trace = run(cfg, fixture("F1", g));
    REQUIRE(trace.states.size() >= 20);

    for (std::size_t i = 1; i < trace.states.size(); ++i) {
        const FlowState& a = trace.states[i - 1];
        const FlowState& b = trace.states[i];
        const double quotient = (b.energy.k_energy - a.energy.k_energy) / (b.t - a.t);
        const double mean_calabi = 0.5 * (a.energy.calabi_energy + b.energy.calabi_energy);
        CHECK(rel_diff(-quotient, mean_calabi) < 1e-2);
    }
}

TEST_CASE("manual stepping matches the engine's first accepted step") {
    const Grid g = make_grid(1, 256);
    const SymplecticPotential u0 = fixture("F1b", g);

    FlowConfig cfg;
    cfg.t_max = 1e-4;
    cfg.dt_init = 1e-6;
    cfg.conv_threshold = 0.0;
    const FlowTrace trace = run(cfg, u0);
    REQUIRE(trace.step_log.front().accepted);

    const FlowState manual = step(make_flow_state(0.0, u0), 1e-6, cfg);
    CHECK(manual.t == 1e-6);
    CHECK(same_bytes(manual.u.perturbation(), trace.states[1].u.perturbation()));

    SUBCASE("stepping is deterministic") {
        const FlowState again = step(make_flow_state(0.0, u0), 1e-6, cfg);
        CHECK(same_bytes(again.u.perturbation(), manual.u.perturbation()));
    }
}

TEST_CASE("identical configurations give bitwise identical runs") {
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 1e-3;
    cfg.conv_threshold = 0.0;
    const std::array<double, 2> sync = {3.33e-4, 7.77e-4};

    const FlowTrace a = run(cfg, fixture("F1", g), sync);
    const FlowTrace b = run(cfg, fixture("F1", g), sync);
    REQUIRE(a.states.size() == b.states.size());
    REQUIRE(a.step_log.size() == b.step_log.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(a.states[i].t == b.states[i].t);
        CHECK(same_bytes(a.states[i].u.perturbation(), b.states[i].u.perturbation()));
    }
    CHECK(a.next_dt == b.next_dt);
}

TEST_CASE("synchronization times are landed exactly") {
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 1e-3;
    cfg.conv_threshold = 0.0;
    // Deliberately incommensurate with any power-of-two step ladder.
    const std::array<double, 2> sync = {1.0e-3 / 3.0, 6.18e-4};

    const FlowTrace trace = run(cfg, fixture("F1", g), sync);
    for (double s : sync) {
        auto idx = trace.index_at_time(s, 0.0);  // exact, not approximate
        REQUIRE(idx.has_value());
        CHECK(trace.states[*idx].t == s);
    }
    CHECK(trace.final_state().t == cfg.t_max);
    CHECK_FALSE(trace.index_at_time(5.5e-4).has_value());

    SUBCASE("dt_max is honored by every attempt") {
        FlowConfig capped = cfg;
        capped.dt_max = 1.5e-5;
        const FlowTrace t2 = run(capped, fixture("F1", g), sync);
        for (const StepRecord& r : t2.step_log) {
            CHECK(r.dt <= 1.5e-5 + 1e-20);
        }
    }
}

TEST_CASE("termination causes") {
    const Grid g = make_grid(1, 256);

    SUBCASE("flat data converges immediately") {
        FlowConfig cfg;
        const FlowTrace trace = run(cfg, fixture("F0", g));
        CHECK(trace.termination == Termination::Converged);
        CHECK(trace.states.size() == 1);
        CHECK(trace.final_state().t == 0.0);
    }
    SUBCASE("a cap below the initial Ricci norm trips before any step") {
        FlowConfig cfg;
        cfg.ricci_cap = 1.0;  // initial sup is ~21.3
        const FlowTrace trace = run(cfg, fixture("F1", g));
        CHECK(trace.termination == Termination::RicciCapExceeded);
        CHECK(trace.states.size() == 1);
    }
    SUBCASE("a generous cap never fires") {
        FlowConfig cfg;
        cfg.t_max = 0.05;
        cfg.ricci_cap = refvals::kF1SupScalar;  // ~2x the initial sup
        const FlowTrace trace = run(cfg, fixture("F1", g));
        CHECK(trace.termination == Termination::Converged);
    }
    SUBCASE("an unreachable margin is rejected before stepping") {
        FlowConfig cfg;
        cfg.margin = 0.7;  // min eigenvalue of F1 is ~0.605
        CHECK_THROWS_AS((void)run(cfg, fixture("F1", g)), InadmissibleMetric);
    }
    SUBCASE("inadmissible initial data is rejected") {
        FlowConfig cfg;
        CHECK_THROWS_AS((void)run(cfg, fixture("F3", g)), InadmissibleMetric);
    }
}

TEST_CASE("record cadence keeps endpoints and sync hits") {
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 5e-4;
    cfg.conv_threshold = 0.0;
    cfg.record_every = 7;
    const std::array<double, 1> sync = {2.345e-4};
    const FlowTrace trace = run(cfg, fixture("F1", g), sync);

    std::size_t accepted = 0;
    for (const StepRecord& r : trace.step_log) {
        if (r.accepted) ++accepted;
    }
    CHECK(trace.states.size() < accepted + 1);
    CHECK(trace.initial().t == 0.0);
    CHECK(trace.final_state().t == cfg.t_max);
    CHECK(trace.index_at_time(sync[0], 0.0).has_value());
}

TEST_CASE("snapshot files round-trip bit-exactly") {
    const fs::path dir = temp_dir("snap");
    fs::create_directories(dir);
    const fs::path file = dir / "state.clbf";

    const Grid g = make_grid(2, 64);
    const SymplecticPotential u = random_admissible(g, 77u);
    write_snapshot(file, u);
    const SymplecticPotential back = read_snapshot(file);
    CHECK(back.grid() == g);
    CHECK(same_bytes(back.perturbation(), u.perturbation()));

    SUBCASE("corrupted magic is rejected") {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS((void)read_snapshot(file), TraceIoError);
    }
    SUBCASE("unsupported version is rejected") {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char bump[4] = {9, 0, 0, 0};
        f.write(bump, 4);
        f.close();
        CHECK_THROWS_AS((void)read_snapshot(file), TraceIoError);
    }
    SUBCASE("truncated payload is rejected") {
        fs::resize_file(file, fs::file_size(file) - 8);
        CHECK_THROWS_AS((void)read_snapshot(file), TraceIoError);
    }
    SUBCASE("trailing bytes are rejected") {
        std::ofstream f(file, std::ios::app | std::ios::binary);
        f.write("\0\0\0\0", 4);
        f.close();
        CHECK_THROWS_AS((void)read_snapshot(file), TraceIoError);
    }
    fs::remove_all(dir);
}

TEST_CASE("trace directories round-trip exactly") {
    const Grid g = make_grid(1, 256);
    FlowConfig cfg;
    cfg.t_max = 4e-4;
    cfg.conv_threshold = 0.0;
    cfg.record_every = 3;
    const FlowTrace trace = run(cfg, fixture("F1b", g));

    const fs::path dir = temp_dir("trace");
    const std::array<std::pair<std::string, std::string>, 1> extra = {
        {{"initial", "F1b"}}};
    write_trace(dir, trace, extra);

    const FlowTrace back = read_trace(dir);
    CHECK(back.termination == trace.termination);
    CHECK(back.next_dt == trace.next_dt);
    CHECK(back.config.t_max == cfg.t_max);
    CHECK(back.config.record_every == cfg.record_every);
    REQUIRE(back.states.size() == trace.states.size());
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        CHECK(back.states[i].t == trace.states[i].t);
        CHECK(back.states[i].dt == trace.states[i].dt);
        CHECK(same_bytes(back.states[i].u.perturbation(),
                         trace.states[i].u.perturbation()));
        CHECK(back.states[i].energy.k_energy == trace.states[i].energy.k_energy);
        CHECK(back.states[i].c5 == trace.states[i].c5);
    }
    REQUIRE(back.step_log.size() == trace.step_log.size());
    for (std::size_t i = 0; i < trace.step_log.size(); ++i) {
        CHECK(back.step_log[i].t == trace.step_log[i].t);
        CHECK(back.step_log[i].dt == trace.step_log[i].dt);
        CHECK(back.step_log[i].accepted == trace.step_log[i].accepted);
        CHECK(back.step_log[i].reason == trace.step_log[i].reason);
    }

    SUBCASE("a missing manifest is detected") {
        fs::remove(dir / "MANIFEST");
        CHECK_THROWS_AS((void)read_trace(dir), TraceIoError);
    }
    SUBCASE("a tampered diagnostic row is detected") {
        // Bump the recorded K-energy of the second row by one percent.
        std::ifstream in(dir / "trace.csv");
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
        in.close();
        REQUIRE(lines.size() > 2);
        std::string& row = lines[2];
        const auto c1 = row.find(',');
        const auto c2 = row.find(',', c1 + 1);
        const double k = std::stod(row.substr(c1 + 1, c2 - c1 - 1));
        row = row.substr(0, c1 + 1) + format_double(k * 1.01 + 1e-6) + row.substr(c2);
        std::ofstream out(dir / "trace.csv");
        for (const std::string& l : lines) out << l << '\n';
        out.close();
        CHECK_THROWS_AS((void)read_trace(dir), TraceIoError);
    }
    SUBCASE("a missing snapshot is detected") {
        fs::remove(dir / "states" / "000001.clbf");
        CHECK_THROWS_AS((void)read_trace(dir), TraceIoError);
    }
    fs::remove_all(dir);
}

TEST_CASE("checkpoint and resume reproduce the uninterrupted run bit for bit") {
    const Grid g = make_grid(1, 256);
    const double t_half = 2e-3;

    FlowConfig full;
    full.t_max = 4e-3;
    full.conv_threshold = 0.0;
    const std::array<double, 1> sync = {t_half};
    const FlowTrace straight = run(full, fixture("F1", g), sync);

    FlowConfig first = full;
    first.t_max = t_half;
    const FlowTrace head = run(first, fixture("F1", g), sync);
    CHECK(head.termination == Termination::MaxTime);

    const fs::path dir = temp_dir("resume");
    write_trace(dir, head);
    const FlowTrace restored = read_trace(dir);
    const FlowTrace resumed = continue_run(full, restored, sync);
    fs::remove_all(dir);

    REQUIRE(resumed.states.size() == straight.states.size());
    for (std::size_t i = 0; i < straight.states.size(); ++i) {
        CHECK(resumed.states[i].t == straight.states[i].t);
        CHECK(same_bytes(resumed.states[i].u.perturbation(),
                         straight.states[i].u.perturbation()));
    }
    CHECK(resumed.next_dt == straight.next_dt);
    CHECK(resumed.step_log.size() == straight.step_log.size());
}
