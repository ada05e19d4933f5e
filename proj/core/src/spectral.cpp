#include "calabi/spectral.hpp"

#include "calabi/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace calabi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDerivativeOrder = 8;

// FFTW's planner is not thread-safe; every plan create/destroy goes through
// this lock.  Executions on distinct plans are safe concurrently.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

SpectralWorkspace::SpectralWorkspace(Grid grid) : grid_(grid)
{
    const int n = grid_.points_per_axis;
    const std::size_t n_half = static_cast<std::size_t>(n / 2 + 1);
    spec_size_ = grid_.dim == 1 ? n_half : static_cast<std::size_t>(n) * n_half;

    ksq_.resize(spec_size_);
    k_axis0_.resize(spec_size_);
    k_axis1_.resize(spec_size_);
    if (grid_.dim == 1) {
        for (std::size_t j = 0; j < spec_size_; ++j) {
            k_axis0_[j] = static_cast<int>(j);
            k_axis1_[j] = 0;
            ksq_[j] = static_cast<double>(j * j);
        }
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < n; ++j0) {
            const int k0 = j0 <= n / 2 ? j0 : j0 - n;
            for (int j1 = 0; j1 <= n / 2; ++j1, ++idx) {
                k_axis0_[idx] = k0;
                k_axis1_[idx] = j1;
                ksq_[idx] = static_cast<double>(k0) * k0 + static_cast<double>(j1) * j1;
            }
        }
    }

    real_buf_ = fftw_alloc_real(grid_.point_count());
    complex_buf_ = fftw_alloc_complex(spec_size_);
    if (!real_buf_ || !complex_buf_) {
        throw std::bad_alloc();
    }

    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
    if (grid_.dim == 1) {
        plan_fwd_ = fftw_plan_dft_r2c_1d(n, real_buf_, cbuf, FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_c2r_1d(n, cbuf, real_buf_, FFTW_ESTIMATE);
    } else {
        plan_fwd_ = fftw_plan_dft_r2c_2d(n, n, real_buf_, cbuf, FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_c2r_2d(n, n, cbuf, real_buf_, FFTW_ESTIMATE);
    }
    if (!plan_fwd_ || !plan_bwd_) {
        throw std::runtime_error("FFTW plan creation failed");
    }
}

SpectralWorkspace::~SpectralWorkspace()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
}

Spectrum SpectralWorkspace::analyze(const ScalarField& f)
{
    if (!(f.grid() == grid_)) {
        throw GridMismatch("analyze: field grid does not match workspace");
    }
    std::memcpy(real_buf_, f.values().data(), f.size() * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));

    Spectrum s{grid_, std::vector<std::complex<double>>(spec_size_)};
    const auto* cbuf = static_cast<const fftw_complex*>(complex_buf_);
    const double norm = 1.0 / static_cast<double>(grid_.point_count());
    for (std::size_t j = 0; j < spec_size_; ++j) {
        s.coeff[j] = std::complex<double>(cbuf[j][0] * norm, cbuf[j][1] * norm);
    }
    return s;
}

ScalarField SpectralWorkspace::synthesize(const Spectrum& s)
{
    if (!(s.grid == grid_) || s.coeff.size() != spec_size_) {
        throw GridMismatch("synthesize: spectrum does not match workspace grid");
    }
    auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
    for (std::size_t j = 0; j < spec_size_; ++j) {
        cbuf[j][0] = s.coeff[j].real();
        cbuf[j][1] = s.coeff[j].imag();
    }
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));

    ScalarField f(grid_);
    std::memcpy(f.values().data(), real_buf_, f.size() * sizeof(double));
    return f;
}

Spectrum SpectralWorkspace::derivative_spectrum(const Spectrum& s, MultiIndex alpha) const
{
    const int a0 = alpha[0];
    const int a1 = grid_.dim == 2 ? alpha[1] : 0;
    if (a0 < 0 || a1 < 0 || a0 + a1 > kMaxDerivativeOrder) {
        throw ConfigError("derivative order out of range");
    }
    const int n_half = grid_.points_per_axis / 2;

    Spectrum out{grid_, std::vector<std::complex<double>>(spec_size_)};
    for (std::size_t j = 0; j < spec_size_; ++j) {
        const int k0 = k_axis0_[j];
        const int k1 = k_axis1_[j];
        // The Nyquist mode has no well-defined sign, so odd derivatives of it
        // are taken as zero; this is what keeps d^alpha real-valued.
        if ((a0 % 2 == 1 && std::abs(k0) == n_half) || (a1 % 2 == 1 && k1 == n_half)) {
            out.coeff[j] = 0.0;
            continue;
        }
        std::complex<double> m(1.0, 0.0);
        const std::complex<double> i0(0.0, kTwoPi * k0);
        const std::complex<double> i1(0.0, kTwoPi * k1);
        for (int r = 0; r < a0; ++r) m *= i0;
        for (int r = 0; r < a1; ++r) m *= i1;
        out.coeff[j] = m * s.coeff[j];
    }
    return out;
}

ScalarField SpectralWorkspace::derivative(const ScalarField& f, MultiIndex alpha)
{
    Spectrum s = analyze(f);
    Spectrum d = derivative_spectrum(s, alpha);
    return synthesize(d);
}

void SpectralWorkspace::dealias_in_place(Spectrum& s) const
{
    if (!(s.grid == grid_) || s.coeff.size() != spec_size_) {
        throw GridMismatch("dealias: spectrum does not match workspace grid");
    }
    const int cutoff = grid_.dealias_cutoff();
    for (std::size_t j = 0; j < spec_size_; ++j) {
        if (std::abs(k_axis0_[j]) > cutoff || k_axis1_[j] > cutoff) {
            s.coeff[j] = 0.0;
        }
    }
}

ScalarField SpectralWorkspace::dealias(const ScalarField& f)
{
    Spectrum s = analyze(f);
    dealias_in_place(s);
    return synthesize(s);
}

ScalarField SpectralWorkspace::biharmonic(const ScalarField& f)
{
    Spectrum s = analyze(f);
    const double c4 = kTwoPi * kTwoPi * kTwoPi * kTwoPi;
    for (std::size_t j = 0; j < spec_size_; ++j) {
        s.coeff[j] *= c4 * ksq_[j] * ksq_[j];
    }
    return synthesize(s);
}

std::vector<double> SpectralWorkspace::decay_factors(double dt) const
{
    const double c4 = kTwoPi * kTwoPi * kTwoPi * kTwoPi;
    std::vector<double> e(spec_size_);
    for (std::size_t j = 0; j < spec_size_; ++j) {
        e[j] = std::exp(-c4 * ksq_[j] * ksq_[j] * dt);
    }
    return e;
}

SpectralWorkspace& workspace_for(const Grid& grid)
{
    thread_local std::map<std::pair<int, int>, std::unique_ptr<SpectralWorkspace>> cache;
    auto key = std::make_pair(grid.dim, grid.points_per_axis);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<SpectralWorkspace>(grid)).first;
    }
    return *it->second;
}

double derivative_sup_norm(const ScalarField& f, int max_order)
{
    if (max_order < 0 || max_order > kMaxDerivativeOrder) {
        throw ConfigError("derivative_sup_norm: order out of range");
    }
    auto& ws = workspace_for(f.grid());
    const Spectrum s = ws.analyze(f);

    double best = f.sup_norm();
    if (f.grid().dim == 1) {
        for (int a = 1; a <= max_order; ++a) {
            best = std::max(best, ws.synthesize(ws.derivative_spectrum(s, {a, 0})).sup_norm());
        }
    } else {
        for (int total = 1; total <= max_order; ++total) {
            for (int a0 = 0; a0 <= total; ++a0) {
                const int a1 = total - a0;
                best = std::max(best,
                                ws.synthesize(ws.derivative_spectrum(s, {a0, a1})).sup_norm());
            }
        }
    }
    return best;
}

} // namespace calabi
