#pragma once

#include "calabi/field.hpp"
#include "calabi/grid.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace calabi {

// Half-complex Fourier coefficients of a real field (r2c layout: the last
// axis keeps only the non-negative wavenumbers 0..N/2).  Coefficients are
// normalized so that c[0] is the field mean.
struct Spectrum {
    Grid grid{};
    std::vector<std::complex<double>> coeff;
};

// Multi-index of partial derivative orders per axis; the second entry is
// ignored on one-dimensional grids.
using MultiIndex = std::array<int, 2>;

// FFT engine bound to one grid.  Owns FFTW plans and buffers, so instances
// are not safe for concurrent use; grab a per-thread one via workspace_for.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(Grid grid);
    ~SpectralWorkspace();

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const noexcept { return grid_; }
    std::size_t spectrum_size() const noexcept { return spec_size_; }

    Spectrum analyze(const ScalarField& f);
    ScalarField synthesize(const Spectrum& s);

    // d^|alpha| f applied in Fourier space.  Odd-order components zero the
    // Nyquist mode of their axis, which keeps the result real and exact for
    // band-limited data.  Total order is capped at 8.
    Spectrum derivative_spectrum(const Spectrum& s, MultiIndex alpha) const;
    ScalarField derivative(const ScalarField& f, MultiIndex alpha);

    // 2/3-rule low-pass: zero every mode with any |k_axis| > N/3.
    void dealias_in_place(Spectrum& s) const;
    ScalarField dealias(const ScalarField& f);

    // Laplacian squared, the linear part of the flow (up to sign).
    ScalarField biharmonic(const ScalarField& f);

    // Per-mode integrating factors exp(-(2*pi)^4 |k|^4 dt).
    std::vector<double> decay_factors(double dt) const;

    // Squared wavenumber |k|^2 (integer lattice) per spectrum slot.
    const std::vector<double>& wavenumber_sq() const noexcept { return ksq_; }

private:
    Grid grid_{};
    std::size_t spec_size_ = 0;
    std::vector<double> ksq_;      // |k|^2 per slot
    std::vector<int> k_axis0_;     // signed wavenumber along axis 0
    std::vector<int> k_axis1_;     // wavenumber along the halved axis
    double* real_buf_ = nullptr;
    void* complex_buf_ = nullptr;  // fftw_complex*, kept untyped in the header
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

// Thread-local workspace cache keyed by grid; safe to call from any thread.
SpectralWorkspace& workspace_for(const Grid& grid);

// max over all multi-indices with |alpha| <= max_order of sup |d^alpha f|.
// Serves as the C^k norm surrogate for convergence and stability monitors.
double derivative_sup_norm(const ScalarField& f, int max_order);

} // namespace calabi
