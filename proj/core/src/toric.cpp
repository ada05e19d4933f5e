#include "calabi/toric.hpp"

#include "calabi/errors.hpp"
#include "calabi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calabi {

namespace {

// Everything the curvature operators need from the Hessian, computed once.
// W is the pointwise inverse of H = I + Hess f and M = W - I its deviation,
// assembled as M = -(Hess f) * W so that every entry is a product of a small
// factor with an O(1) factor instead of a difference of nearby numbers.
struct ToricData {
    SymmetricMatrixField H;
    ScalarField q;  // det(H) - 1
    double min_eig = 0.0;
    SymmetricMatrixField W;
    SymmetricMatrixField M;
};

ScalarField second_derivative(SpectralWorkspace& ws, const Spectrum& s, int a, int b)
{
    MultiIndex alpha{0, 0};
    ++alpha[a];
    ++alpha[b];
    return ws.synthesize(ws.derivative_spectrum(s, alpha));
}

ToricData compute_toric_data(const SymplecticPotential& u, bool need_inverse)
{
    const Grid& g = u.grid();
    auto& ws = workspace_for(g);
    const Spectrum fs = ws.analyze(u.perturbation());

    ToricData d;
    d.H.grid = g;
    if (g.dim == 1) {
        ScalarField h11 = second_derivative(ws, fs, 0, 0);
        d.q = h11;
        d.H.xx = ScalarField(g, 1.0);
        d.H.xx += h11;
        d.min_eig = d.H.xx.values()[0];
        for (double v : d.H.xx.values()) d.min_eig = std::min(d.min_eig, v);

        if (need_inverse) {
            if (d.min_eig <= 0.0) {
                throw InadmissibleMetric("Hessian not positive definite (min eigenvalue "
                                             + std::to_string(d.min_eig) + ")",
                                         d.min_eig);
            }
            d.W.grid = g;
            d.W.xx = ScalarField(g);
            d.M.grid = g;
            d.M.xx = ScalarField(g);
            for (std::size_t i = 0; i < d.q.size(); ++i) {
                const double w = d.H.xx[i];
                d.M.xx[i] = -h11[i] / w;
                d.W.xx[i] = 1.0 + d.M.xx[i];
            }
        }
    } else {
        ScalarField h11 = second_derivative(ws, fs, 0, 0);
        ScalarField h12 = second_derivative(ws, fs, 0, 1);
        ScalarField h22 = second_derivative(ws, fs, 1, 1);

        d.q = ScalarField(g);
        for (std::size_t i = 0; i < d.q.size(); ++i) {
            d.q[i] = h11[i] + h22[i] + h11[i] * h22[i] - h12[i] * h12[i];
        }

        d.H.xx = ScalarField(g, 1.0);
        d.H.xx += h11;
        d.H.xy = h12;
        d.H.yy = ScalarField(g, 1.0);
        d.H.yy += h22;
        const ScalarField eig_lo = d.H.min_eigenvalues();
        d.min_eig = eig_lo[0];
        for (double v : eig_lo.values()) d.min_eig = std::min(d.min_eig, v);

        if (need_inverse) {
            if (d.min_eig <= 0.0) {
                throw InadmissibleMetric("Hessian not positive definite (min eigenvalue "
                                             + std::to_string(d.min_eig) + ")",
                                         d.min_eig);
            }
            d.W.grid = g;
            d.W.xx = ScalarField(g);
            d.W.xy = ScalarField(g);
            d.W.yy = ScalarField(g);
            d.M.grid = g;
            d.M.xx = ScalarField(g);
            d.M.xy = ScalarField(g);
            d.M.yy = ScalarField(g);
            for (std::size_t i = 0; i < d.q.size(); ++i) {
                const double det = 1.0 + d.q[i];
                const double w11 = d.H.yy[i] / det;
                const double w12 = -h12[i] / det;
                const double w22 = d.H.xx[i] / det;
                d.W.xx[i] = w11;
                d.W.xy[i] = w12;
                d.W.yy[i] = w22;
                d.M.xx[i] = -(h11[i] * w11 + h12[i] * w12);
                d.M.xy[i] = -(h11[i] * w12 + h12[i] * w22);
                d.M.yy[i] = -(h12[i] * w12 + h22[i] * w22);
            }
        }
    }
    return d;
}

ScalarField scalar_curvature_from(SpectralWorkspace& ws, const ToricData& d)
{
    const Grid& g = d.H.grid;
    if (g.dim == 1) {
        Spectrum ms = ws.analyze(d.M.xx);
        ws.dealias_in_place(ms);
        ScalarField s = ws.synthesize(ws.derivative_spectrum(ms, {2, 0}));
        s *= -1.0;
        return s;
    }
    Spectrum m11 = ws.analyze(d.M.xx);
    Spectrum m12 = ws.analyze(d.M.xy);
    Spectrum m22 = ws.analyze(d.M.yy);
    ws.dealias_in_place(m11);
    ws.dealias_in_place(m12);
    ws.dealias_in_place(m22);
    Spectrum acc = ws.derivative_spectrum(m11, {2, 0});
    const Spectrum c12 = ws.derivative_spectrum(m12, {1, 1});
    const Spectrum c22 = ws.derivative_spectrum(m22, {0, 2});
    for (std::size_t j = 0; j < acc.coeff.size(); ++j) {
        acc.coeff[j] = -(acc.coeff[j] + 2.0 * c12.coeff[j] + c22.coeff[j]);
    }
    return ws.synthesize(acc);
}

} // namespace

ScalarField SymmetricMatrixField::min_eigenvalues() const
{
    if (grid.dim == 1) return xx;
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mean = 0.5 * (xx[i] + yy[i]);
        const double r = std::hypot(0.5 * (xx[i] - yy[i]), xy[i]);
        out[i] = mean - r;
    }
    return out;
}

ScalarField SymmetricMatrixField::max_eigenvalues() const
{
    if (grid.dim == 1) return xx;
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mean = 0.5 * (xx[i] + yy[i]);
        const double r = std::hypot(0.5 * (xx[i] - yy[i]), xy[i]);
        out[i] = mean + r;
    }
    return out;
}

ScalarField SymmetricMatrixField::determinant() const
{
    if (grid.dim == 1) return xx;
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = xx[i] * yy[i] - xy[i] * xy[i];
    }
    return out;
}

SymmetricMatrixField hessian(const SymplecticPotential& u)
{
    return compute_toric_data(u, /*need_inverse=*/false).H;
}

AdmissibilityReport check_admissibility(const SymplecticPotential& u, double margin)
{
    const ToricData d = compute_toric_data(u, /*need_inverse=*/false);
    return AdmissibilityReport{d.min_eig, margin, d.min_eig >= margin};
}

void require_admissible(const SymplecticPotential& u, double margin, const char* where)
{
    const AdmissibilityReport rep = check_admissibility(u, margin);
    if (!rep.pass) {
        throw InadmissibleMetric(std::string(where) + ": Hessian eigenvalue "
                                     + std::to_string(rep.min_eigenvalue)
                                     + " below margin " + std::to_string(margin),
                                 rep.min_eigenvalue);
    }
}

ScalarField log_det_hessian(const SymplecticPotential& u)
{
    const ToricData d = compute_toric_data(u, /*need_inverse=*/false);
    if (d.min_eig <= 0.0) {
        throw InadmissibleMetric("log_det_hessian: Hessian not positive definite",
                                 d.min_eig);
    }
    ScalarField out(u.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log1p(d.q[i]);
    return out;
}

ScalarField abreu_scalar_curvature(const SymplecticPotential& u)
{
    auto& ws = workspace_for(u.grid());
    const ToricData d = compute_toric_data(u, /*need_inverse=*/true);
    return scalar_curvature_from(ws, d);
}

MatrixField ricci_endomorphism(const SymplecticPotential& u)
{
    const Grid& g = u.grid();
    auto& ws = workspace_for(g);
    const ToricData d = compute_toric_data(u, /*need_inverse=*/true);

    // h = -(1/2) log det Hess u, dealiased before its gradient is taken.
    ScalarField h(g);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = -0.5 * std::log1p(d.q[i]);
    Spectrum hs = ws.analyze(h);
    ws.dealias_in_place(hs);

    MatrixField e;
    e.grid = g;
    if (g.dim == 1) {
        ScalarField h1 = ws.synthesize(ws.derivative_spectrum(hs, {1, 0}));
        // v = u^{11} h' = (1 + m) h'
        ScalarField v(g);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 + d.M.xx[i]) * h1[i];
        Spectrum vs = ws.analyze(v);
        ws.dealias_in_place(vs);
        e.a11 = ws.synthesize(ws.derivative_spectrum(vs, {1, 0}));
        e.a11 *= -1.0;
        return e;
    }

    ScalarField h1 = ws.synthesize(ws.derivative_spectrum(hs, {1, 0}));
    ScalarField h2 = ws.synthesize(ws.derivative_spectrum(hs, {0, 1}));

    // v_k = u^{kb} h_b = h_k + M_kb h_b
    ScalarField v1(g), v2(g);
    for (std::size_t i = 0; i < v1.size(); ++i) {
        v1[i] = h1[i] + d.M.xx[i] * h1[i] + d.M.xy[i] * h2[i];
        v2[i] = h2[i] + d.M.xy[i] * h1[i] + d.M.yy[i] * h2[i];
    }
    Spectrum v1s = ws.analyze(v1);
    Spectrum v2s = ws.analyze(v2);
    ws.dealias_in_place(v1s);
    ws.dealias_in_place(v2s);

    // E^j_k = -d_k v^j: the row carries the inverse-Hessian index, the
    // derivative acts on the column index.  (The transposed wiring has the
    // same trace and eigenvalues but is not the curvature endomorphism; a
    // finite-difference oracle over the doubled metric distinguishes them.)
    e.a11 = ws.synthesize(ws.derivative_spectrum(v1s, {1, 0}));
    e.a12 = ws.synthesize(ws.derivative_spectrum(v1s, {0, 1}));
    e.a21 = ws.synthesize(ws.derivative_spectrum(v2s, {1, 0}));
    e.a22 = ws.synthesize(ws.derivative_spectrum(v2s, {0, 1}));
    e.a11 *= -1.0;
    e.a12 *= -1.0;
    e.a21 *= -1.0;
    e.a22 *= -1.0;
    return e;
}

RicciReport ricci_monitor(const SymplecticPotential& u)
{
    const Grid& g = u.grid();
    const ScalarField s = abreu_scalar_curvature(u);
    const MatrixField e = ricci_endomorphism(u);

    RicciReport rep;
    rep.sup_scalar = s.sup_norm();

    if (g.dim == 1) {
        // On a surface Ric = (S/2) g identically, so the endomorphism norm
        // is reported through that identity; the independently computed
        // moment-coordinate derivative only feeds the trace diagnostic.
        rep.sup_ricci_norm = 0.5 * rep.sup_scalar;
        double defect = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            defect = std::max(defect, std::abs(2.0 * e.a11[i] - s[i]));
        }
        rep.trace_defect = defect;
        return rep;
    }

    double sup_eig = 0.0;
    double defect = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double tr = e.a11[i] + e.a22[i];
        const double det = e.a11[i] * e.a22[i] - e.a12[i] * e.a21[i];
        // Eigenvalues are real for the Ricci block; tiny negative
        // discriminants are roundoff and get clamped.
        const double disc = std::max(tr * tr - 4.0 * det, 0.0);
        const double root = std::sqrt(disc);
        const double lam_hi = 0.5 * (tr + root);
        const double lam_lo = 0.5 * (tr - root);
        sup_eig = std::max({sup_eig, std::abs(lam_hi), std::abs(lam_lo)});
        defect = std::max(defect, std::abs(2.0 * tr - s[i]));
    }
    rep.sup_ricci_norm = sup_eig;
    rep.trace_defect = defect;
    return rep;
}

std::pair<SymmetricMatrixField, SymmetricMatrixField>
reconstruct_metric(const SymplecticPotential& u)
{
    ToricData d = compute_toric_data(u, /*need_inverse=*/true);
    return {std::move(d.H), std::move(d.W)};
}

} // namespace calabi
