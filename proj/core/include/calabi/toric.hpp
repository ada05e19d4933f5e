#pragma once

#include "calabi/field.hpp"
#include "calabi/potential.hpp"

#include <utility>

namespace calabi {

// Default positivity margin for Hessian admissibility checks.
inline constexpr double kDefaultAdmissibilityMargin = 1e-6;

// Pointwise symmetric matrix field (1x1 in dim 1, 2x2 in dim 2); the xy/yy
// components are left empty on one-dimensional grids.
struct SymmetricMatrixField {
    Grid grid{};
    ScalarField xx, xy, yy;

    ScalarField min_eigenvalues() const;
    ScalarField max_eigenvalues() const;
    ScalarField determinant() const;
};

// Pointwise square matrix field without a symmetry assumption, used for the
// Ricci endomorphism block in moment coordinates.
struct MatrixField {
    Grid grid{};
    ScalarField a11, a12, a21, a22;
};

// Hess u = I + Hess f via exact spectral differentiation of the perturbation.
SymmetricMatrixField hessian(const SymplecticPotential& u);

struct AdmissibilityReport {
    double min_eigenvalue = 0.0;
    double margin = 0.0;
    bool pass = false;
};

// Pointwise minimum eigenvalue of Hess u against the requested margin.
AdmissibilityReport check_admissibility(const SymplecticPotential& u,
                                        double margin = kDefaultAdmissibilityMargin);

// Throws InadmissibleMetric when the margin is violated.
void require_admissible(const SymplecticPotential& u, double margin, const char* where);

// log det Hess u, evaluated through log1p of the determinant's deviation
// from one so that nearly flat potentials keep full relative precision.
ScalarField log_det_hessian(const SymplecticPotential& u);

// Scalar curvature of the metric determined by u:
//   S(u) = -sum_{ij} d^2(u^{ij}) / dx_i dx_j .
// Internally the inverse Hessian is split as u^{ij} = delta_ij + M_ij and
// only the deviation M is differentiated, which avoids catastrophic
// cancellation near the flat metric.  Products are dealiased by the 2/3
// rule before differentiation.
ScalarField abreu_scalar_curvature(const SymplecticPotential& u);

// Ricci endomorphism block in moment coordinates, E^j_k = -d_k (u^{jb} h_b)
// with h = -(1/2) log det Hess u.  Its trace is S/2; on the real tangent
// space each eigenvalue occurs twice, so sup-norms agree with the complex
// block and the real trace is S.
MatrixField ricci_endomorphism(const SymplecticPotential& u);

struct RicciReport {
    double sup_ricci_norm = 0.0;  // sup over points of the largest |eigenvalue|
    double sup_scalar = 0.0;      // sup |S|
    double trace_defect = 0.0;    // sup |2 tr E - S|, a consistency diagnostic
};

RicciReport ricci_monitor(const SymplecticPotential& u);

// (Hess u, (Hess u)^{-1}) with the inverse taken pointwise in closed form.
std::pair<SymmetricMatrixField, SymmetricMatrixField>
reconstruct_metric(const SymplecticPotential& u);

} // namespace calabi
