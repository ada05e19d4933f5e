#pragma once

#include "calabi/potential.hpp"

namespace calabi {

// Affine segment between two gauge-fixed potentials on one grid.  In the
// symplectic-potential picture these segments are the metric-space geodesics,
// and the K-energy is convex along them.
struct GeodesicSegment {
    SymplecticPotential start;
    SymplecticPotential end;
};

// Validates grid agreement and gauge fixing; throws GridMismatch /
// std::invalid_argument on violation.
GeodesicSegment make_geodesic(SymplecticPotential start, SymplecticPotential end);

// Point at parameter t in [0,1]; throws ConfigError outside the segment.
SymplecticPotential geodesic_point(const GeodesicSegment& seg, double t);

// Metric-space distance: the L2 norm of the perturbation difference.
double distance(const SymplecticPotential& a, const SymplecticPotential& b);

// Derivative of t -> distance(u(t), anchor) along a curve through `moving`
// with velocity `velocity`:  <u - v, du/dt> / distance.  Undefined at
// coincident potentials; throws ConfigError there.
double distance_derivative(const SymplecticPotential& moving,
                           const ScalarField& velocity,
                           const SymplecticPotential& anchor);

// Convexity of K along affine segments in subgradient form:
//   K(v) - K(u) >= <S(u), v - u> .
struct ConvexityBound {
    double lhs = 0.0;  // K(v) - K(u)
    double rhs = 0.0;  // <S(u), v - u>
    double gap() const noexcept { return lhs - rhs; }
};

ConvexityBound convexity_lower_bound(const SymplecticPotential& u,
                                     const SymplecticPotential& v);

} // namespace calabi
