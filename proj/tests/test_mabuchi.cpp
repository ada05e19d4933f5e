// Metric-space structure on the gauge slice: distances, affine geodesics,
// convexity of the K-energy along them, and the subgradient inequality.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "calabi/energetics.hpp"
#include "calabi/errors.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/mabuchi.hpp"
#include "calabi/toric.hpp"

#include "reference_values.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace calabi;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("distances between the named fixtures") {
    const Grid g1 = make_grid(1, 256);
    const SymplecticPotential f0 = fixture("F0", g1);
    const SymplecticPotential f1 = fixture("F1", g1);

    // Single cosine mode of amplitude a sits at distance a/sqrt(2); the grid
    // mean of cos^2 is exactly 1/2, so this is tight to roundoff.
    CHECK(rel_diff(distance(f0, f1), refvals::kDistF0F1) < 1e-14);
    CHECK(distance(f0, f0) == 0.0);
    CHECK(distance(f1, f0) == distance(f0, f1));

    const Grid g2 = make_grid(2, 64);
    CHECK(rel_diff(distance(fixture("F0", g2), fixture("F2", g2)), refvals::kDistF0F2)
          < 1e-14);
}

TEST_CASE("triangle inequality on fixture and random triples") {
    const Grid g = make_grid(1, 256);
    const SymplecticPotential a = fixture("F0", g);
    const SymplecticPotential b = fixture("F1b", g);
    const SymplecticPotential c = fixture("F1", g);
    CHECK(distance(a, b) + distance(b, c) >= distance(a, c) - 1e-15);

    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const SymplecticPotential x = random_admissible(g, seed);
        const SymplecticPotential y = random_admissible(g, seed + 100);
        const SymplecticPotential z = random_admissible(g, seed + 200);
        CHECK(distance(x, y) + distance(y, z) >= distance(x, z) - 1e-15);
    }
}

TEST_CASE("geodesic segments are affine with validated endpoints") {
    const Grid g = make_grid(1, 256);
    const SymplecticPotential f1 = fixture("F1", g);
    const SymplecticPotential f0 = fixture("F0", g);
    const GeodesicSegment seg = make_geodesic(f1, f0);

    SUBCASE("endpoints are reproduced exactly") {
        CHECK((geodesic_point(seg, 0.0).perturbation() - f1.perturbation()).sup_norm()
              == 0.0);
        CHECK((geodesic_point(seg, 1.0).perturbation() - f0.perturbation()).sup_norm()
              == 0.0);
    }
    SUBCASE("interior points stay on the gauge slice") {
        const SymplecticPotential mid = geodesic_point(seg, 0.5);
        CHECK(mid.gauge_fixed());
        CHECK(std::abs(mid.perturbation().mean()) < 1e-15);
    }
    SUBCASE("the segment realizes the distance additively") {
        const double t = 0.25;
        const SymplecticPotential p = geodesic_point(seg, t);
        CHECK(rel_diff(distance(f1, p), t * distance(f1, f0)) < 1e-12);
        CHECK(rel_diff(distance(p, f0), (1.0 - t) * distance(f1, f0)) < 1e-12);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(geodesic_point(seg, -0.1), ConfigError);
        CHECK_THROWS_AS(geodesic_point(seg, 1.1), ConfigError);
    }
    SUBCASE("construction validation") {
        CHECK_THROWS_AS(make_geodesic(f1, fixture("F0", make_grid(1, 128))), GridMismatch);
        ScalarField shifted(g, 0.3);
        CHECK_THROWS_AS(make_geodesic(f1, SymplecticPotential(std::move(shifted))),
                        std::invalid_argument);
    }
}

TEST_CASE("K-energy is convex along geodesics") {
    const Grid g = make_grid(1, 256);
    const GeodesicSegment seg = make_geodesic(fixture("F1", g), fixture("F0", g));

    const int samples = 21;
    std::vector<double> ks(samples);
    const double k0 = k_energy(fixture("F1", g));
    const double k1 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        ks[i] = k_energy(geodesic_point(seg, t));
        // chord above curve
        CHECK(ks[i] <= (1.0 - t) * k0 + t * k1 + 1e-12);
    }
    for (int i = 1; i + 1 < samples; ++i) {
        CHECK(ks[i - 1] - 2.0 * ks[i] + ks[i + 1] >= -1e-12);
    }
}

TEST_CASE("subgradient inequality with frozen F1/F0 values") {
    const Grid g = make_grid(1, 256);
    const ConvexityBound b = convexity_lower_bound(fixture("F1", g), fixture("F0", g));
    CHECK(rel_diff(b.lhs, refvals::kConvexityLhsF1F0) < 1e-10);
    CHECK(rel_diff(b.rhs, refvals::kConvexityRhsF1F0) < 1e-7);
    CHECK(rel_diff(b.gap(), refvals::kConvexityGapF1F0) < 1e-7);
    CHECK(b.gap() > 0.0);
}

TEST_CASE("subgradient inequality holds on random admissible pairs") {
    const Grid g1 = make_grid(1, 256);
    const Grid g2 = make_grid(2, 64);
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const ConvexityBound b1 =
            convexity_lower_bound(random_admissible(g1, seed), random_admissible(g1, seed + 50));
        CHECK(b1.gap() >= -1e-10);
        const ConvexityBound b2 =
            convexity_lower_bound(random_admissible(g2, seed), random_admissible(g2, seed + 50));
        CHECK(b2.gap() >= -1e-10);
    }
}

TEST_CASE("distance derivative along an affine segment") {
    const Grid g = make_grid(1, 256);
    const SymplecticPotential f1 = fixture("F1", g);
    const SymplecticPotential f0 = fixture("F0", g);
    const GeodesicSegment seg = make_geodesic(f1, f0);

    // Along A(t) = (1-t) f1, the distance to F0 is (1-t) d(f1, f0), so the
    // derivative is the constant -d(f1, f0).
    const ScalarField velocity = f0.perturbation() - f1.perturbation();
    const SymplecticPotential p = geodesic_point(seg, 0.25);
    const double dd = distance_derivative(p, velocity, f0);
    CHECK(rel_diff(dd, -refvals::kDistF0F1) < 1e-12);

    SUBCASE("matches central differences in t") {
        const double h = 1e-6;
        const double fd = (distance(geodesic_point(seg, 0.25 + h), f0)
                           - distance(geodesic_point(seg, 0.25 - h), f0)) / (2.0 * h);
        CHECK(rel_diff(dd, fd) < 1e-9);
    }
    SUBCASE("undefined at coincident potentials") {
        CHECK_THROWS_AS((void)distance_derivative(f0, velocity, f0), ConfigError);
    }
}
