#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cpflow/complex.hpp"

namespace cpflow
{

/** Model geometry of the faces. The enum value is the Gauss-Bonnet constant lambda. */
enum class Background { euclidean = 0, hyperbolic = 1 };

inline double gauss_bonnet_lambda(Background bg) noexcept
{
    return bg == Background::hyperbolic ? 1.0 : 0.0;
}

std::string_view to_string(Background bg) noexcept;

/** Per-edge inversive distances, indexed by SurfaceComplex edge order. */
using InversiveDistances = std::vector<double>;

/** Radii and hyperbolic lengths above this are rejected (cosh overflows near 710). */
inline constexpr double kMaxHyperbolicMagnitude = 350.0;

/** Inversive distance circle packing metric on a fixed complex. */
struct PackingMetric {
    Background background{Background::hyperbolic};
    InversiveDistances inversive;
    Eigen::VectorXd radii;

    /**
     * Validated construction. By default every I_e must be >= 0; with
     * allow_negative_inversive set, I_e in (-1, 0) is accepted as well.
     * Throws DomainError.
     */
    static PackingMetric make(const SurfaceComplex& complex, Background background,
                              InversiveDistances inversive, Eigen::VectorXd radii,
                              bool allow_negative_inversive = false);
};

/** u-coordinates: ln tanh(r/2) (hyperbolic, all negative) or ln r (Euclidean). */
struct UCoords {
    Background background{Background::hyperbolic};
    Eigen::VectorXd values;
};

/** Hypotheses used by the convergence and obstruction theory. */
bool inversive_nonnegative(const InversiveDistances& inversive);
bool inversive_in_unit_interval(const InversiveDistances& inversive);

/**
 * Circle-packing edge length. Euclidean: sqrt(ri^2 + rj^2 + 2 ri rj I);
 * hyperbolic: arcosh(cosh ri cosh rj + I sinh ri sinh rj).
 * Throws DomainError when the hyperbolic argument falls below 1 (I < 0 only)
 * or I <= -1, RangeError for hyperbolic radii above kMaxHyperbolicMagnitude.
 */
double edge_length(Background background, double ri, double rj, double inversive);

/** Inverse of edge_length in I: the inversive distance of two circles at centre distance l. */
double inversive_from_length(Background background, double ri, double rj, double length);

/** edge_length for every edge, in canonical edge order. */
Eigen::VectorXd all_edge_lengths(const SurfaceComplex& complex, const PackingMetric& metric);

bool strict_triangle(double a, double b, double c) noexcept;

struct OmegaMembership {
    bool member{true};
    std::vector<std::size_t> violating_faces;
};

/** Strict triangle inequalities on every face (exact comparisons). */
OmegaMembership omega_membership(const SurfaceComplex& complex, const PackingMetric& metric);

double radius_to_u(Background background, double r);
double u_to_radius(Background background, double u);

UCoords to_u(const PackingMetric& metric);
/** Throws DomainError for hyperbolic u_i >= 0. */
PackingMetric from_u(const UCoords& u, InversiveDistances inversive);

}  // namespace cpflow
