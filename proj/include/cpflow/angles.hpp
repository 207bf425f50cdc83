#pragma once

#include <array>

#include <Eigen/Core>

#include "cpflow/packing.hpp"

namespace cpflow
{

/** Edge lengths of one (generalized) triangle; x[i] is opposite corner i. */
struct TriangleLengths {
    std::array<double, 3> x{};

    /** Strict triangle inequalities (the set Xi). */
    bool in_xi() const noexcept { return strict_triangle(x[0], x[1], x[2]); }
};

/** Extended inner angles of one face. theta[i] sits at corner i. */
struct GeneralizedAngles {
    std::array<double, 3> theta{};
    bool degenerate{false};

    double sum() const noexcept { return theta[0] + theta[1] + theta[2]; }
};

/** Clamped arccos: pi for x <= -1, arccos x on [-1, 1], 0 for x >= 1. */
double lambda_aux(double x) noexcept;

/**
 * Cosine-law ratio whose arccos is the angle opposite xi:
 * (xj^2 + xk^2 - xi^2) / (2 xj xk), or
 * (cosh xj cosh xk - cosh xi) / (sinh xj sinh xk).
 */
double cosine_law_ratio(Background background, double xi, double xj, double xk);

/**
 * Inner angles extended to all positive lengths. Equal to
 * Lambda(cosine_law_ratio) at every corner; inside Xi the half-angle form of
 * the cosine law is used for accuracy at small angles, and a length violating
 * a triangle inequality (x_i >= x_j + x_k) gives exactly (pi, 0, 0).
 * Throws RangeError for hyperbolic lengths above kMaxHyperbolicMagnitude.
 */
GeneralizedAngles extended_angles(Background background, const TriangleLengths& lengths);

/**
 * Angle defect pi - sum(theta). This is the hyperbolic area; it is zero for
 * degenerate faces and zero up to rounding for Euclidean faces.
 */
double triangle_area(Background background, const GeneralizedAngles& angles);

/** Lengths of the face spanned by three circles. inv[i] belongs to the edge opposite corner i. */
TriangleLengths face_lengths(Background background, const std::array<double, 3>& radii,
                             const std::array<double, 3>& inv);

/**
 * d(theta_0, theta_1, theta_2) / d(u_0, u_1, u_2) for one face, computed
 * analytically by the chain rule through the cosine law and edge lengths.
 * Throws BoundaryError unless the face is strictly inside Xi.
 */
Eigen::Matrix3d angle_jacobian_u(Background background, const std::array<double, 3>& radii,
                                 const std::array<double, 3>& inv);

/**
 * Hyperbolic radius of circle i at which l_ij + l_ik = l_jk for fixed r_j, r_k.
 * Zero when I_jk <= 1 (no root); otherwise the unique positive root, found
 * by bisection on a geometrically grown bracket.
 */
double degenerate_threshold_radius(double rj, double rk, double inv_ij, double inv_ik,
                                   double inv_jk);

}  // namespace cpflow
