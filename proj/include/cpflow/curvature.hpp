#pragma once

#include <vector>

#include <Eigen/Core>

#include "cpflow/angles.hpp"
#include "cpflow/complex.hpp"
#include "cpflow/packing.hpp"

namespace cpflow
{

/** Per-vertex discrete Gaussian curvature plus the data Gauss-Bonnet needs. */
struct CurvatureVector {
    Eigen::VectorXd values;
    /** True when at least one face was degenerate and the extension was used. */
    bool extended{false};
    /** Sum of hyperbolic face angle defects; 0 in the Euclidean background. */
    double total_area{0.0};
    std::vector<std::size_t> degenerate_faces;
};

/** Classical curvature K_i = 2 pi - sum of inner angles at i. Throws NotInOmegaError. */
CurvatureVector curvature(const SurfaceComplex& complex, const PackingMetric& metric);

/** Extended curvature, defined for every positive radius vector. */
CurvatureVector extended_curvature(const SurfaceComplex& complex, const PackingMetric& metric);

/** extended_curvature evaluated at u-coordinates. */
CurvatureVector extended_curvature(const SurfaceComplex& complex,
                                   const InversiveDistances& inversive, const UCoords& u);

/** Sum K~ - 2 pi chi - lambda Area; zero up to rounding for every metric. */
double gauss_bonnet_defect(const SurfaceComplex& complex, const PackingMetric& metric);

/**
 * L = dK/du, assembled from the negated per-face angle Jacobians in face order.
 * Throws BoundaryError if any face is not strictly inside Xi.
 */
Eigen::MatrixXd curvature_jacobian(const SurfaceComplex& complex, const PackingMetric& metric);

}  // namespace cpflow
