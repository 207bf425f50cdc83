#include "cpflow/curvature.hpp"

#include <numbers>
#include <string>

#include "cpflow/errors.hpp"

namespace cpflow
{

using std::numbers::pi;

namespace
{

std::array<double, 3> face_inversive(const SurfaceComplex& complex, const PackingMetric& metric,
                                     std::size_t f)
{
    const auto& fe = complex.face_edges(f);
    return {metric.inversive[fe[0]], metric.inversive[fe[1]], metric.inversive[fe[2]]};
}

}  // namespace

CurvatureVector extended_curvature(const SurfaceComplex& complex, const PackingMetric& metric)
{
    const Eigen::VectorXd lengths = all_edge_lengths(complex, metric);
    CurvatureVector out;
    out.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(complex.vertex_count()),
                                           2.0 * pi);
    double area = 0.0;
    for (std::size_t f = 0; f < complex.face_count(); ++f) {
        const auto& face = complex.faces()[f];
        const auto& fe = complex.face_edges(f);
        const TriangleLengths t{{lengths[fe[0]], lengths[fe[1]], lengths[fe[2]]}};
        const GeneralizedAngles angles = extended_angles(metric.background, t);
        for (int c = 0; c < 3; ++c) {
            out.values[face[c]] -= angles.theta[c];
        }
        if (angles.degenerate) {
            out.extended = true;
            out.degenerate_faces.push_back(f);
        }
        area += triangle_area(metric.background, angles);
    }
    out.total_area = metric.background == Background::hyperbolic ? area : 0.0;
    return out;
}

CurvatureVector extended_curvature(const SurfaceComplex& complex,
                                   const InversiveDistances& inversive, const UCoords& u)
{
    return extended_curvature(complex, from_u(u, inversive));
}

CurvatureVector curvature(const SurfaceComplex& complex, const PackingMetric& metric)
{
    const OmegaMembership omega = omega_membership(complex, metric);
    if (!omega.member) {
        throw NotInOmegaError(std::to_string(omega.violating_faces.size()) +
                                  " face(s) violate the triangle inequality",
                              omega.violating_faces);
    }
    return extended_curvature(complex, metric);
}

double gauss_bonnet_defect(const SurfaceComplex& complex, const PackingMetric& metric)
{
    const CurvatureVector k = extended_curvature(complex, metric);
    return k.values.sum() - 2.0 * pi * complex.euler_characteristic() -
           gauss_bonnet_lambda(metric.background) * k.total_area;
}

Eigen::MatrixXd curvature_jacobian(const SurfaceComplex& complex, const PackingMetric& metric)
{
    const auto n = static_cast<Eigen::Index>(complex.vertex_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t f = 0; f < complex.face_count(); ++f) {
        const auto& face = complex.faces()[f];
        const std::array<double, 3> radii{metric.radii[face[0]], metric.radii[face[1]],
                                          metric.radii[face[2]]};
        Eigen::Matrix3d J;
        try {
            J = angle_jacobian_u(metric.background, radii, face_inversive(complex, metric, f));
        } catch (const BoundaryError& err) {
            throw BoundaryError("face " + std::to_string(f) + ": " + err.what());
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                L(face[a], face[b]) -= J(a, b);
            }
        }
    }
    return L;
}

}  // namespace cpflow
