#include "cpflow/packing.hpp"

#include <cmath>
#include <string>

#include "cpflow/errors.hpp"

namespace cpflow
{

std::string_view to_string(Background bg) noexcept
{
    return bg == Background::hyperbolic ? "hyperbolic" : "euclidean";
}

PackingMetric PackingMetric::make(const SurfaceComplex& complex, Background background,
                                  InversiveDistances inversive, Eigen::VectorXd radii,
                                  bool allow_negative_inversive)
{
    if (inversive.size() != complex.edge_count()) {
        throw DomainError("expected " + std::to_string(complex.edge_count()) +
                          " inversive distances, got " + std::to_string(inversive.size()));
    }
    if (static_cast<std::size_t>(radii.size()) != complex.vertex_count()) {
        throw DomainError("expected " + std::to_string(complex.vertex_count()) +
                          " radii, got " + std::to_string(radii.size()));
    }
    for (std::size_t e = 0; e < inversive.size(); ++e) {
        const double I = inversive[e];
        if (!std::isfinite(I) || I <= -1.0 || (I < 0.0 && !allow_negative_inversive)) {
            throw DomainError("inversive distance " + std::to_string(I) + " on edge " +
                              std::to_string(e) + " is not admissible");
        }
    }
    for (Eigen::Index i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
            throw DomainError("radius " + std::to_string(i) + " must be positive and finite");
        }
    }
    return PackingMetric{background, std::move(inversive), std::move(radii)};
}

bool inversive_nonnegative(const InversiveDistances& inversive)
{
    for (double I : inversive) {
        if (!(I >= 0.0)) {
            return false;
        }
    }
    return true;
}

bool inversive_in_unit_interval(const InversiveDistances& inversive)
{
    for (double I : inversive) {
        if (!(I >= 0.0 && I <= 1.0)) {
            return false;
        }
    }
    return true;
}

double edge_length(Background background, double ri, double rj, double inversive)
{
    if (!(inversive > -1.0)) {
        throw DomainError("inversive distance must exceed -1");
    }
    if (background == Background::euclidean) {
        const double sq = ri * ri + rj * rj + 2.0 * ri * rj * inversive;
        if (!(sq > 0.0)) {
            throw DomainError("non-positive squared euclidean edge length");
        }
        return std::sqrt(sq);
    }
    if (ri > kMaxHyperbolicMagnitude || rj > kMaxHyperbolicMagnitude) {
        throw RangeError("hyperbolic radius above " + std::to_string(kMaxHyperbolicMagnitude));
    }
    // cosh l - 1 written without the cancellation in cosh ri cosh rj - 1:
    // cosh a cosh b - 1 = sinh^2((a+b)/2) + sinh^2((a-b)/2).
    const double sp = std::sinh(0.5 * (ri + rj));
    const double sm = std::sinh(0.5 * (ri - rj));
    const double q = sp * sp + sm * sm + inversive * std::sinh(ri) * std::sinh(rj);
    if (q < 0.0) {
        throw DomainError("arcosh argument below 1");
    }
    // arcosh(1 + q) = log1p(q + sqrt(q (q + 2)))
    return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

double inversive_from_length(Background background, double ri, double rj, double length)
{
    if (background == Background::euclidean) {
        return (length * length - ri * ri - rj * rj) / (2.0 * ri * rj);
    }
    return (std::cosh(length) - std::cosh(ri) * std::cosh(rj)) / (std::sinh(ri) * std::sinh(rj));
}

Eigen::VectorXd all_edge_lengths(const SurfaceComplex& complex, const PackingMetric& metric)
{
    Eigen::VectorXd lengths(static_cast<Eigen::Index>(complex.edge_count()));
    for (std::size_t e = 0; e < complex.edge_count(); ++e) {
        const Edge& edge = complex.edges()[e];
        try {
            lengths[static_cast<Eigen::Index>(e)] =
                edge_length(metric.background, metric.radii[edge.a], metric.radii[edge.b],
                            metric.inversive[e]);
        } catch (const DomainError& err) {
            throw DomainError("edge {" + std::to_string(edge.a) + "," + std::to_string(edge.b) +
                              "}: " + err.what());
        }
    }
    return lengths;
}

bool strict_triangle(double a, double b, double c) noexcept
{
    return a + b > c && a + c > b && b + c > a;
}

OmegaMembership omega_membership(const SurfaceComplex& complex, const PackingMetric& metric)
{
    const Eigen::VectorXd lengths = all_edge_lengths(complex, metric);
    OmegaMembership out;
    for (std::size_t f = 0; f < complex.face_count(); ++f) {
        const auto& fe = complex.face_edges(f);
        if (!strict_triangle(lengths[fe[0]], lengths[fe[1]], lengths[fe[2]])) {
            out.member = false;
            out.violating_faces.push_back(f);
        }
    }
    return out;
}

double radius_to_u(Background background, double r)
{
    if (background == Background::euclidean) {
        return std::log(r);
    }
    // ln tanh(r/2) = -2 artanh(e^-r); the direct form is accurate for small r.
    if (r < 1.0) {
        return std::log(std::tanh(0.5 * r));
    }
    return -2.0 * std::atanh(std::exp(-r));
}

double u_to_radius(Background background, double u)
{
    if (background == Background::euclidean) {
        return std::exp(u);
    }
    if (!(u < 0.0)) {
        throw DomainError("hyperbolic u-coordinate must be negative");
    }
    // 2 artanh(e^u) = log((1 + e^u) / (1 - e^u)); -expm1(u) keeps 1 - e^u accurate.
    return std::log1p(2.0 * std::exp(u) / -std::expm1(u));
}

UCoords to_u(const PackingMetric& metric)
{
    UCoords u{metric.background, Eigen::VectorXd(metric.radii.size())};
    for (Eigen::Index i = 0; i < metric.radii.size(); ++i) {
        u.values[i] = radius_to_u(metric.background, metric.radii[i]);
    }
    return u;
}

PackingMetric from_u(const UCoords& u, InversiveDistances inversive)
{
    PackingMetric m{u.background, std::move(inversive), Eigen::VectorXd(u.values.size())};
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
        m.radii[i] = u_to_radius(u.background, u.values[i]);
    }
    return m;
}

}  // namespace cpflow
