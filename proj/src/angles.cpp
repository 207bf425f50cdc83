#include "cpflow/angles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cpflow/errors.hpp"

namespace cpflow
{

using std::numbers::pi;

double lambda_aux(double x) noexcept
{
    if (x <= -1.0) {
        return pi;
    }
    if (x >= 1.0) {
        return 0.0;
    }
    return std::acos(x);
}

double cosine_law_ratio(Background background, double xi, double xj, double xk)
{
    if (background == Background::euclidean) {
        return (xj * xj + xk * xk - xi * xi) / (2.0 * xj * xk);
    }
    // cosh a - 1 = 2 sinh^2(a/2); the numerator is expanded around 1 to keep
    // small triangles accurate.
    auto cm1 = [](double a) {
        const double s = std::sinh(0.5 * a);
        return 2.0 * s * s;
    };
    const double ci = cm1(xi);
    const double cj = cm1(xj);
    const double ck = cm1(xk);
    return (cj + ck + cj * ck - ci) / (std::sinh(xj) * std::sinh(xk));
}

namespace
{

// Half-angle form of the cosine law for the angle opposite a.
double half_angle(Background background, double a, double b, double c)
{
    const double s = 0.5 * (a + b + c);
    const double sa = 0.5 * (b + c - a);
    const double sb = 0.5 * (a + c - b);
    const double sc = 0.5 * (a + b - c);
    double t2;
    if (background == Background::euclidean) {
        t2 = (sb / s) * (sc / sa);
    } else {
        t2 = (std::sinh(sb) / std::sinh(s)) * (std::sinh(sc) / std::sinh(sa));
    }
    return 2.0 * std::atan(std::sqrt(t2));
}

void check_range(Background background, const TriangleLengths& lengths)
{
    if (background != Background::hyperbolic) {
        return;
    }
    for (double x : lengths.x) {
        if (x > kMaxHyperbolicMagnitude) {
            throw RangeError("hyperbolic edge length " + std::to_string(x) + " above " +
                             std::to_string(kMaxHyperbolicMagnitude));
        }
    }
}

}  // namespace

GeneralizedAngles extended_angles(Background background, const TriangleLengths& lengths)
{
    check_range(background, lengths);
    const auto& x = lengths.x;
    GeneralizedAngles out;
    for (int i = 0; i < 3; ++i) {
        if (x[i] >= x[(i + 1) % 3] + x[(i + 2) % 3]) {
            out.degenerate = true;
            out.theta = {0.0, 0.0, 0.0};
            out.theta[i] = pi;
            return out;
        }
    }
    for (int i = 0; i < 3; ++i) {
        out.theta[i] = half_angle(background, x[i], x[(i + 1) % 3], x[(i + 2) % 3]);
    }
    return out;
}

double triangle_area(Background /*background*/, const GeneralizedAngles& angles)
{
    if (angles.degenerate) {
        return 0.0;
    }
    return pi - angles.sum();
}

TriangleLengths face_lengths(Background background, const std::array<double, 3>& radii,
                             const std::array<double, 3>& inv)
{
    TriangleLengths t;
    for (int i = 0; i < 3; ++i) {
        t.x[i] = edge_length(background, radii[(i + 1) % 3], radii[(i + 2) % 3], inv[i]);
    }
    return t;
}

Eigen::Matrix3d angle_jacobian_u(Background background, const std::array<double, 3>& radii,
                                 const std::array<double, 3>& inv)
{
    const TriangleLengths lengths = face_lengths(background, radii, inv);
    if (!lengths.in_xi()) {
        throw BoundaryError("angle Jacobian requested outside the triangle-inequality region");
    }
    const GeneralizedAngles angles = extended_angles(background, lengths);
    const auto& x = lengths.x;
    const bool hyp = background == Background::hyperbolic;
    auto s = [&](double a) { return hyp ? std::sinh(a) : a; };

    // dtheta_i/dx_i = s(x_i) / (s(x_j) s(x_k) sin theta_i),
    // dtheta_i/dx_j = -dtheta_i/dx_i * cos theta_k.
    Eigen::Matrix3d dtheta_dx;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const double sin_i = std::sin(angles.theta[i]);
        if (!(sin_i > 0.0)) {
            throw BoundaryError("flat face: angle Jacobian is unbounded");
        }
        const double g = s(x[i]) / (s(x[j]) * s(x[k]) * sin_i);
        dtheta_dx(i, i) = g;
        dtheta_dx(i, j) = -g * std::cos(angles.theta[k]);
        dtheta_dx(i, k) = -g * std::cos(angles.theta[j]);
    }

    // dx_e/du_p for the two endpoints p of edge e (the edge opposite corner e).
    Eigen::Matrix3d dx_du = Eigen::Matrix3d::Zero();
    for (int e = 0; e < 3; ++e) {
        const int p = (e + 1) % 3;
        const int q = (e + 2) % 3;
        for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
            const double ra = radii[a];
            const double rb = radii[b];
            double d;
            if (hyp) {
                // dx/dr_a * dr_a/du_a with dr/du = sinh r
                d = (std::sinh(ra) * std::cosh(rb) + inv[e] * std::cosh(ra) * std::sinh(rb)) /
                    std::sinh(x[e]) * std::sinh(ra);
            } else {
                d = (ra + inv[e] * rb) / x[e] * ra;
            }
            dx_du(e, a) = d;
        }
    }
    return dtheta_dx * dx_du;
}

double degenerate_threshold_radius(double rj, double rk, double inv_ij, double inv_ik,
                                   double inv_jk)
{
    if (inv_jk <= 1.0) {
        return 0.0;
    }
    const auto bg = Background::hyperbolic;
    const double ljk = edge_length(bg, rj, rk, inv_jk);
    auto f = [&](double r) {
        return edge_length(bg, r, rj, inv_ij) + edge_length(bg, r, rk, inv_ik) - ljk;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxHyperbolicMagnitude) {
            throw RangeError("degenerate threshold radius beyond representable range");
        }
    }
    // f is strictly increasing, f(lo) <= 0 < f(hi).
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (f(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace cpflow
