#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "cpflow/angles.hpp"
#include "cpflow/errors.hpp"
#include "oracles.hpp"

using namespace cpflow;

namespace
{

constexpr double kPi = std::numbers::pi;

std::array<double, 3> angles_at(Background bg, const std::array<double, 3>& r,
                                const std::array<double, 3>& inv)
{
    return extended_angles(bg, face_lengths(bg, r, inv)).theta;
}

Eigen::Vector3d angles_of_u(Background bg, const Eigen::Vector3d& u, const std::array<double, 3>& inv)
{
    const std::array<double, 3> r{u_to_radius(bg, u[0]), u_to_radius(bg, u[1]), u_to_radius(bg, u[2])};
    const auto t = angles_at(bg, r, inv);
    return {t[0], t[1], t[2]};
}

// Random face strictly inside the triangle inequalities.
struct Face3 {
    std::array<double, 3> r;
    std::array<double, 3> inv;
};

Face3 interior_face(std::mt19937_64& rng, Background bg, double inv_hi)
{
    std::uniform_real_distribution<double> inv(0.0, inv_hi);
    for (;;) {
        Face3 f{{oracle::log_uniform(rng, 0.1, 5.0), oracle::log_uniform(rng, 0.1, 5.0),
                 oracle::log_uniform(rng, 0.1, 5.0)},
                {inv(rng), inv(rng), inv(rng)}};
        const auto x = face_lengths(bg, f.r, f.inv).x;
        // keep a margin so central differences stay inside
        if (x[0] < 0.99 * (x[1] + x[2]) && x[1] < 0.99 * (x[0] + x[2]) &&
            x[2] < 0.99 * (x[0] + x[1])) {
            return f;
        }
    }
}

}  // namespace

TEST(Lambda, Examples)
{
    EXPECT_EQ(lambda_aux(-2.0), kPi);
    EXPECT_DOUBLE_EQ(lambda_aux(0.0), kPi / 2);
    EXPECT_EQ(lambda_aux(1.0), 0.0);
    EXPECT_NEAR(lambda_aux(1.0 - 1e-12), 0.0, 1e-5);
    EXPECT_EQ(lambda_aux(7.0), 0.0);
}

TEST(Lambda, ContinuousNonincreasingAndOdd)
{
    double prev = kPi;
    for (double x = -3.0; x <= 3.0; x += 1e-3) {
        const double v = lambda_aux(x);
        EXPECT_LE(v, prev);
        EXPECT_LE(prev - v, 0.05);
        EXPECT_NEAR(lambda_aux(-x), kPi - v, 1e-15);
        prev = v;
    }
}

TEST(ExtendedAngles, DegenerateRule)
{
    for (auto bg : {Background::euclidean, Background::hyperbolic}) {
        const auto a = extended_angles(bg, {{5.0, 1.0, 1.0}});
        EXPECT_TRUE(a.degenerate);
        EXPECT_EQ(a.theta[0], kPi);
        EXPECT_EQ(a.theta[1], 0.0);
        EXPECT_EQ(a.theta[2], 0.0);
        const auto b = extended_angles(bg, {{1.0, 2.0, 1.0}});
        EXPECT_TRUE(b.degenerate);
        EXPECT_EQ(b.theta[1], kPi);
    }
}

TEST(ExtendedAngles, Equilateral)
{
    const auto e = extended_angles(Background::euclidean, {{1.0, 1.0, 1.0}});
    EXPECT_FALSE(e.degenerate);
    for (double t : e.theta) {
        EXPECT_NEAR(t, kPi / 3, 1e-15);
    }
    const double x = std::acosh(2.0);
    const auto h = extended_angles(Background::hyperbolic, {{x, x, x}});
    for (double t : h.theta) {
        EXPECT_NEAR(t, std::acos(2.0 / 3.0), 1e-14);
    }
    EXPECT_NEAR(triangle_area(Background::hyperbolic, h), kPi - 3 * std::acos(2.0 / 3.0), 1e-14);
}

TEST(ExtendedAngles, MatchesCosineLawInsideXi)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double b = oracle::log_uniform(rng, 0.05, 6.0);
        const double c = oracle::log_uniform(rng, 0.05, 6.0);
        const double a = std::abs(b - c) + (b + c - std::abs(b - c)) * (0.01 + 0.98 * u(rng));
        const std::array<double, 3> x{a, b, c};
        for (auto bg : {Background::euclidean, Background::hyperbolic}) {
            const auto got = extended_angles(bg, {x});
            ASSERT_FALSE(got.degenerate);
            const auto want = oracle::cosine_law_angles(bg, x);
            for (int i = 0; i < 3; ++i) {
                EXPECT_NEAR(got.theta[i], want[i], 1e-12);
            }
            if (bg == Background::euclidean) {
                EXPECT_NEAR(got.sum(), kPi, 1e-14);
            } else {
                EXPECT_LT(got.sum(), kPi);
            }
        }
    }
}

TEST(ExtendedAngles, EqualsLambdaOfRatioEverywhere)
{
    std::mt19937_64 rng(12);
    for (int n = 0; n < 2000; ++n) {
        const std::array<double, 3> x{oracle::log_uniform(rng, 0.05, 6.0),
                                      oracle::log_uniform(rng, 0.05, 6.0),
                                      oracle::log_uniform(rng, 0.05, 6.0)};
        for (auto bg : {Background::euclidean, Background::hyperbolic}) {
            const auto got = extended_angles(bg, {x});
            for (int i = 0; i < 3; ++i) {
                const double ratio = cosine_law_ratio(bg, x[i], x[(i + 1) % 3], x[(i + 2) % 3]);
                EXPECT_NEAR(got.theta[i], lambda_aux(ratio), 2e-7) << x[0] << ' ' << x[1] << ' ' << x[2];
            }
        }
    }
}

TEST(ExtendedAngles, ContinuousAcrossBoundary)
{
    std::mt19937_64 rng(13);
    for (int n = 0; n < 100; ++n) {
        const double b = oracle::log_uniform(rng, 0.1, 4.0);
        const double c = oracle::log_uniform(rng, 0.1, 4.0);
        for (auto bg : {Background::euclidean, Background::hyperbolic}) {
            const auto inside = extended_angles(bg, {{(b + c) * (1 - 1e-14), b, c}});
            const auto outside = extended_angles(bg, {{(b + c) * (1 + 1e-14), b, c}});
            for (int i = 0; i < 3; ++i) {
                EXPECT_NEAR(inside.theta[i], outside.theta[i], 1e-6);
            }
        }
    }
}

TEST(TriangleArea, Examples)
{
    GeneralizedAngles deg{{kPi, 0.0, 0.0}, true};
    EXPECT_EQ(triangle_area(Background::hyperbolic, deg), 0.0);
    EXPECT_EQ(triangle_area(Background::euclidean, deg), 0.0);
    const auto e = extended_angles(Background::euclidean, {{3.0, 4.0, 5.0}});
    EXPECT_NEAR(triangle_area(Background::euclidean, e), 0.0, 1e-15);
    const auto h = extended_angles(Background::hyperbolic, {{3.0, 4.0, 5.0}});
    EXPECT_GT(triangle_area(Background::hyperbolic, h), 0.0);
}

TEST(AngleJacobian, PermutationInvariantForSymmetricInput)
{
    for (auto bg : {Background::euclidean, Background::hyperbolic}) {
        const Eigen::Matrix3d j = angle_jacobian_u(bg, {0.7, 0.7, 0.7}, {0.4, 0.4, 0.4});
        Eigen::Matrix3d p;
        p << 0, 1, 0, 0, 0, 1, 1, 0, 0;
        EXPECT_LE((p * j * p.transpose() - j).cwiseAbs().maxCoeff(), 1e-14);
        Eigen::Matrix3d s;
        s << 0, 1, 0, 1, 0, 0, 0, 0, 1;
        EXPECT_LE((s * j * s.transpose() - j).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(AngleJacobian, SymmetricNegativeDefiniteAndMatchesDifferences)
{
    std::mt19937_64 rng(14);
    const Background bg = Background::hyperbolic;
    for (int n = 0; n < 200; ++n) {
        const Face3 f = interior_face(rng, bg, 3.0);
        const Eigen::Matrix3d j = angle_jacobian_u(bg, f.r, f.inv);
        EXPECT_LE((j - j.transpose()).cwiseAbs().maxCoeff(), 1e-9);
        const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(j).eigenvalues();
        EXPECT_LT(ev.maxCoeff(), 0.0);

        const Eigen::Vector3d u{radius_to_u(bg, f.r[0]), radius_to_u(bg, f.r[1]), radius_to_u(bg, f.r[2])};
        const Eigen::MatrixXd fd = oracle::jacobian_fd(
            [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return angles_of_u(bg, v, f.inv); }, u, 1e-5);
        EXPECT_LE((fd - j).cwiseAbs().maxCoeff(), 1e-6 * j.cwiseAbs().maxCoeff());
    }
}

TEST(AngleJacobian, EuclideanScalingDirection)
{
    std::mt19937_64 rng(15);
    for (int n = 0; n < 100; ++n) {
        const Face3 f = interior_face(rng, Background::euclidean, 3.0);
        const Eigen::Matrix3d j = angle_jacobian_u(Background::euclidean, f.r, f.inv);
        EXPECT_LE((j * Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 1e-12 * j.cwiseAbs().maxCoeff());
        EXPECT_LE((j - j.transpose()).cwiseAbs().maxCoeff(), 1e-9);
        const Eigen::Vector3d u{std::log(f.r[0]), std::log(f.r[1]), std::log(f.r[2])};
        const Eigen::MatrixXd fd = oracle::jacobian_fd(
            [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                return angles_of_u(Background::euclidean, v, f.inv);
            },
            u, 1e-5);
        EXPECT_LE((fd - j).cwiseAbs().maxCoeff(), 1e-6 * j.cwiseAbs().maxCoeff());
    }
}

TEST(AngleJacobian, RefusedOutsideXi)
{
    // Tiny r_0 with I_jk = 3 opposite: l_jk exceeds l_0j + l_0k ~ 2.
    EXPECT_THROW(angle_jacobian_u(Background::hyperbolic, {1e-8, 1.0, 1.0}, {3.0, 0.0, 0.0}), BoundaryError);
    EXPECT_THROW(angle_jacobian_u(Background::euclidean, {1e-8, 1.0, 1.0}, {3.0, 0.0, 0.0}), BoundaryError);
}

TEST(DegenerateThreshold, Examples)
{
    EXPECT_EQ(degenerate_threshold_radius(0.7, 2.0, 0.3, 0.9, 1.0), 0.0);
    EXPECT_EQ(degenerate_threshold_radius(0.7, 2.0, 0.3, 0.9, 0.5), 0.0);

    const double root = degenerate_threshold_radius(1.0, 1.0, 0.0, 0.0, 3.0);
    ASSERT_GT(root, 0.0);
    auto f = [](double ri) {
        return oracle::edge_length(Background::hyperbolic, ri, 1.0, 0.0) * 2 -
               oracle::edge_length(Background::hyperbolic, 1.0, 1.0, 3.0);
    };
    EXPECT_LT(f(root * (1 - 1e-9)), 0.0);
    EXPECT_GT(f(root * (1 + 1e-9)), 0.0);
    EXPECT_LE(std::abs(f(root)), 1e-12);
}

TEST(DegenerateThreshold, RandomRootsSeparateSigns)
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> small(0.0, 1.0);
    std::uniform_real_distribution<double> big(1.01, 5.0);
    for (int n = 0; n < 200; ++n) {
        const double rj = oracle::log_uniform(rng, 0.1, 4.0);
        const double rk = oracle::log_uniform(rng, 0.1, 4.0);
        const double iij = small(rng);
        const double iik = small(rng);
        const double ijk = big(rng);
        const double root = degenerate_threshold_radius(rj, rk, iij, iik, ijk);
        const double ljk = oracle::edge_length(Background::hyperbolic, rj, rk, ijk);
        auto f = [&](double ri) {
            return oracle::edge_length(Background::hyperbolic, ri, rj, iij) +
                   oracle::edge_length(Background::hyperbolic, ri, rk, iik) - ljk;
        };
        EXPECT_LE(std::abs(f(root)), 1e-12 * std::max(1.0, ljk));
        EXPECT_LE(f(root * (1 - 1e-6)), 0.0);
        EXPECT_GE(f(root * (1 + 1e-6)), 0.0);
    }
}

TEST(AngleLimits, SmallAndLargeRadii)
{
    const Background bg = Background::hyperbolic;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> inv(0.0, 3.0);
    for (int n = 0; n < 50; ++n) {
        const std::array<double, 3> i{inv(rng), inv(rng), inv(rng)};
        const double rj = oracle::log_uniform(rng, 0.2, 3.0);
        const double rk = oracle::log_uniform(rng, 0.2, 3.0);
        // r_i -> 0: theta_i -> pi - Lambda(I_jk)
        EXPECT_NEAR(angles_at(bg, {1e-6, rj, rk}, i)[0], kPi - lambda_aux(i[0]), 1e-4);
        // (r_i, r_j) -> 0: theta_k -> 0
        EXPECT_NEAR(angles_at(bg, {1e-6, 1e-6, rk}, i)[2], 0.0, 1e-4);
        // r_i -> infinity: theta_i -> 0
        EXPECT_LT(angles_at(bg, {50.0, rj, rk}, i)[0], 1e-3);
    }
}

TEST(AngleMonotonicity, DecreasingInOwnRadiusWithinBound)
{
    const Background bg = Background::hyperbolic;
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> inv(0.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        const std::array<double, 3> i{inv(rng), inv(rng), inv(rng)};
        const double rj = oracle::log_uniform(rng, 0.2, 3.0);
        const double rk = oracle::log_uniform(rng, 0.2, 3.0);
        double prev = kPi;
        for (double ri = 1e-3; ri < 20.0; ri *= 1.3) {
            const auto t = angles_at(bg, {ri, rj, rk}, i);
            EXPECT_LT(t[0], prev);
            EXPECT_GT(t[0], 0.0);
            EXPECT_LT(t[0], kPi - lambda_aux(i[0]));
            prev = t[0];
        }
    }
}

TEST(ExtendedAngles, RangeGuard)
{
    EXPECT_THROW(extended_angles(Background::hyperbolic, {{400.0, 1.0, 1.0}}), RangeError);
    EXPECT_NO_THROW(extended_angles(Background::euclidean, {{400.0, 1.0, 1.0}}));
}
