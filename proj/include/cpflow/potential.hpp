#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cpflow/complex.hpp"
#include "cpflow/curvature.hpp"
#include "cpflow/errors.hpp"
#include "cpflow/packing.hpp"

namespace cpflow
{

/**
 * Extended (prescribed) Ricci potential
 *
 *   G(u) = integral from u0 to u of sum_i (K~_i - Kbar_i) du_i
 *
 * taken along the straight segment from the basepoint. The curvature 1-form is
 * closed, so G differs from the per-triangle potential only by a constant and
 * its gradient is K~ - Kbar. A zero target gives the unprescribed potential.
 *
 * The context keeps a reference to the complex; the complex must outlive it.
 */
class PotentialContext
{
public:
    PotentialContext(const SurfaceComplex& complex, InversiveDistances inversive, UCoords basepoint,
                     std::optional<Eigen::VectorXd> target = std::nullopt);

    const SurfaceComplex& complex() const noexcept { return *complex_; }
    const InversiveDistances& inversive() const noexcept { return inversive_; }
    const UCoords& basepoint() const noexcept { return basepoint_; }
    Background background() const noexcept { return basepoint_.background; }
    /** Prescribed curvature; all zeros when none was given. */
    const Eigen::VectorXd& target() const noexcept { return target_; }

    /**
     * Integral of the curvature 1-form along the segment a -> b, to an error
     * estimate of tolerance * max(1, |integral|). Throws QuadratureError.
     */
    double segment_integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            double tolerance = kQuadratureTolerance) const;

    /** Maximum number of Simpson panels before QuadratureError. */
    static constexpr std::size_t kMaxPanels = 200000;
    static constexpr double kQuadratureTolerance = 1e-10;

private:
    const SurfaceComplex* complex_;
    InversiveDistances inversive_;
    UCoords basepoint_;
    Eigen::VectorXd target_;
};

/** G at u; zero at the basepoint. */
double potential_value(const PotentialContext& ctx, const UCoords& u);

/** K~(u) - Kbar, exact (no quadrature). */
Eigen::VectorXd potential_gradient(const PotentialContext& ctx, const UCoords& u);

enum class NewtonStatus { converged, no_descent, max_iter };

struct NewtonIterate {
    int iteration{0};
    double residual{0.0};
    /** G(u_k) - G(u_init), accumulated over accepted segments. */
    double potential_change{0.0};
    double u_norm{0.0};
    double step{0.0};
    bool newton_direction{true};
};

struct NewtonResult {
    NewtonStatus status{NewtonStatus::max_iter};
    UCoords solution;
    int iterations{0};
    double residual{0.0};
    std::vector<NewtonIterate> history;
};

/** Base of the solver failures; carries the partial result. */
class NewtonFailure : public Error
{
public:
    NewtonFailure(const std::string& msg, NewtonResult result)
        : Error(msg), result_(std::move(result))
    {
    }
    const NewtonResult& result() const noexcept { return result_; }

private:
    NewtonResult result_;
};

class NoDescentError : public NewtonFailure { public: using NewtonFailure::NewtonFailure; };
class MaxIterError : public NewtonFailure { public: using NewtonFailure::NewtonFailure; };

/**
 * Damped Newton descent on the prescribed potential (hyperbolic background).
 *
 * The Hessian is the curvature Jacobian L, regularized with mu I
 * (mu = 1e-10 up to 1e-2, x10 per factorization failure) and replaced by a
 * gradient step when the iterate sits on a degenerate face or factorization
 * keeps failing. Steps are backtracked until the segment potential satisfies
 * Armijo's condition or the residual halves.
 *
 * Requires every target entry < 2 pi. Throws ConfigError, NoDescentError,
 * MaxIterError.
 */
NewtonResult newton_solve(const PotentialContext& ctx, const UCoords& u_init, double tol,
                          int max_iter);

}  // namespace cpflow
