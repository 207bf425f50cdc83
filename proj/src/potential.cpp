#include "cpflow/potential.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include <Eigen/Cholesky>

namespace cpflow
{

PotentialContext::PotentialContext(const SurfaceComplex& complex, InversiveDistances inversive,
                                   UCoords basepoint, std::optional<Eigen::VectorXd> target)
    : complex_(&complex), inversive_(std::move(inversive)), basepoint_(std::move(basepoint))
{
    const auto n = static_cast<Eigen::Index>(complex.vertex_count());
    if (basepoint_.values.size() != n) {
        throw ConfigError("basepoint has wrong dimension");
    }
    if (inversive_.size() != complex.edge_count()) {
        throw ConfigError("inversive distances have wrong dimension");
    }
    if (basepoint_.background == Background::hyperbolic && !(basepoint_.values.array() < 0.0).all()) {
        throw ConfigError("hyperbolic basepoint must have negative u-coordinates");
    }
    target_ = target.value_or(Eigen::VectorXd::Zero(n));
    if (target_.size() != n) {
        throw ConfigError("target curvature has wrong dimension");
    }
}

namespace
{

struct Panel {
    double a, b;
    // f at a, a + h/4, a + h/2, a + 3h/4, b
    std::array<double, 5> f;
    double estimate;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(double a, double b, const std::array<double, 5>& f)
{
    const double h = b - a;
    const double coarse = h / 6.0 * (f[0] + 4.0 * f[2] + f[4]);
    const double fine = h / 12.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
    const double diff = (fine - coarse) / 15.0;
    return Panel{a, b, f, fine + diff, std::abs(diff)};
}

}  // namespace

double PotentialContext::segment_integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                          double tolerance) const
{
    const Eigen::VectorXd delta = b - a;
    if (delta.cwiseAbs().maxCoeff() == 0.0) {
        return 0.0;
    }
    auto integrand = [&](double s) {
        UCoords u{background(), a + s * delta};
        const CurvatureVector k = extended_curvature(*complex_, inversive_, u);
        return (k.values - target_).dot(delta);
    };

    // Globally adaptive composite Simpson: always bisect the panel with the
    // largest Richardson error estimate.
    constexpr int kInitialPanels = 8;
    std::vector<double> nodes(4 * kInitialPanels + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = integrand(static_cast<double>(i) / (4.0 * kInitialPanels));
    }
    std::priority_queue<Panel> heap;
    double total_error = 0.0;
    double total_estimate = 0.0;
    for (int p = 0; p < kInitialPanels; ++p) {
        const std::array<double, 5> f{nodes[4 * p], nodes[4 * p + 1], nodes[4 * p + 2],
                                      nodes[4 * p + 3], nodes[4 * p + 4]};
        Panel panel = make_panel(static_cast<double>(p) / kInitialPanels,
                                 static_cast<double>(p + 1) / kInitialPanels, f);
        total_error += panel.error;
        total_estimate += panel.estimate;
        heap.push(panel);
    }
    // The tolerance is absolute for integrals of order one and relative above.
    while (total_error > tolerance * std::max(1.0, std::abs(total_estimate))) {
        if (heap.size() >= kMaxPanels) {
            throw QuadratureError("potential quadrature did not reach tolerance " +
                                  std::to_string(tolerance) + " (estimate " +
                                  std::to_string(total_error) + ")");
        }
        const Panel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        const double h = worst.b - worst.a;
        const Panel left = make_panel(
            worst.a, m,
            {worst.f[0], integrand(worst.a + 0.125 * h), worst.f[1], integrand(worst.a + 0.375 * h),
             worst.f[2]});
        const Panel right = make_panel(
            m, worst.b,
            {worst.f[2], integrand(worst.a + 0.625 * h), worst.f[3], integrand(worst.a + 0.875 * h),
             worst.f[4]});
        total_error += left.error + right.error - worst.error;
        total_estimate += left.estimate + right.estimate - worst.estimate;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally so the running error does not drift from cancellation.
        if (heap.size() % 1024 == 0) {
            auto copy = heap;
            total_error = 0.0;
            total_estimate = 0.0;
            while (!copy.empty()) {
                total_error += copy.top().error;
                total_estimate += copy.top().estimate;
                copy.pop();
            }
        }
    }
    // Sum smallest-first for a stable total.
    std::vector<double> parts;
    parts.reserve(heap.size());
    while (!heap.empty()) {
        parts.push_back(heap.top().estimate);
        heap.pop();
    }
    double sum = 0.0;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        sum += *it;
    }
    return sum;
}

double potential_value(const PotentialContext& ctx, const UCoords& u)
{
    return ctx.segment_integral(ctx.basepoint().values, u.values);
}

Eigen::VectorXd potential_gradient(const PotentialContext& ctx, const UCoords& u)
{
    return extended_curvature(ctx.complex(), ctx.inversive(), u).values - ctx.target();
}

namespace
{

bool in_domain(Background bg, const Eigen::VectorXd& u)
{
    if (!u.allFinite()) {
        return false;
    }
    if (bg == Background::hyperbolic) {
        // Stay away from u = 0 where radii exceed the representable range.
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            if (!(u[i] < 0.0) || u_to_radius(bg, u[i]) > kMaxHyperbolicMagnitude) {
                return false;
            }
        }
    }
    return true;
}

std::optional<Eigen::VectorXd> newton_direction(const PotentialContext& ctx, const UCoords& u,
                                                const Eigen::VectorXd& g)
{
    Eigen::MatrixXd H;
    try {
        H = curvature_jacobian(ctx.complex(), from_u(u, ctx.inversive()));
    } catch (const BoundaryError&) {
        return std::nullopt;
    }
    const auto n = H.rows();
    double mu = 0.0;
    while (true) {
        Eigen::LLT<Eigen::MatrixXd> llt(H + mu * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            Eigen::VectorXd d = llt.solve(-g);
            if (d.allFinite() && g.dot(d) < 0.0) {
                return d;
            }
        }
        mu = mu == 0.0 ? 1e-10 : mu * 10.0;
        if (mu > 1e-2 * (1.0 + 1e-12)) {
            return std::nullopt;
        }
    }
}

struct StepOutcome {
    Eigen::VectorXd u;
    Eigen::VectorXd g;
    double change;
    double alpha;
};

std::optional<StepOutcome> line_search(const PotentialContext& ctx, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& g, const Eigen::VectorXd& d)
{
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 60;
    const double slope = g.dot(d);
    const double residual = g.cwiseAbs().maxCoeff();
    double alpha = 1.0;
    for (int k = 0; k < kMaxHalvings; ++k, alpha *= 0.5) {
        const Eigen::VectorXd cand = u + alpha * d;
        if (!in_domain(ctx.background(), cand)) {
            continue;
        }
        Eigen::VectorXd g_new;
        double change;
        try {
            g_new = potential_gradient(ctx, UCoords{ctx.background(), cand});
            const double tol = std::max(1e-6 * std::abs(alpha * slope), 1e-300);
            change = ctx.segment_integral(u, cand, tol);
        } catch (const RangeError&) {
            continue;
        } catch (const QuadratureError&) {
            continue;
        }
        const bool armijo = change <= kArmijo * alpha * slope;
        const bool residual_halved = g_new.cwiseAbs().maxCoeff() <= 0.5 * residual;
        if (armijo || residual_halved) {
            return StepOutcome{cand, std::move(g_new), change, alpha};
        }
    }
    return std::nullopt;
}

}  // namespace

NewtonResult newton_solve(const PotentialContext& ctx, const UCoords& u_init, double tol,
                          int max_iter)
{
    if (ctx.background() != Background::hyperbolic || u_init.background != Background::hyperbolic) {
        throw ConfigError("newton_solve requires the hyperbolic background");
    }
    if (!((ctx.target().array() < 2.0 * std::numbers::pi).all())) {
        throw ConfigError("every prescribed curvature must be below 2 pi");
    }
    if (!(tol > 0.0) || max_iter < 0) {
        throw ConfigError("newton_solve needs tol > 0 and max_iter >= 0");
    }
    if (!in_domain(Background::hyperbolic, u_init.values)) {
        throw ConfigError("initial point outside the hyperbolic u-domain");
    }

    NewtonResult result;
    Eigen::VectorXd u = u_init.values;
    Eigen::VectorXd g = potential_gradient(ctx, u_init);
    double potential = 0.0;
    auto record = [&](int it, double step, bool newton) {
        result.history.push_back(
            {it, g.cwiseAbs().maxCoeff(), potential, u.norm(), step, newton});
    };
    record(0, 0.0, true);

    auto finish = [&](NewtonStatus status, int iterations) {
        result.status = status;
        result.solution = UCoords{Background::hyperbolic, u};
        result.iterations = iterations;
        result.residual = g.cwiseAbs().maxCoeff();
        return result;
    };

    for (int it = 0; it < max_iter; ++it) {
        if (g.cwiseAbs().maxCoeff() <= tol) {
            return finish(NewtonStatus::converged, it);
        }
        const UCoords current{Background::hyperbolic, u};
        std::optional<StepOutcome> step;
        bool used_newton = false;
        if (auto d = newton_direction(ctx, current, g)) {
            step = line_search(ctx, u, g, *d);
            used_newton = step.has_value();
        }
        if (!step) {
            step = line_search(ctx, u, g, -g);
        }
        if (!step) {
            finish(NewtonStatus::no_descent, it);
            throw NoDescentError("no descent step at iteration " + std::to_string(it), result);
        }
        u = step->u;
        g = step->g;
        potential += step->change;
        record(it + 1, step->alpha, used_newton);
    }
    if (g.cwiseAbs().maxCoeff() <= tol) {
        return finish(NewtonStatus::converged, max_iter);
    }
    finish(NewtonStatus::max_iter, max_iter);
    throw MaxIterError("no convergence after " + std::to_string(max_iter) + " iterations", result);
}

}  // namespace cpflow
