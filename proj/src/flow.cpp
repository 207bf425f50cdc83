#include "cpflow/flow.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cpflow/curvature.hpp"
#include "cpflow/errors.hpp"
#include "cpflow/potential.hpp"

namespace cpflow
{

std::string_view to_string(FlowVariant v) noexcept
{
    switch (v) {
        case FlowVariant::classical: return "classical";
        case FlowVariant::extended: return "extended";
        case FlowVariant::prescribed: return "prescribed";
    }
    return "?";
}

std::string_view to_string(Integrator i) noexcept
{
    return i == Integrator::rk4 ? "rk4" : "euler";
}

std::string_view to_string(FlowStatus s) noexcept
{
    switch (s) {
        case FlowStatus::converged: return "converged";
        case FlowStatus::max_time_reached: return "max_time_reached";
        case FlowStatus::left_omega: return "left_omega";
        case FlowStatus::diverged: return "diverged";
    }
    return "?";
}

namespace
{

// Thrown inside a step when the state leaves the region the variant allows.
struct LeftOmega {};
struct Diverged {};

class FlowField
{
public:
    FlowField(const SurfaceComplex& complex, const InversiveDistances& inversive,
              const FlowConfig& config, Background background)
        : complex_(complex), inversive_(inversive), config_(config), background_(background),
          target_(config.target.value_or(
              Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex.vertex_count()))))
    {
    }

    const Eigen::VectorXd& target() const noexcept { return target_; }

    /** Extended curvature at u, enforcing the variant's domain. */
    Eigen::VectorXd curvature_at(const Eigen::VectorXd& u) const
    {
        if (!u.allFinite()) {
            throw StepError("non-finite flow state");
        }
        if (background_ == Background::hyperbolic && !(u.array() < 0.0).all()) {
            throw Diverged{};
        }
        const PackingMetric metric = from_u(UCoords{background_, u}, inversive_);
        for (Eigen::Index i = 0; i < metric.radii.size(); ++i) {
            const double r = metric.radii[i];
            if (!std::isfinite(r) || !(r > 0.0)) {
                if (r == 0.0) {
                    throw Diverged{};
                }
                throw StepError("radius " + std::to_string(i) + " is not positive and finite");
            }
            if (r > config_.divergence_radius_cap) {
                throw Diverged{};
            }
        }
        CurvatureVector k;
        try {
            k = extended_curvature(complex_, metric);
        } catch (const RangeError&) {
            throw Diverged{};
        }
        if (config_.variant == FlowVariant::classical && k.extended) {
            throw LeftOmega{};
        }
        if (!k.values.allFinite()) {
            throw StepError("non-finite curvature");
        }
        return k.values;
    }

    Eigen::VectorXd velocity(const Eigen::VectorXd& u) const { return target_ - curvature_at(u); }

private:
    const SurfaceComplex& complex_;
    const InversiveDistances& inversive_;
    const FlowConfig& config_;
    Background background_;
    Eigen::VectorXd target_;
};

void validate(const SurfaceComplex& complex, const InversiveDistances& inversive,
              const UCoords& u0, const FlowConfig& config)
{
    const auto n = static_cast<Eigen::Index>(complex.vertex_count());
    if (u0.values.size() != n) {
        throw ConfigError("initial u has wrong dimension");
    }
    if (inversive.size() != complex.edge_count()) {
        throw ConfigError("inversive distances have wrong dimension");
    }
    if (config.variant == FlowVariant::prescribed && !config.target) {
        throw ConfigError("prescribed flow requires a target curvature");
    }
    if (config.target && config.target->size() != n) {
        throw ConfigError("target curvature has wrong dimension");
    }
    if (!(config.step > 0.0) || !(config.max_time > 0.0) || !(config.tolerance > 0.0) ||
        config.sample_every < 1 || !(config.divergence_radius_cap > 0.0)) {
        throw ConfigError("step, max_time, tolerance, sample_every and radius cap must be positive");
    }
    if (u0.background == Background::hyperbolic && !(u0.values.array() < 0.0).all()) {
        throw ConfigError("hyperbolic initial u must be negative");
    }
    if (config.variant == FlowVariant::classical) {
        const PackingMetric m = from_u(u0, inversive);
        if (!omega_membership(complex, m).member) {
            throw ConfigError("classical flow must start inside the admissible space");
        }
    }
}

}  // namespace

FlowResult run_flow(const SurfaceComplex& complex, const InversiveDistances& inversive,
                    const UCoords& u0, const FlowConfig& config)
{
    validate(complex, inversive, u0, config);
    const Background bg = u0.background;
    FlowField field(complex, inversive, config, bg);
    std::optional<PotentialContext> potential;
    if (config.record_potential) {
        potential.emplace(complex, inversive, u0, config.target);
    }

    FlowResult result;
    Eigen::VectorXd u = u0.values;
    double t = 0.0;
    long steps = 0;
    int hits = 0;
    Eigen::VectorXd k;
    try {
        k = field.curvature_at(u);
    } catch (const Diverged&) {
        throw ConfigError("initial radii exceed the divergence cap or the representable range");
    }
    bool sampled_current = false;
    // The potential accumulates over the segments between consecutive samples;
    // the 1-form is closed, so this equals the integral from u0.
    Eigen::VectorXd potential_at = u0.values;
    double potential_value = 0.0;

    auto push_sample = [&](double res) {
        FlowSample s;
        s.t = t;
        s.u = u;
        s.curvature = k;
        s.max_curvature = std::max(k.maxCoeff(), 0.0);
        s.min_curvature = std::min(k.minCoeff(), 0.0);
        s.residual = res;
        if (potential) {
            potential_value += potential->segment_integral(potential_at, u);
            potential_at = u;
            s.potential = potential_value;
        }
        result.trace.push_back(std::move(s));
        sampled_current = true;
    };

    auto finish = [&](FlowStatus status, double res) {
        if (!sampled_current) {
            push_sample(res);
        }
        result.status = status;
        result.final_u = UCoords{bg, u};
        result.iterations = steps;
        result.final_time = t;
        result.final_residual = res;
        return result;
    };

    const double h = config.step;
    while (true) {
        const double res = (k - field.target()).cwiseAbs().maxCoeff();
        sampled_current = false;
        if (steps % config.sample_every == 0) {
            push_sample(res);
        }
        hits = res <= config.tolerance ? hits + 1 : 0;
        if (hits >= FlowConfig::kConsecutiveHits) {
            return finish(FlowStatus::converged, res);
        }
        if (t >= config.max_time) {
            return finish(FlowStatus::max_time_reached, res);
        }
        try {
            const Eigen::VectorXd k1 = field.target() - k;
            Eigen::VectorXd next;
            if (config.integrator == Integrator::euler) {
                next = u + h * k1;
            } else {
                const Eigen::VectorXd k2 = field.velocity(u + 0.5 * h * k1);
                const Eigen::VectorXd k3 = field.velocity(u + 0.5 * h * k2);
                const Eigen::VectorXd k4 = field.velocity(u + h * k3);
                next = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            const Eigen::VectorXd k_next = field.curvature_at(next);
            u = next;
            k = k_next;
            t = static_cast<double>(steps + 1) * h;
            ++steps;
        } catch (const LeftOmega&) {
            result.exit_time = t;
            return finish(FlowStatus::left_omega, res);
        } catch (const Diverged&) {
            return finish(FlowStatus::diverged, res);
        }
    }
}

double residual(const SurfaceComplex& complex, const InversiveDistances& inversive,
                const UCoords& u, const std::optional<Eigen::VectorXd>& target)
{
    Eigen::VectorXd k = extended_curvature(complex, inversive, u).values;
    if (target) {
        k -= *target;
    }
    return k.cwiseAbs().maxCoeff();
}

RateFit fit_exponential_rate(const std::vector<FlowSample>& trace, double tail_fraction)
{
    RateFit fit;
    const auto n = trace.size();
    const auto first = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * (1.0 - std::clamp(tail_fraction, 0.0, 1.0))));
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t i = first; i < n; ++i) {
        if (trace[i].residual > 0.0) {
            ts.push_back(trace[i].t);
            ys.push_back(std::log(trace[i].residual));
        }
    }
    fit.samples = ts.size();
    if (ts.size() < 3) {
        return fit;
    }
    const double m = static_cast<double>(ts.size());
    double tbar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= m;
    ybar /= m;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    if (stt == 0.0 || syy == 0.0) {
        return fit;
    }
    const double slope = sty / stt;
    fit.rate = -slope;
    fit.r_squared = (sty * sty) / (stt * syy);
    return fit;
}

StabilityReport stability_certificate(const SurfaceComplex& complex,
                                      const InversiveDistances& inversive, const UCoords& u_star,
                                      const std::vector<FlowSample>* trace)
{
    const PackingMetric metric = from_u(u_star, inversive);
    const Eigen::MatrixXd L = curvature_jacobian(complex, metric);
    StabilityReport report;
    Eigen::MatrixXd reduced = 0.5 * (L + L.transpose());
    if (u_star.background == Background::euclidean) {
        // Scaling invariance: L 1 = 0. Restrict to the orthogonal complement of 1.
        const auto n = L.rows();
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
        const Eigen::MatrixXd Q = qr.householderQ();
        const Eigen::MatrixXd basis = Q.rightCols(n - 1);
        reduced = basis.transpose() * reduced * basis;
        report.orthogonal_complement = true;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = eig.eigenvalues().minCoeff();
    report.certified = report.min_eigenvalue > 0.0;
    if (trace != nullptr) {
        report.rate = fit_exponential_rate(*trace);
    }
    return report;
}

}  // namespace cpflow
