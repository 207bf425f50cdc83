#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cpflow/complex.hpp"
#include "cpflow/packing.hpp"

namespace cpflow
{

/**
 * classical:  u' = Kbar - K on the admissible space; stops when a face degenerates.
 * extended:   u' = Kbar - K~ on all radii.
 * prescribed: the extended flow with a mandatory target.
 * Kbar is zero unless a target is configured.
 */
enum class FlowVariant { classical, extended, prescribed };
enum class Integrator { euler, rk4 };

enum class FlowStatus { converged, max_time_reached, left_omega, diverged };

std::string_view to_string(FlowVariant v) noexcept;
std::string_view to_string(Integrator i) noexcept;
std::string_view to_string(FlowStatus s) noexcept;

struct FlowConfig {
    FlowVariant variant{FlowVariant::extended};
    std::optional<Eigen::VectorXd> target;
    Integrator integrator{Integrator::rk4};
    double step{0.05};
    double max_time{1000.0};
    /** Converged once max |K~ - Kbar| <= tolerance on kConsecutiveHits checks in a row. */
    double tolerance{1e-9};
    int sample_every{1};
    /** A radius above this ends the run with status diverged. */
    double divergence_radius_cap{50.0};
    /** Record the potential relative to u0, integrated along the trace between samples. */
    bool record_potential{true};

    static constexpr int kConsecutiveHits = 3;
};

struct FlowSample {
    double t{0.0};
    Eigen::VectorXd u;
    Eigen::VectorXd curvature;
    double max_curvature{0.0};  // M(t) = max(K_1..K_N, 0)
    double min_curvature{0.0};  // m(t) = min(K_1..K_N, 0)
    double potential{std::numeric_limits<double>::quiet_NaN()};
    double residual{0.0};
};

struct FlowResult {
    FlowStatus status{FlowStatus::max_time_reached};
    UCoords final_u;
    std::vector<FlowSample> trace;
    long iterations{0};
    double final_time{0.0};
    double final_residual{0.0};
    /** Last time the classical flow was inside the admissible space (left_omega only). */
    std::optional<double> exit_time;
};

/**
 * Integrate the configured Ricci flow from u0. Throws ConfigError for
 * inconsistent configuration (prescribed without target, classical start
 * outside the admissible space, bad sizes) and StepError if the state
 * becomes non-finite.
 */
FlowResult run_flow(const SurfaceComplex& complex, const InversiveDistances& inversive,
                    const UCoords& u0, const FlowConfig& config);

/** max_i |K~_i(u) - target_i|; a missing target means zero. */
double residual(const SurfaceComplex& complex, const InversiveDistances& inversive,
                const UCoords& u, const std::optional<Eigen::VectorXd>& target = std::nullopt);

struct RateFit {
    double rate{0.0};  // -slope of log residual against t
    double r_squared{0.0};
    std::size_t samples{0};
};

/** Least-squares fit of log(residual) against t over the last tail_fraction of the trace. */
RateFit fit_exponential_rate(const std::vector<FlowSample>& trace, double tail_fraction = 0.5);

struct StabilityReport {
    /** Smallest eigenvalue of L (of L restricted to 1^perp in the Euclidean background). */
    double min_eigenvalue{0.0};
    bool certified{false};
    bool orthogonal_complement{false};
    std::optional<RateFit> rate;
};

/**
 * Linear stability of the fixed point u_star: the flow's linearization is -L,
 * so a positive definite L certifies exponential local convergence. When a
 * trace is given, the observed rate is fitted from its tail.
 * Throws BoundaryError if u_star has a face on or outside the triangle-inequality boundary.
 */
StabilityReport stability_certificate(const SurfaceComplex& complex,
                                      const InversiveDistances& inversive, const UCoords& u_star,
                                      const std::vector<FlowSample>* trace = nullptr);

}  // namespace cpflow
