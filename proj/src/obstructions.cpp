#include "cpflow/obstructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "cpflow/angles.hpp"
#include "cpflow/curvature.hpp"
#include "cpflow/errors.hpp"
#include "cpflow/parallel.hpp"

namespace cpflow
{

using std::numbers::pi;

double link_weight(const SurfaceComplex& complex, const InversiveDistances& inversive,
                   const VertexSubset& subset)
{
    double sum = 0.0;
    for (const auto& pair : link_pairs(complex, subset)) {
        sum += pi - lambda_aux(inversive[complex.edge_index(pair.edge.a, pair.edge.b)]);
    }
    return sum;
}

double ya_bound(const SurfaceComplex& complex, const InversiveDistances& inversive,
                const VertexSubset& subset)
{
    return -link_weight(complex, inversive, subset) +
           2.0 * pi * subcomplex_euler(complex, subset);
}

std::string_view to_string(ObstructionKind kind) noexcept
{
    switch (kind) {
        case ObstructionKind::theorem_41: return "subset_curvature_lower_bound";
        case ObstructionKind::zero_curvature_necessary: return "zero_curvature_necessary";
        case ObstructionKind::closure: return "extended_closure";
    }
    return "?";
}

std::vector<VertexSubset> select_subsets(const SurfaceComplex& complex,
                                         const SubsetSelection& selection)
{
    const bool exhaustive = selection.exhaustive_when_small &&
                            complex.vertex_count() <= SubsetSelection::kExhaustiveLimit;
    std::vector<VertexSubset> out =
        enumerate_subsets(complex, exhaustive ? complex.vertex_count() - 1 : selection.cap);
    for (const auto& members : selection.extra) {
        out.emplace_back(complex, members);
    }
    return out;
}

namespace
{

void require_nonnegative(const InversiveDistances& inversive)
{
    if (!inversive_nonnegative(inversive)) {
        throw DomainError("obstruction checks assume every inversive distance is >= 0");
    }
}

// Evaluate one record per subset in parallel, then summarize in subset order.
ObstructionReport assemble(ObstructionKind kind, const SurfaceComplex& complex,
                           const InversiveDistances& inversive,
                           const std::vector<VertexSubset>& subsets,
                           const Eigen::VectorXd* curvature, double tolerance)
{
    ObstructionReport report;
    report.kind = kind;
    report.records.resize(subsets.size());
    parallel_for(subsets.size(), [&](std::size_t s) {
        const VertexSubset& a = subsets[s];
        SubsetRecord& rec = report.records[s];
        rec.subset = a.members();
        rec.bound = ya_bound(complex, inversive, a);
        rec.observed = 0.0;
        if (curvature != nullptr) {
            for (auto v : a.members()) {
                rec.observed += (*curvature)[v];
            }
        }
        rec.margin = rec.observed - rec.bound;
    });
    report.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& rec : report.records) {
        const bool ok = kind == ObstructionKind::closure ? rec.margin >= -tolerance : rec.margin > 0.0;
        if (!ok) {
            ++report.failures;
        }
        report.min_margin = std::min(report.min_margin, rec.margin);
    }
    report.verdict = report.failures == 0;
    return report;
}

}  // namespace

ObstructionReport check_theorem_41(const SurfaceComplex& complex, const PackingMetric& metric,
                                   const SubsetSelection& selection)
{
    if (metric.background != Background::hyperbolic) {
        throw DomainError("subset curvature bound is stated for the hyperbolic background");
    }
    require_nonnegative(metric.inversive);
    const CurvatureVector k = curvature(complex, metric);
    return assemble(ObstructionKind::theorem_41, complex, metric.inversive,
                    select_subsets(complex, selection), &k.values, 0.0);
}

ObstructionReport check_zero_curvature_necessary(const SurfaceComplex& complex,
                                                 const InversiveDistances& inversive,
                                                 const SubsetSelection& selection)
{
    require_nonnegative(inversive);
    return assemble(ObstructionKind::zero_curvature_necessary, complex, inversive,
                    select_subsets(complex, selection), nullptr, 0.0);
}

ObstructionReport check_closure_inequality(const SurfaceComplex& complex,
                                           const PackingMetric& metric,
                                           const SubsetSelection& selection, double tolerance)
{
    if (metric.background != Background::hyperbolic) {
        throw DomainError("closure inequality is stated for the hyperbolic background");
    }
    require_nonnegative(metric.inversive);
    const CurvatureVector k = extended_curvature(complex, metric);
    return assemble(ObstructionKind::closure, complex, metric.inversive,
                    select_subsets(complex, selection), &k.values, tolerance);
}

std::vector<double> geometric_shrink_factors(int decades)
{
    std::vector<double> out;
    for (int k = 1; k <= decades; ++k) {
        out.push_back(std::pow(10.0, -k));
    }
    return out;
}

DegenerationTable verify_degeneration_limit(const SurfaceComplex& complex,
                                            const InversiveDistances& inversive,
                                            const VertexSubset& subset,
                                            const Eigen::VectorXd& base_radii,
                                            const std::vector<double>& shrink_factors)
{
    require_nonnegative(inversive);
    DegenerationTable table;
    table.limit = ya_bound(complex, inversive, subset);
    double previous_gap = std::numeric_limits<double>::infinity();
    for (double factor : shrink_factors) {
        Eigen::VectorXd radii = base_radii;
        for (auto v : subset.members()) {
            radii[v] *= factor;
        }
        const PackingMetric metric =
            PackingMetric::make(complex, Background::hyperbolic, inversive, radii);
        const CurvatureVector k = extended_curvature(complex, metric);
        double sum = 0.0;
        for (auto v : subset.members()) {
            sum += k.values[v];
        }
        const double gap = std::abs(sum - table.limit);
        table.rows.push_back({factor, sum, gap});
        if (gap > previous_gap) {
            table.monotone = false;
        }
        previous_gap = gap;
    }
    table.final_gap = table.rows.empty() ? 0.0 : table.rows.back().gap;
    return table;
}

TriangleAngleSpace::TriangleAngleSpace(std::array<double, 3> inv) : inv_(inv)
{
    for (int i = 0; i < 3; ++i) {
        if (!(inv[i] >= 0.0)) {
            throw std::invalid_argument("angle space needs nonnegative inversive distances");
        }
        upper_[i] = pi - lambda_aux(inv[i]);
    }
}

double TriangleAngleSpace::boundary_distance(const std::array<double, 3>& theta) const noexcept
{
    double slack = pi - (theta[0] + theta[1] + theta[2]);
    for (int i = 0; i < 3; ++i) {
        slack = std::min({slack, theta[i], upper_[i] - theta[i]});
    }
    return slack;
}

bool TriangleAngleSpace::contains(const std::array<double, 3>& theta) const noexcept
{
    return theta[0] + theta[1] + theta[2] < pi && theta[0] > 0.0 && theta[1] > 0.0 &&
           theta[2] > 0.0 && theta[0] < upper_[0] && theta[1] < upper_[1] &&
           theta[2] < upper_[2];
}

std::array<double, 3> TriangleAngleSpace::sample(std::mt19937_64& rng) const
{
    std::array<std::uniform_real_distribution<double>, 3> dist{
        std::uniform_real_distribution<double>(0.0, upper_[0]),
        std::uniform_real_distribution<double>(0.0, upper_[1]),
        std::uniform_real_distribution<double>(0.0, upper_[2])};
    while (true) {
        std::array<double, 3> theta{dist[0](rng), dist[1](rng), dist[2](rng)};
        if (contains(theta)) {
            return theta;
        }
    }
}

namespace
{

struct FaceEval {
    bool valid{false};
    Eigen::Vector3d residual;
};

FaceEval evaluate_face(const Eigen::Vector3d& u, const std::array<double, 3>& inv,
                       const std::array<double, 3>& target)
{
    FaceEval ev;
    if (!u.allFinite() || !(u.array() < 0.0).all()) {
        return ev;
    }
    std::array<double, 3> radii{};
    for (int i = 0; i < 3; ++i) {
        radii[i] = u_to_radius(Background::hyperbolic, u[i]);
        if (!(radii[i] > 0.0) || radii[i] > 0.5 * kMaxHyperbolicMagnitude) {
            return ev;
        }
    }
    const TriangleLengths lengths = face_lengths(Background::hyperbolic, radii, inv);
    if (!lengths.in_xi()) {
        return ev;
    }
    const GeneralizedAngles angles = extended_angles(Background::hyperbolic, lengths);
    for (int i = 0; i < 3; ++i) {
        ev.residual[i] = angles.theta[i] - target[i];
    }
    ev.valid = true;
    return ev;
}

std::array<double, 3> to_radii(const Eigen::Vector3d& u)
{
    return {u_to_radius(Background::hyperbolic, u[0]), u_to_radius(Background::hyperbolic, u[1]),
            u_to_radius(Background::hyperbolic, u[2])};
}

}  // namespace

TriangleSolve triangle_from_angles(const std::array<double, 3>& inv,
                                   const std::array<double, 3>& target, int max_starts)
{
    const TriangleAngleSpace space(inv);
    if (!space.contains(target)) {
        throw std::invalid_argument("target angles are not inside the face's angle space");
    }
    constexpr double kAccept = 1e-9;
    constexpr double kPolish = 1e-15;
    constexpr int kMaxIter = 200;

    // Fixed start list: equal radii at several scales, then a seeded scatter.
    std::vector<std::array<double, 3>> starts;
    for (double r : {1.0, 0.3, 3.0, 0.05, 8.0}) {
        starts.push_back({r, r, r});
    }
    std::mt19937_64 rng(0x5eed1234ULL);
    std::uniform_real_distribution<double> logr(std::log(0.01), std::log(20.0));
    while (static_cast<int>(starts.size()) < max_starts) {
        starts.push_back({std::exp(logr(rng)), std::exp(logr(rng)), std::exp(logr(rng))});
    }

    TriangleSolve best;
    best.residual = std::numeric_limits<double>::infinity();
    best.near_boundary = space.boundary_distance(target) < 1e-6;
    int tried = 0;
    for (const auto& start : starts) {
        if (tried >= max_starts) {
            break;
        }
        ++tried;
        Eigen::Vector3d u;
        for (int i = 0; i < 3; ++i) {
            u[i] = radius_to_u(Background::hyperbolic, start[i]);
        }
        FaceEval ev = evaluate_face(u, inv, target);
        if (!ev.valid) {
            continue;
        }
        int it = 0;
        for (; it < kMaxIter; ++it) {
            const double res = ev.residual.cwiseAbs().maxCoeff();
            if (res <= kPolish) {
                break;
            }
            Eigen::Matrix3d J;
            try {
                J = angle_jacobian_u(Background::hyperbolic, to_radii(u), inv);
            } catch (const BoundaryError&) {
                break;
            }
            const Eigen::Vector3d step = J.partialPivLu().solve(-ev.residual);
            if (!step.allFinite()) {
                break;
            }
            // Backtrack on the squared residual norm; stay inside the face's region.
            double alpha = 1.0;
            bool accepted = false;
            for (int k = 0; k < 60; ++k, alpha *= 0.5) {
                const Eigen::Vector3d cand = u + alpha * step;
                const FaceEval next = evaluate_face(cand, inv, target);
                if (next.valid &&
                    next.residual.squaredNorm() < (1.0 - 1e-4 * alpha) * ev.residual.squaredNorm()) {
                    u = cand;
                    ev = next;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                break;
            }
        }
        const double res = ev.residual.cwiseAbs().maxCoeff();
        if (res < best.residual) {
            best.radii = to_radii(u);
            best.residual = res;
            best.newton_iterations = it;
        }
        if (best.residual <= kAccept) {
            break;
        }
    }
    best.starts_tried = tried;
    if (!(best.residual <= kAccept)) {
        throw NotFoundError("no radii reproduce the target angles (best residual " +
                            std::to_string(best.residual) + ")");
    }
    return best;
}

}  // namespace cpflow
