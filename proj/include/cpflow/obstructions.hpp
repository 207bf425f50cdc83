#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cpflow/complex.hpp"
#include "cpflow/packing.hpp"

namespace cpflow
{

/**
 * Lower bound of the subset curvature sum:
 *   -sum over Lk(A) of (pi - Lambda(I_e)) + 2 pi chi(F_A).
 */
double ya_bound(const SurfaceComplex& complex, const InversiveDistances& inversive,
                const VertexSubset& subset);

/** sum over Lk(A) of (pi - Lambda(I_e)). */
double link_weight(const SurfaceComplex& complex, const InversiveDistances& inversive,
                   const VertexSubset& subset);

/** Which subsets a check visits. */
struct SubsetSelection {
    /** Enumerate all nonempty proper subsets when N <= kExhaustiveLimit. */
    bool exhaustive_when_small{true};
    /** Otherwise subsets with at most this many vertices. */
    std::size_t cap{3};
    /** Always appended after the enumerated subsets. */
    std::vector<std::vector<VertexId>> extra;

    static constexpr std::size_t kExhaustiveLimit = 16;
};

std::vector<VertexSubset> select_subsets(const SurfaceComplex& complex,
                                         const SubsetSelection& selection);

struct SubsetRecord {
    std::vector<VertexId> subset;
    double bound{0.0};
    double observed{0.0};
    double margin{0.0};  // observed - bound
};

enum class ObstructionKind { theorem_41, zero_curvature_necessary, closure };

std::string_view to_string(ObstructionKind kind) noexcept;

struct ObstructionReport {
    ObstructionKind kind{ObstructionKind::theorem_41};
    std::vector<SubsetRecord> records;
    /** theorem_41 / zero_curvature_necessary: every margin > 0; closure: every margin >= -tolerance. */
    bool verdict{true};
    std::size_t failures{0};
    double min_margin{0.0};
};

/**
 * Strict subset inequality sum_A K_i > bound for a metric in the admissible
 * space (hyperbolic, I >= 0). A failing record signals a library bug.
 * Throws NotInOmegaError and DomainError.
 */
ObstructionReport check_theorem_41(const SurfaceComplex& complex, const PackingMetric& metric,
                                   const SubsetSelection& selection = {});

/**
 * Necessary condition for a zero-curvature metric: sum over Lk(A) of
 * (pi - Lambda(I_e)) > 2 pi chi(F_A) for every checked A. Each record has
 * observed = 0, so margin = -bound. A false verdict rules out zero curvature.
 */
ObstructionReport check_zero_curvature_necessary(const SurfaceComplex& complex,
                                                 const InversiveDistances& inversive,
                                                 const SubsetSelection& selection = {});

/**
 * Closure inequality sum_A K~_i >= bound - tolerance for arbitrary positive radii
 * (hyperbolic, I >= 0).
 */
ObstructionReport check_closure_inequality(const SurfaceComplex& complex,
                                           const PackingMetric& metric,
                                           const SubsetSelection& selection = {},
                                           double tolerance = 1e-9);

struct DegenerationRow {
    double factor{0.0};
    double subset_curvature{0.0};
    double gap{0.0};  // |subset_curvature - limit|
};

struct DegenerationTable {
    double limit{0.0};
    std::vector<DegenerationRow> rows;
    /** |gap| never increases along the table. */
    bool monotone{true};
    double final_gap{0.0};
};

/**
 * Shrink the radii on A by each factor (off-A radii fixed) and tabulate
 * sum_A K~ against its limit ya_bound(A). Hyperbolic background, I >= 0.
 */
DegenerationTable verify_degeneration_limit(const SurfaceComplex& complex,
                                            const InversiveDistances& inversive,
                                            const VertexSubset& subset,
                                            const Eigen::VectorXd& base_radii,
                                            const std::vector<double>& shrink_factors);

/** Geometric shrink factors 10^-1 .. 10^-k. */
std::vector<double> geometric_shrink_factors(int decades);

/**
 * Angle image of a single hyperbolic face with fixed inversive distances
 * inv[i] (edge opposite corner i):
 *   Z = { sum theta < pi, 0 < theta_i < pi - Lambda(inv[i]) }.
 */
class TriangleAngleSpace
{
public:
    explicit TriangleAngleSpace(std::array<double, 3> inv);

    const std::array<double, 3>& inversive() const noexcept { return inv_; }
    /** pi - Lambda(inv[i]) */
    const std::array<double, 3>& upper() const noexcept { return upper_; }

    bool contains(const std::array<double, 3>& theta) const noexcept;
    /** Smallest slack to any of the defining inequalities (negative outside). */
    double boundary_distance(const std::array<double, 3>& theta) const noexcept;

    /** Uniform sample by rejection from the bounding box. */
    std::array<double, 3> sample(std::mt19937_64& rng) const;

private:
    std::array<double, 3> inv_;
    std::array<double, 3> upper_;
};

struct TriangleSolve {
    std::array<double, 3> radii{};
    double residual{0.0};
    int starts_tried{0};
    int newton_iterations{0};
    /** Target within 1e-6 of the boundary of Z; radii may be tending to 0 or infinity. */
    bool near_boundary{false};
};

/**
 * Radii of the hyperbolic face whose inner angles equal target (inverse of the
 * angle map on a single face). Newton in u-coordinates with the analytic angle
 * Jacobian, restarted from a fixed list of starts. Throws NotFoundError when
 * no start reaches a max-norm angle error of 1e-9, std::invalid_argument if
 * target is outside Z.
 */
TriangleSolve triangle_from_angles(const std::array<double, 3>& inv,
                                   const std::array<double, 3>& target, int max_starts = 24);

}  // namespace cpflow
