#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace cpflow
{

using VertexId = int;
using Face = std::array<VertexId, 3>;

/** Undirected edge stored canonically with a < b. */
struct Edge {
    VertexId a{0};
    VertexId b{0};

    static Edge canonical(VertexId x, VertexId y) noexcept
    {
        return x < y ? Edge{x, y} : Edge{y, x};
    }
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * Combinatorics of a closed triangulated surface.
 *
 * Vertices are dense integers 0..N-1. Edges are sorted lexicographically by
 * their canonical (min, max) key, which fixes the per-edge ordering used by
 * every per-edge array in the library. Immutable after construction.
 */
class SurfaceComplex
{
public:
    /**
     * Validate and index a face list. N is one past the largest vertex id.
     * Throws BadFaceError, NonManifoldError or DisconnectedLinkError.
     */
    static SurfaceComplex build(std::vector<Face> faces);

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t face_count() const noexcept { return faces_.size(); }

    const std::vector<Face>& faces() const noexcept { return faces_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /** Index of edge {x, y}; throws std::out_of_range if absent. */
    std::size_t edge_index(VertexId x, VertexId y) const;
    bool has_edge(VertexId x, VertexId y) const;

    /** Edge indices opposite corner 0, 1, 2 of face f. */
    const std::array<std::size_t, 3>& face_edges(std::size_t f) const
    {
        return face_edges_.at(f);
    }
    const std::array<std::size_t, 2>& edge_faces(std::size_t e) const
    {
        return edge_faces_.at(e);
    }
    const std::vector<std::size_t>& vertex_faces(VertexId v) const
    {
        return vertex_faces_.at(static_cast<std::size_t>(v));
    }
    std::size_t degree(VertexId v) const { return vertex_faces(v).size(); }

    int euler_characteristic() const noexcept
    {
        return static_cast<int>(vertex_count_) - static_cast<int>(edges_.size()) +
               static_cast<int>(faces_.size());
    }

private:
    SurfaceComplex() = default;

    std::size_t vertex_count_{0};
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::map<Edge, std::size_t> edge_lookup_;
    std::vector<std::array<std::size_t, 3>> face_edges_;
    std::vector<std::array<std::size_t, 2>> edge_faces_;
    std::vector<std::vector<std::size_t>> vertex_faces_;
};

/** Nonempty proper subset A of the vertex set. */
class VertexSubset
{
public:
    /** Throws std::invalid_argument unless 0 < |A| < N and ids are in range. */
    VertexSubset(const SurfaceComplex& complex, std::vector<VertexId> members);

    const std::vector<VertexId>& members() const noexcept { return members_; }
    bool contains(VertexId v) const { return mask_.at(static_cast<std::size_t>(v)); }
    std::size_t size() const noexcept { return members_.size(); }
    const std::vector<bool>& mask() const noexcept { return mask_; }

private:
    std::vector<VertexId> members_;
    std::vector<bool> mask_;
};

/** Pair (e, v) of Lk(A): e has no endpoint in A, v is in A, e and v span a face. */
struct LinkPair {
    Edge edge;
    VertexId vertex{0};
    friend auto operator<=>(const LinkPair&, const LinkPair&) = default;
};

/** chi(F_A) of the subcomplex induced on a vertex mask (any mask, including all of V). */
int induced_euler(const SurfaceComplex& complex, const std::vector<bool>& mask);

/** chi(F_A) of the subcomplex induced on A. */
int subcomplex_euler(const SurfaceComplex& complex, const VertexSubset& subset);

/** Lk(A), in face order. */
std::vector<LinkPair> link_pairs(const SurfaceComplex& complex, const VertexSubset& subset);

/** Every nonempty proper subset with at most max_size members, ordered by size then lexicographically. */
std::vector<VertexSubset> enumerate_subsets(const SurfaceComplex& complex, std::size_t max_size);

}  // namespace cpflow
