#include "cpflow/complex.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cpflow/errors.hpp"

namespace cpflow
{

namespace
{

std::string edge_name(const Edge& e)
{
    return "{" + std::to_string(e.a) + "," + std::to_string(e.b) + "}";
}

// The link of v is the set of edges opposite v in its faces. For a closed
// surface it must be one cycle through every neighbour.
bool link_is_single_cycle(const SurfaceComplex& complex, VertexId v)
{
    const auto& faces = complex.vertex_faces(v);
    if (faces.size() < 3) {
        return false;
    }
    std::map<VertexId, std::vector<VertexId>> adjacency;
    for (auto f : faces) {
        const Face& face = complex.faces()[f];
        std::array<VertexId, 2> opposite{};
        int k = 0;
        for (auto w : face) {
            if (w != v) {
                opposite[k++] = w;
            }
        }
        adjacency[opposite[0]].push_back(opposite[1]);
        adjacency[opposite[1]].push_back(opposite[0]);
    }
    for (const auto& [w, nbrs] : adjacency) {
        if (nbrs.size() != 2) {
            return false;
        }
    }
    // Walk the cycle and make sure it visits every link vertex.
    const VertexId start = adjacency.begin()->first;
    VertexId prev = start;
    VertexId cur = adjacency.begin()->second[0];
    std::size_t steps = 1;
    while (cur != start) {
        const auto& nbrs = adjacency[cur];
        const VertexId next = nbrs[0] == prev ? nbrs[1] : nbrs[0];
        prev = cur;
        cur = next;
        if (++steps > adjacency.size()) {
            return false;
        }
    }
    return steps == adjacency.size();
}

}  // namespace

SurfaceComplex SurfaceComplex::build(std::vector<Face> faces)
{
    if (faces.empty()) {
        throw BadFaceError("face list is empty");
    }
    SurfaceComplex c;
    VertexId max_id = -1;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        for (auto v : face) {
            if (v < 0) {
                throw BadFaceError("face " + std::to_string(f) + " has a negative vertex id");
            }
            max_id = std::max(max_id, v);
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw BadFaceError("face " + std::to_string(f) + " repeats a vertex");
        }
    }
    // A repeated face covers each of its edges twice on the same side.
    std::map<Face, std::size_t> seen;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        Face key = faces[f];
        std::sort(key.begin(), key.end());
        auto [it, inserted] = seen.emplace(key, f);
        if (!inserted) {
            throw NonManifoldError("faces " + std::to_string(it->second) + " and " +
                                   std::to_string(f) + " span the same vertices; edges " +
                                   edge_name(Edge::canonical(key[0], key[1])) + ", " +
                                   edge_name(Edge::canonical(key[1], key[2])) + ", " +
                                   edge_name(Edge::canonical(key[0], key[2])) +
                                   " are not manifold");
        }
    }
    c.vertex_count_ = static_cast<std::size_t>(max_id) + 1;
    c.faces_ = std::move(faces);

    std::map<Edge, std::vector<std::size_t>> incidence;
    for (std::size_t f = 0; f < c.faces_.size(); ++f) {
        const auto& face = c.faces_[f];
        for (int k = 0; k < 3; ++k) {
            incidence[Edge::canonical(face[(k + 1) % 3], face[(k + 2) % 3])].push_back(f);
        }
    }
    for (const auto& [edge, inc] : incidence) {
        if (inc.size() != 2) {
            throw NonManifoldError("edge " + edge_name(edge) + " lies in " +
                                   std::to_string(inc.size()) + " faces (expected 2)");
        }
    }

    c.edges_.reserve(incidence.size());
    c.edge_faces_.reserve(incidence.size());
    for (const auto& [edge, inc] : incidence) {
        c.edge_lookup_.emplace(edge, c.edges_.size());
        c.edges_.push_back(edge);
        c.edge_faces_.push_back({inc[0], inc[1]});
    }

    c.face_edges_.resize(c.faces_.size());
    c.vertex_faces_.assign(c.vertex_count_, {});
    for (std::size_t f = 0; f < c.faces_.size(); ++f) {
        const auto& face = c.faces_[f];
        for (int k = 0; k < 3; ++k) {
            c.face_edges_[f][k] = c.edge_index(face[(k + 1) % 3], face[(k + 2) % 3]);
            c.vertex_faces_[static_cast<std::size_t>(face[k])].push_back(f);
        }
    }

    for (VertexId v = 0; v < static_cast<VertexId>(c.vertex_count_); ++v) {
        if (!link_is_single_cycle(c, v)) {
            throw DisconnectedLinkError("link of vertex " + std::to_string(v) +
                                        " is not a single cycle");
        }
    }
    return c;
}

std::size_t SurfaceComplex::edge_index(VertexId x, VertexId y) const
{
    auto it = edge_lookup_.find(Edge::canonical(x, y));
    if (it == edge_lookup_.end()) {
        throw std::out_of_range("no edge " + edge_name(Edge::canonical(x, y)));
    }
    return it->second;
}

bool SurfaceComplex::has_edge(VertexId x, VertexId y) const
{
    return edge_lookup_.count(Edge::canonical(x, y)) != 0;
}

VertexSubset::VertexSubset(const SurfaceComplex& complex, std::vector<VertexId> members)
    : mask_(complex.vertex_count(), false)
{
    for (auto v : members) {
        if (v < 0 || static_cast<std::size_t>(v) >= complex.vertex_count()) {
            throw std::invalid_argument("subset vertex " + std::to_string(v) + " out of range");
        }
        mask_[static_cast<std::size_t>(v)] = true;
    }
    for (std::size_t v = 0; v < mask_.size(); ++v) {
        if (mask_[v]) {
            members_.push_back(static_cast<VertexId>(v));
        }
    }
    if (members_.empty() || members_.size() == complex.vertex_count()) {
        throw std::invalid_argument("vertex subset must be nonempty and proper");
    }
}

int induced_euler(const SurfaceComplex& complex, const std::vector<bool>& mask)
{
    auto in = [&](VertexId v) { return mask[static_cast<std::size_t>(v)]; };
    int chi = static_cast<int>(std::count(mask.begin(), mask.end(), true));
    for (const auto& e : complex.edges()) {
        if (in(e.a) && in(e.b)) {
            --chi;
        }
    }
    for (const auto& f : complex.faces()) {
        if (in(f[0]) && in(f[1]) && in(f[2])) {
            ++chi;
        }
    }
    return chi;
}

int subcomplex_euler(const SurfaceComplex& complex, const VertexSubset& subset)
{
    return induced_euler(complex, subset.mask());
}

std::vector<LinkPair> link_pairs(const SurfaceComplex& complex, const VertexSubset& subset)
{
    std::vector<LinkPair> pairs;
    for (const auto& face : complex.faces()) {
        for (int k = 0; k < 3; ++k) {
            const VertexId v = face[k];
            const VertexId a = face[(k + 1) % 3];
            const VertexId b = face[(k + 2) % 3];
            if (subset.contains(v) && !subset.contains(a) && !subset.contains(b)) {
                pairs.push_back({Edge::canonical(a, b), v});
            }
        }
    }
    return pairs;
}

std::vector<VertexSubset> enumerate_subsets(const SurfaceComplex& complex, std::size_t max_size)
{
    const auto n = static_cast<int>(complex.vertex_count());
    const std::size_t cap = std::min<std::size_t>(max_size, complex.vertex_count() - 1);
    std::vector<VertexSubset> out;
    std::vector<VertexId> combo;
    // Lexicographic k-combinations for k = 1..cap.
    for (std::size_t k = 1; k <= cap; ++k) {
        combo.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            combo[i] = static_cast<VertexId>(i);
        }
        while (true) {
            out.emplace_back(complex, combo);
            int i = static_cast<int>(k) - 1;
            while (i >= 0 && combo[i] == n - static_cast<int>(k) + i) {
                --i;
            }
            if (i < 0) {
                break;
            }
            ++combo[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    return out;
}

}  // namespace cpflow
