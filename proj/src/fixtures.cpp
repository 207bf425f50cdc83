#include "cpflow/fixtures.hpp"

#include <stdexcept>

namespace cpflow::fixtures
{

SurfaceComplex tetrahedron()
{
    return SurfaceComplex::build({{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

SurfaceComplex octahedron()
{
    // 0 and 1 are the poles, 2..5 the equator.
    return SurfaceComplex::build({{0, 2, 3},
                                  {0, 3, 4},
                                  {0, 4, 5},
                                  {0, 5, 2},
                                  {1, 3, 2},
                                  {1, 4, 3},
                                  {1, 5, 4},
                                  {1, 2, 5}});
}

SurfaceComplex icosahedron()
{
    return SurfaceComplex::build({{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}});
}

namespace
{

std::vector<Face> torus_faces(int rows, int cols)
{
    if (rows < 3 || cols < 3) {
        throw std::invalid_argument("torus grid needs at least 3 x 3 vertices");
    }
    auto v = [&](int i, int j) { return ((i + rows) % rows) * cols + (j + cols) % cols; };
    std::vector<Face> faces;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            faces.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
            faces.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
        }
    }
    return faces;
}

}  // namespace

SurfaceComplex torus(int rows, int cols)
{
    return SurfaceComplex::build(torus_faces(rows, cols));
}

SurfaceComplex genus_two(int rows, int cols)
{
    const std::vector<Face> a = torus_faces(rows, cols);
    const int n = rows * cols;
    // Face 0 of each torus is (0, cols, cols + 1). Drop it from both copies and
    // glue along its boundary; the second copy is reversed so the sum stays
    // orientable. Non-cut vertices of the second copy are renumbered densely.
    const Face cut = a.front();
    auto relabel = [&](int w) {
        if (w == cut[0] || w == cut[1] || w == cut[2]) {
            return w;
        }
        return n + w - ((w > cut[0]) + (w > cut[1]) + (w > cut[2]));
    };
    std::vector<Face> faces(a.begin() + 1, a.end());
    for (std::size_t f = 1; f < a.size(); ++f) {
        faces.push_back({relabel(a[f][0]), relabel(a[f][2]), relabel(a[f][1])});
    }
    return SurfaceComplex::build(std::move(faces));
}

}  // namespace cpflow::fixtures
