#pragma once

#include "cpflow/complex.hpp"

// Standard closed triangulations used by tests and examples.
namespace cpflow::fixtures
{

SurfaceComplex tetrahedron();
SurfaceComplex octahedron();
SurfaceComplex icosahedron();

/** rows x cols grid on the torus, each square split along its diagonal (rows, cols >= 3). */
SurfaceComplex torus(int rows = 3, int cols = 3);

/**
 * Connected sum of two rows x cols tori along one face each: genus 2,
 * chi = -2, 2 rows cols - 3 vertices (15 for the default 3 x 3 grids).
 */
SurfaceComplex genus_two(int rows = 3, int cols = 3);

}  // namespace cpflow::fixtures
