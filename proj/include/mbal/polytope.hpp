#pragma once

// Small dense convex-hull utilities for momentum polytopes.

#include <vector>

#include "mbal/types.hpp"

namespace mbal {

/// Lawson-Hanson non-negative least squares: argmin |A x - b| subject to x >= 0.
RVector nnls(const RMatrix& a, const RVector& b, double tol = 1e-12);

/// Whether q is a convex combination of the points (within tol in the
/// residual of the barycentric system).
bool in_convex_hull(const std::vector<RVector>& points, const RVector& q, double tol = 1e-9);

/// Indices of the points that are extreme points of their convex hull, after
/// dropping duplicates (closer than 1e-12). Order follows the input.
std::vector<std::size_t> hull_vertices(const std::vector<RVector>& points);

/// Average of the distinct vertices of the convex hull; it lies in the
/// relative interior of the hull. Throws DegenerateHull if all points
/// coincide and InvalidArgument for an empty list.
RVector polytope_centroid_shift(const std::vector<RVector>& vertex_images);

}  // namespace mbal
