#include "mbal/polytope.hpp"

#include <cmath>
#include <limits>

namespace mbal {

RVector nnls(const RMatrix& a, const RVector& b, double tol) {
  const Eigen::Index cols = a.cols();
  RVector x = RVector::Zero(cols);
  std::vector<bool> passive(static_cast<std::size_t>(cols), false);

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    RMatrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const RVector sol = sub.completeOrthogonalDecomposition().solve(b);
    RVector full = RVector::Zero(cols);
    for (std::size_t k = 0; k < idx.size(); ++k) full(idx[k]) = sol(static_cast<Eigen::Index>(k));
    return full;
  };

  const int max_outer = static_cast<int>(3 * cols + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const RVector w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner <= cols; ++inner) {
      const RVector s = solve_passive();
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - s(j)));
        }
      }
      if (!std::isfinite(alpha)) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  return x;
}

bool in_convex_hull(const std::vector<RVector>& points, const RVector& q, double tol) {
  if (points.empty()) return false;
  const Eigen::Index dim = q.size();
  RMatrix a(dim + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dim) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
    a.col(static_cast<Eigen::Index>(k)) << points[k], 1.0;
  }
  RVector b(dim + 1);
  b << q, 1.0;
  const RVector x = nnls(a, b);
  return (a * x - b).norm() <= tol;
}

std::vector<std::size_t> hull_vertices(const std::vector<RVector>& points) {
  std::vector<std::size_t> distinct;
  for (std::size_t k = 0; k < points.size(); ++k) {
    bool seen = false;
    for (std::size_t j : distinct) {
      if ((points[j] - points[k]).norm() <= 1e-12) {
        seen = true;
        break;
      }
    }
    if (!seen) distinct.push_back(k);
  }
  std::vector<std::size_t> vertices;
  for (std::size_t k : distinct) {
    std::vector<RVector> others;
    for (std::size_t j : distinct) {
      if (j != k) others.push_back(points[j]);
    }
    if (!in_convex_hull(others, points[k])) vertices.push_back(k);
  }
  return vertices;
}

RVector polytope_centroid_shift(const std::vector<RVector>& vertex_images) {
  if (vertex_images.empty()) throw Error(ErrorKind::InvalidArgument, "no vertices given");
  const std::vector<std::size_t> vertices = hull_vertices(vertex_images);
  if (vertices.size() < 2) throw Error(ErrorKind::DegenerateHull, "all vertices coincide");
  RVector sum = RVector::Zero(vertex_images.front().size());
  for (std::size_t k : vertices) sum += vertex_images[k];
  return sum / static_cast<double>(vertices.size());
}

}  // namespace mbal
