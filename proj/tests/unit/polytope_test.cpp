#include <doctest.h>

#include "mbal/measure.hpp"
#include "mbal/polytope.hpp"
#include "mbal/random.hpp"

using namespace mbal;

namespace {

RVector v2(double a, double b) { return (RVector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("nonnegative least squares") {
  RMatrix a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  const RVector x = nnls(a, (RVector(3) << 1, -1, 0).finished());
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x(1) == 0.0);
  CHECK(x(0) == doctest::Approx(0.5));
}

TEST_CASE("convex hull membership") {
  const std::vector<RVector> triangle = {v2(0, 0), v2(1, 0), v2(0, 1)};
  CHECK(in_convex_hull(triangle, v2(0.2, 0.2)));
  CHECK(in_convex_hull(triangle, v2(0.5, 0.5)));
  CHECK(!in_convex_hull(triangle, v2(0.6, 0.6)));
  CHECK(!in_convex_hull(triangle, v2(-0.1, 0.3)));

  const std::vector<RVector> square = {v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1), v2(0.5, 0.5)};
  const auto vertices = hull_vertices(square);
  CHECK(vertices == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("centroid shift") {
  const RVector a = polytope_centroid_shift({v2(0.5, -0.5), v2(-0.5, 0.5)});
  CHECK(a.norm() <= 1e-15);
  const RVector b = polytope_centroid_shift({v2(0, 0), v2(1, 0), v2(0, 1)});
  CHECK(b(0) == doctest::Approx(1.0 / 3));
  CHECK(b(1) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(polytope_centroid_shift({v2(1, 1)}), Error);
}

TEST_CASE("diagonal momenta of P^2 points lie in the shifted simplex") {
  // The torus image of P^n is the simplex of e_j - 1/(n+1); random points
  // must land inside its hull, and the vertices shifted by their centroid
  // contain the origin.
  Rng rng(61);
  std::vector<RVector> vertices;
  for (int j = 0; j < 3; ++j) {
    RVector e = RVector::Constant(3, -1.0 / 3);
    e(j) += 1.0;
    vertices.push_back(e);
  }
  const RVector center = polytope_centroid_shift(vertices);
  CHECK(center.norm() <= 1e-15);
  std::vector<RVector> shifted;
  for (const auto& v : vertices) shifted.push_back(v - center);
  CHECK(in_convex_hull(shifted, RVector::Zero(3)));
  for (int i = 0; i < 20; ++i) {
    const CMatrix m = momentum_of_point(random_point(rng, 2)).matrix();
    CHECK(in_convex_hull(vertices, m.diagonal().real()));
  }
}

TEST_CASE("interior densities lie in the hull of rank-one projectors") {
  Rng rng(62);
  const auto flatten = [](const CMatrix& m) {
    RVector out(2 * m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      out(2 * i) = m(i).real();
      out(2 * i + 1) = m(i).imag();
    }
    return out;
  };
  for (Eigen::Index n = 1; n <= 2; ++n) {
    const Eigen::Index dim = n + 1;
    std::vector<RVector> projectors;
    for (int i = 0; i < (n == 1 ? 200 : 1500); ++i) {
      const CVector z = random_point(rng, n).coeffs();
      projectors.push_back(flatten(z * z.adjoint()));
    }
    for (int i = 0; i < 5; ++i) {
      RVector eig(dim);
      for (Eigen::Index k = 0; k < dim; ++k) eig(k) = rng.uniform(0.5, 1.0);
      eig /= eig.sum();
      const CMatrix u = random_unitary(rng, dim);
      const CMatrix rho = u * eig.cast<Complex>().asDiagonal() * u.adjoint();
      CHECK(in_convex_hull(projectors, flatten(rho), 1e-7));
    }
    // Trace 2 is outside.
    CHECK(!in_convex_hull(projectors, flatten(2.0 * CMatrix::Identity(dim, dim) / static_cast<double>(dim)), 1e-7));
  }
}
