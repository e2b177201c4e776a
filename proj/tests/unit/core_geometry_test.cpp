#include <doctest.h>

#include <cmath>

#include "mbal/core_geometry.hpp"
#include "mbal/random.hpp"

using namespace mbal;

namespace {

ProjectivePoint pt(std::initializer_list<Complex> z) {
  CVector v(static_cast<Eigen::Index>(z.size()));
  Eigen::Index k = 0;
  for (Complex c : z) v(k++) = c;
  return ProjectivePoint(v);
}

CMatrix diag(std::initializer_list<double> d) {
  RVector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (double x : d) v(k++) = x;
  return v.cast<Complex>().asDiagonal();
}

}  // namespace

TEST_CASE("projective points are normalized, phase fixed, and compared up to phase") {
  const ProjectivePoint p = pt({Complex(0, 3), Complex(4, 0)});
  CHECK(std::abs(p.coeffs().norm() - 1.0) <= 1e-14);
  CHECK(p.coeffs()(0).imag() == 0.0);
  CHECK(p.coeffs()(0).real() > 0.0);

  const ProjectivePoint q = pt({Complex(0, -6), Complex(-8, 0)});  // same line
  CHECK(p.approx_equal(q, 1e-14));
  CHECK(p.fs_distance(q) <= 1e-7);
  CHECK(!p.approx_equal(pt({1, 0}), 1e-6));

  // Constructing from already-normalized coefficients is the identity.
  const ProjectivePoint again(p.coeffs());
  CHECK(again.coeffs() == p.coeffs());

  CHECK_THROWS_AS(pt({0, 0}), Error);
}

TEST_CASE("momentum of a point") {
  const CMatrix m = momentum_of_point(pt({1, 0})).matrix();
  CHECK((m - diag({0.5, -0.5})).norm() <= 1e-15);

  CMatrix expected(2, 2);
  expected << 0.0, 0.5, 0.5, 0.0;
  CHECK((momentum_of_point(pt({1, 1})).matrix() - expected).norm() <= 1e-15);

  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const CMatrix r = momentum_of_point(random_point(rng, 3)).matrix();
    CHECK(std::abs(r.trace()) <= 1e-13);
    CHECK((r - r.adjoint()).norm() <= 1e-13);
  }
}

TEST_CASE("mu component") {
  const SpectralDirection d = spectral_decompose(diag({1, -1}));
  CHECK(mu_component(pt({1, 0}), d) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(mu_component(pt({1, 1}), d)) <= 1e-15);
  CHECK(mu_component(pt({1, 2}), d) == doctest::Approx(-0.6).epsilon(1e-15));
}

TEST_CASE("group action on points") {
  Rng rng(4);
  const ProjectivePoint p = random_point(rng, 2);
  CHECK(act_point(GroupElement::identity(3), p).approx_equal(p, 1e-15));

  const GroupElement g(diag({2, 0.5}));
  CHECK(act_point(g, pt({1, 1})).approx_equal(pt({4, 1}), 1e-14));

  const GroupElement k(random_unitary(rng, 3));
  const ProjectivePoint a = random_point(rng, 2), b = random_point(rng, 2);
  CHECK(act_point(k, a).overlap(act_point(k, b)) == doctest::Approx(a.overlap(b)).epsilon(1e-13));
}

TEST_CASE("group elements have unit determinant") {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const GroupElement g(random_invertible(rng, 4, 100.0));
    CHECK(std::abs(g.matrix().determinant() - 1.0) <= 1e-10);
    const GroupElement h = g * g.inverse();
    CHECK((h.matrix() - CMatrix::Identity(4, 4)).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(GroupElement(CMatrix::Zero(2, 2)), Error);
}

TEST_CASE("spectral decomposition") {
  SUBCASE("diag(1,-1)") {
    const SpectralDirection d = spectral_decompose(diag({1, -1}));
    REQUIRE(d.eigenvalues().size() == 2);
    CHECK(d.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(d.eigenvalues()[1] == doctest::Approx(1.0));
    CHECK((d.projectors()[0] - diag({0, 1})).norm() <= 1e-15);
    CHECK((d.projectors()[1] - diag({1, 0})).norm() <= 1e-15);
  }
  SUBCASE("repeated eigenvalues are clustered") {
    const SpectralDirection d = spectral_decompose(diag({1, 1, -2}));
    REQUIRE(d.eigenvalues().size() == 2);
    CHECK(d.eigenvalues()[0] == doctest::Approx(-2.0));
    CHECK(d.eigenvalues()[1] == doctest::Approx(1.0));
    CHECK(d.multiplicities() == std::vector<int>{1, 2});
  }
  SUBCASE("random directions reconstruct") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.bits() % 4);
      const CMatrix a = random_traceless_hermitian(rng, dim);
      const SpectralDirection d = spectral_decompose(a);
      CMatrix sum = CMatrix::Zero(dim, dim), recon = CMatrix::Zero(dim, dim);
      double trace = 0.0;
      const auto mult = d.multiplicities();
      for (std::size_t j = 0; j < d.eigenvalues().size(); ++j) {
        const CMatrix& p = d.projectors()[j];
        CHECK((p * p - p).norm() <= 1e-12);
        for (std::size_t l = 0; l < j; ++l) CHECK((p * d.projectors()[l]).norm() <= 1e-12);
        sum += p;
        recon += d.eigenvalues()[j] * p;
        trace += d.eigenvalues()[j] * mult[j];
      }
      CHECK((sum - CMatrix::Identity(dim, dim)).norm() <= 1e-12);
      CHECK((recon - a).norm() <= 1e-12);
      CHECK(std::abs(trace) <= 1e-12);
    }
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(spectral_decompose(CMatrix::Zero(2, 2)), Error);
    CMatrix skew(2, 2);
    skew << 0.0, 1.0, -1.0, 0.0;
    CHECK_THROWS_AS(spectral_decompose(skew), Error);
    CHECK_THROWS_AS(spectral_decompose(diag({1, 1})), Error);
    try {
      spectral_decompose(CMatrix::Zero(2, 2));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ZeroDirection);
    }
  }
}

TEST_CASE("flow limits") {
  const SpectralDirection d = spectral_decompose(diag({1, -1}));
  const FlowLimit a = flow_limit(pt({1, 1}), d);
  CHECK(a.stratum_index == 1);
  CHECK(a.limit.approx_equal(pt({1, 0}), 1e-14));

  const FlowLimit b = flow_limit(pt({0, 1}), d);
  CHECK(b.stratum_index == 0);
  CHECK(b.limit.approx_equal(pt({0, 1}), 1e-14));

  // Oracle: normalize exp(tA) z at a large t.
  const CMatrix flowed = hermitian_exp(diag({1, -1}), 30.0) * pt({1, 1}).coeffs();
  CHECK(ProjectivePoint(flowed).approx_equal(a.limit, 1e-14));

  Rng rng(7);
  const SpectralDirection r = spectral_decompose(random_traceless_hermitian(rng, 4));
  for (int i = 0; i < 10; ++i) CHECK(flow_limit(random_point(rng, 3), r).stratum_index == r.top_index());
}

TEST_CASE("hermitian exp and sqrt") {
  Rng rng(8);
  const CMatrix a = random_traceless_hermitian(rng, 3);
  const CMatrix e = hermitian_exp(a, 0.7);
  CHECK((hermitian_exp(a, -0.7) * e - CMatrix::Identity(3, 3)).norm() <= 1e-13);
  const CMatrix s = e.adjoint() * e;
  const CMatrix r = hermitian_sqrt(s);
  CHECK((r * r - s).norm() <= 1e-12);
  CHECK((r - e).norm() <= 1e-12);  // e is itself positive definite
}
