#include <doctest.h>

#include <cmath>

#include "mbal/random.hpp"
#include "mbal/weights.hpp"
#include "support.hpp"

using namespace mbal;

namespace {

ProjectivePoint pt(std::initializer_list<Complex> z) {
  CVector v(static_cast<Eigen::Index>(z.size()));
  Eigen::Index k = 0;
  for (Complex c : z) v(k++) = c;
  return ProjectivePoint(v);
}

const double third = 1.0 / 3.0;

SpectralDirection z_direction(double sign = 1.0) {
  return spectral_decompose((CMatrix(2, 2) << sign, 0.0, 0.0, -sign).finished());
}

const AtomicMeasure& three_points() {
  static const AtomicMeasure nu(1, {{pt({1, 0}), third}, {pt({0, 1}), third}, {pt({1, 1}), third}});
  return nu;
}

}  // namespace

TEST_CASE("unstable partition") {
  const WeightReport r = unstable_partition(three_points(), z_direction());
  REQUIRE(r.strata.size() == 2);
  CHECK(r.strata[0].critical_value == doctest::Approx(-1.0));
  CHECK(r.strata[0].mass == doctest::Approx(third));
  CHECK(r.strata[1].mass == doctest::Approx(2 * third));

  const WeightReport dirac = unstable_partition(AtomicMeasure(1, {{pt({1, 0}), 1.0}}), z_direction());
  CHECK(dirac.strata[0].mass == 0.0);
  CHECK(dirac.strata[1].mass == 1.0);
}

TEST_CASE("maximal weight") {
  CHECK(maximal_weight(three_points(), z_direction()).lambda == doctest::Approx(third).epsilon(1e-14));
  CHECK(maximal_weight(AtomicMeasure(1, {{pt({1, 0}), 1.0}}), z_direction(-1.0)).lambda ==
        doctest::Approx(-1.0).epsilon(1e-15));

  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.bits() % 4);
    const AtomicMeasure nu = random_measure(rng, n, 1 + rng.bits() % 7, false);
    const SpectralDirection d = spectral_decompose(random_traceless_hermitian(rng, n + 1));
    const WeightReport r = maximal_weight(nu, d);
    double total = 0.0, lambda = 0.0;
    for (const auto& s : r.strata) {
      CHECK(s.mass >= 0.0);
      total += s.mass;
      lambda += s.critical_value * s.mass;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK(std::abs(lambda - r.lambda) <= 1e-12);
    // Generic atoms lie in the open stratum: lambda is the top eigenvalue.
    CHECK(std::abs(r.lambda - d.eigenvalues().back()) <= 1e-12);
  }
}

TEST_CASE("flow oracle") {
  CHECK(std::abs(lambda_via_flow(three_points(), z_direction(), 40.0) - third) <= 1e-6);

  Rng rng(22);
  const AtomicMeasure nu = random_measure(rng, 2, 5, false);
  const CMatrix a = random_traceless_hermitian(rng, 3);
  const SpectralDirection d = spectral_decompose(a);
  CHECK(lambda_via_flow(nu, d, 0.0) == doctest::Approx((momentum(nu).matrix() * a).trace().real()).epsilon(1e-13));

  // Nondecreasing in t: it is the derivative of a convex function.
  double last = -1e300;
  for (double t = 0.0; t <= 20.0; t += 0.5) {
    const double v = lambda_via_flow(nu, d, t);
    CHECK(v >= last - 1e-13);
    last = v;
  }

  // An atom fixed by the flow gives a constant.
  const AtomicMeasure fixed(1, {{pt({0, 1}), 1.0}});
  CHECK(lambda_via_flow(fixed, z_direction(), 0.0) == lambda_via_flow(fixed, z_direction(), 35.0));

  CHECK_THROWS_AS(lambda_via_flow(nu, d, -1.0), Error);
}

TEST_CASE("destabilizing direction") {
  const SpectralDirection d = destabilizing_direction({pt({1, 0})}, 1);
  REQUIRE(d.eigenvalues().size() == 2);
  CHECK(d.eigenvalues()[0] == doctest::Approx(-1.0));
  CHECK(d.eigenvalues()[1] == doctest::Approx(1.0));
  CHECK((d.projectors()[0] - (CMatrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished()).norm() <= 1e-14);
  CHECK(maximal_weight(AtomicMeasure(1, {{pt({1, 0}), 1.0}}), d).lambda == doctest::Approx(-1.0));

  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.bits() % 3);
    const std::size_t k = 1 + rng.bits() % static_cast<std::uint64_t>(n);
    std::vector<ProjectivePoint> span;
    for (std::size_t i = 0; i < k; ++i) span.push_back(random_point(rng, n));
    const SpectralDirection e = destabilizing_direction(span, n);
    CHECK(std::abs(e.matrix().trace()) <= 1e-12);
    const double dd = static_cast<double>(k) - 1.0;
    CHECK(e.eigenvalues().front() == doctest::Approx(dd - static_cast<double>(n)));
    CHECK(e.eigenvalues().back() == doctest::Approx(dd + 1.0));
    // The span points lie in the bottom eigenspace.
    for (const auto& p : span) CHECK(mu_component(p, e) == doctest::Approx(dd - static_cast<double>(n)));
  }

  CHECK_THROWS_AS(destabilizing_direction(std::vector<ProjectivePoint>{}, 1), Error);
  CHECK_THROWS_AS(destabilizing_direction({pt({1, 0}), pt({0, 1})}, 1), Error);
}

TEST_CASE("orthonormal span drops dependent columns") {
  CMatrix z(3, 3);
  z << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0;
  const CMatrix q = orthonormal_span(z);
  CHECK(q.cols() == 2);
  CHECK((q.adjoint() * q - CMatrix::Identity(2, 2)).norm() <= 1e-14);
}
