#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mbal/balancer.hpp"
#include "mbal/random.hpp"
#include "support.hpp"

using namespace mbal;
using namespace mbal::testing;

namespace {

ProjectivePoint pt(std::initializer_list<Complex> z) {
  CVector v(static_cast<Eigen::Index>(z.size()));
  Eigen::Index k = 0;
  for (Complex c : z) v(k++) = c;
  return ProjectivePoint(v);
}

const double third = 1.0 / 3.0;

const AtomicMeasure& three_points() {
  static const AtomicMeasure nu(1, {{pt({1, 0}), third}, {pt({0, 1}), third}, {pt({1, 1}), third}});
  return nu;
}

AtomicMeasure basis_measure(Eigen::Index dim) {
  std::vector<Atom> atoms;
  for (Eigen::Index k = 0; k < dim; ++k) atoms.push_back({ProjectivePoint(CVector::Unit(dim, k)), 1.0 / dim});
  return AtomicMeasure(dim - 1, atoms);
}

}  // namespace

TEST_CASE("already balanced input stops at iteration 0") {
  for (auto method : {BalanceMethod::FixedPoint, BalanceMethod::GeodesicDescent}) {
    BalanceOptions options;
    options.method = method;
    const BalanceResult r = balance(basis_measure(4), options);
    CHECK(r.verdict == BalanceVerdict::Converged);
    CHECK(r.iterations == 0);
    CHECK((r.g.matrix() - CMatrix::Identity(4, 4)).norm() <= 1e-15);
  }
}

TEST_CASE("three points on P^1 balance") {
  for (auto method : {BalanceMethod::FixedPoint, BalanceMethod::GeodesicDescent}) {
    BalanceOptions options;
    options.method = method;
    const BalanceResult r = balance(three_points(), options);
    CHECK(r.verdict == BalanceVerdict::Converged);
    CHECK(r.residual <= 1e-10);
    CHECK(independent_residual(three_points(), r.g.matrix()) <= 1e-10);
    CHECK(static_cast<int>(r.trace.size()) == r.iterations + 1);
  }
}

TEST_CASE("unstable input diverges with a certificate") {
  SUBCASE("Dirac") {
    const AtomicMeasure dirac(2, {{pt({1, 2, 0}), 1.0}});
    const BalanceResult r = balance(dirac);
    CHECK(r.verdict == BalanceVerdict::DivergedWithCertificate);
    REQUIRE(r.certificate);
    CHECK(r.certificate->basis.cols() == 1);
    CHECK(ProjectivePoint(r.certificate->basis.col(0)).approx_equal(pt({1, 2, 0}), 1e-12));
  }
  SUBCASE("heavy atom among generic ones") {
    Rng rng(41);
    for (auto method : {BalanceMethod::FixedPoint, BalanceMethod::GeodesicDescent}) {
      const AtomicMeasure nu = measure_with_heavy_atom(rng, 2, 4, 0.6);
      BalanceOptions options;
      options.method = method;
      options.max_iter = 20000;
      const BalanceResult r = balance(nu, options);
      CHECK(r.verdict == BalanceVerdict::DivergedWithCertificate);
      REQUIRE(r.certificate);
      CHECK(r.certificate->mass == doctest::Approx(0.6));
      CHECK(r.certificate->basis.cols() == 1);
    }
  }
}

TEST_CASE("descent trace: Kempf-Ness values do not increase") {
  Rng rng(42);
  const AtomicMeasure nu = random_measure(rng, 3, 9);
  BalanceOptions options;
  options.method = BalanceMethod::GeodesicDescent;
  const BalanceResult r = balance(nu, options);
  CHECK(r.verdict == BalanceVerdict::Converged);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].kempf_ness <= r.trace[i - 1].kempf_ness + 1e-14);
}

TEST_CASE("both methods reach the same balanced metric") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.bits() % 3);
    const AtomicMeasure nu = random_measure(rng, n, static_cast<std::size_t>(2 * n + 4), false);
    BalanceOptions fixed, descent;
    descent.method = BalanceMethod::GeodesicDescent;
    const BalanceResult a = balance(nu, fixed), b = balance(nu, descent);
    REQUIRE(a.verdict == BalanceVerdict::Converged);
    REQUIRE(b.verdict == BalanceVerdict::Converged);
    const CMatrix sa = a.g.matrix().adjoint() * a.g.matrix();
    const CMatrix sb = b.g.matrix().adjoint() * b.g.matrix();
    CHECK((sa - sb).norm() <= 1e-7);
  }
}

TEST_CASE("fixed point and stationarity agree") {
  Rng rng(44);
  const AtomicMeasure nu = random_measure(rng, 2, 7);
  const BalanceResult r = balance(nu);
  const CMatrix s = r.g.matrix().adjoint() * r.g.matrix();
  // Tyler map at S: c [sum w zz^*/(z^* S z)]^{-1} with det 1.
  CMatrix m = CMatrix::Zero(3, 3);
  for (const auto& a : nu.atoms()) {
    const CVector& z = a.point.coeffs();
    m += a.weight * z * z.adjoint() / z.dot(s * z).real();
  }
  CMatrix t = m.inverse();
  t /= std::pow(std::abs(t.determinant()), 1.0 / 3.0);
  CHECK((t - s).norm() <= 1e-9);
  CHECK(momentum(pushforward(r.g, nu)).norm() <= 1e-9);
}

TEST_CASE("general targets") {
  const CMatrix rho = (CMatrix(2, 2) << 0.7, 0.0, 0.0, 0.3).finished();
  const BalanceResult r = solve_target(three_points(), rho);
  CHECK(r.verdict == BalanceVerdict::Converged);
  CHECK(independent_residual(three_points(), r.g.matrix(), rho) <= 1e-10);

  // The centered target reproduces plain balancing.
  const BalanceResult centered = solve_target(three_points(), CMatrix::Identity(2, 2) / 2.0);
  CHECK(centered.verdict == BalanceVerdict::Converged);
  CHECK(momentum(pushforward(centered.g, three_points())).norm() <= 2e-10);

  CHECK_THROWS_AS(solve_target(three_points(), (CMatrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished()), Error);
  CHECK_THROWS_AS(solve_target(three_points(), (CMatrix(2, 2) << 0.5, 0.0, 0.0, 0.6).finished()), Error);
  CHECK_THROWS_AS(solve_target(AtomicMeasure(1, {{pt({1, 0}), 0.5}, {pt({0, 1}), 0.5}}), rho), Error);
  try {
    solve_target(three_points(), (CMatrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveTarget);
  }
}

TEST_CASE("traceless Hermitian basis is orthonormal") {
  for (Eigen::Index dim = 2; dim <= 5; ++dim) {
    const auto basis = traceless_hermitian_basis(dim);
    REQUIRE(static_cast<Eigen::Index>(basis.size()) == dim * dim - 1);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK((basis[i] - basis[i].adjoint()).norm() <= 1e-15);
      CHECK(std::abs(basis[i].trace()) <= 1e-15);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double ip = (basis[i] * basis[j]).trace().real();
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-14);
      }
    }
  }
}

TEST_CASE("Gram operator") {
  // Atoms fixed by the torus direction: the fundamental field vanishes.
  const SpectralDirection z = spectral_decompose((CMatrix(2, 2) << 1.0, 0.0, 0.0, -1.0).finished());
  const RMatrix g0 = gram_operator(basis_measure(2), std::vector<SpectralDirection>{z});
  CHECK(std::abs(g0(0, 0)) <= 1e-15);

  Rng rng(45);
  const AtomicMeasure nu = random_measure(rng, 2, 5, false);
  const RMatrix g = gram_operator(nu, traceless_hermitian_basis(3));
  CHECK((g - g.transpose()).norm() <= 1e-14);
  CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(g).eigenvalues().minCoeff() >= -1e-14);
}

TEST_CASE("trace CSV") {
  const std::string csv = trace_to_csv({{0, 0.5, 0.0}, {1, 0.25, -0.125}});
  CHECK(csv == "iteration,residual,kempf_ness\n0,0.5,0\n1,0.25,-0.125\n");
}

TEST_CASE("determinism") {
  Rng rng(46);
  const AtomicMeasure nu = random_measure(rng, 3, 11);
  const BalanceResult a = balance(nu), b = balance(nu);
  CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
  CHECK(a.g.matrix() == b.g.matrix());
}
