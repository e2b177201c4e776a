#include "mbal/random.hpp"

#include <cmath>
#include <numbers>

namespace mbal {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

ProjectivePoint random_point(Rng& rng, Eigen::Index n) {
  CVector z(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) z(k) = rng.complex_normal();
  return ProjectivePoint(std::move(z));
}

CMatrix random_unitary(Rng& rng, Eigen::Index dim) {
  CMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

CMatrix random_traceless_hermitian(Rng& rng, Eigen::Index dim) {
  CMatrix h(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) h(r, c) = rng.complex_normal();
  }
  h = 0.5 * (h + h.adjoint()).eval();
  h.diagonal().array() -= h.trace() / static_cast<double>(dim);
  const double norm = h.norm();
  return norm > 0.0 ? CMatrix(h / norm) : h;
}

CMatrix random_invertible(Rng& rng, Eigen::Index dim, double max_condition) {
  const CMatrix u = random_unitary(rng, dim);
  const CMatrix v = random_unitary(rng, dim);
  const double spread = std::log(std::max(max_condition, 1.0));
  RVector s(dim);
  for (Eigen::Index k = 0; k < dim; ++k) s(k) = std::exp(spread * (rng.uniform() - 0.5));
  return u * s.cast<Complex>().asDiagonal() * v;
}

AtomicMeasure random_measure(Rng& rng, Eigen::Index n, std::size_t m, bool equal_weights) {
  std::vector<Atom> atoms;
  std::vector<double> raw(m, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!equal_weights) raw[i] = rng.uniform(0.5, 1.5);
    total += raw[i];
  }
  for (std::size_t i = 0; i < m; ++i) atoms.push_back(Atom{random_point(rng, n), raw[i] / total});
  return AtomicMeasure(n, std::move(atoms));
}

Eigen::Vector3d random_sphere_point(Rng& rng) {
  Eigen::Vector3d x;
  do {
    x = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (x.norm() < 1e-8);
  return x / x.norm();
}

}  // namespace mbal
