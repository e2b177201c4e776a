#pragma once

// Independent recomputations and structured random inputs shared by the unit
// tests and the acceptance binary. Nothing here calls into the balancing code.

#include <cmath>
#include <vector>

#include "mbal/random.hpp"

namespace mbal::testing {

/// sum_i w_i (g z_i)(g z_i)^* / |g z_i|^2 computed from raw coefficients.
inline CMatrix transported_density(const AtomicMeasure& nu, const CMatrix& g) {
  const Eigen::Index dim = nu.ambient_dim();
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const auto& atom : nu.atoms()) {
    const CVector v = g * atom.point.coeffs();
    sum += atom.weight * (v * v.adjoint()) / v.squaredNorm();
  }
  return sum;
}

/// |sum_i w_i P_{g z_i} - rho|_F, rho defaulting to Id/(n+1).
inline double independent_residual(const AtomicMeasure& nu, const CMatrix& g) {
  const Eigen::Index dim = nu.ambient_dim();
  const CMatrix target = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return (transported_density(nu, g) - target).norm();
}

inline double independent_residual(const AtomicMeasure& nu, const CMatrix& g, const CMatrix& rho) {
  return (transported_density(nu, g) - rho).norm();
}

/// U diag(values) U^* with a Haar U.
inline CMatrix conjugated_diagonal(Rng& rng, const RVector& values) {
  const CMatrix u = random_unitary(rng, values.size());
  return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

/// Traceless Hermitian matrix with a prescribed spectrum shifted to trace zero.
inline CMatrix direction_with_spectrum(Rng& rng, RVector values) {
  values.array() -= values.mean();
  return conjugated_diagonal(rng, values);
}

/// Point at Fubini-Study distance delta from p, in a random direction.
inline ProjectivePoint fs_perturb(Rng& rng, const ProjectivePoint& p, double delta) {
  const CVector& z = p.coeffs();
  CVector u(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) u(k) = rng.complex_normal();
  u -= z * z.dot(u);
  u.normalize();
  return ProjectivePoint(std::cos(delta) * z + std::sin(delta) * u);
}

/// Equal-weight measure with `heavy` copies-worth of mass on a single extra
/// point, making that point carry mass heavy_mass.
inline AtomicMeasure measure_with_heavy_atom(Rng& rng, Eigen::Index n, std::size_t light, double heavy_mass) {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{random_point(rng, n), heavy_mass});
  for (std::size_t i = 0; i < light; ++i) {
    atoms.push_back(Atom{random_point(rng, n), (1.0 - heavy_mass) / static_cast<double>(light)});
  }
  return AtomicMeasure(n, std::move(atoms));
}

}  // namespace mbal::testing
