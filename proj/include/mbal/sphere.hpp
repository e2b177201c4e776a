#pragma once

// Measures on the round sphere S^2 and the conformal centering problem, via
// the identification S^2 = P^1:
//   (sin t cos p, sin t sin p, cos t)  <->  [cos(t/2) : e^{ip} sin(t/2)].
// Under it the inclusion S^2 -> R^3 is the Bloch vector of P_z - Id/2, so the
// center of mass of a sphere measure equals bloch(momentum(nu)).

#include <optional>
#include <vector>

#include "mbal/balancer.hpp"

namespace mbal {

struct SphereAtom {
  Eigen::Vector3d point;
  double weight;
};

class SphereMeasure {
 public:
  /// Points must be unit within 1e-12, weights positive summing to 1 within
  /// 1e-6 (rescaled to 1). Throws InvalidMeasure.
  explicit SphereMeasure(std::vector<SphereAtom> atoms);

  const std::vector<SphereAtom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<SphereAtom> atoms_;
};

ProjectivePoint sphere_to_projective(const Eigen::Vector3d& x);
Eigen::Vector3d projective_to_sphere(const ProjectivePoint& p);

AtomicMeasure to_projective(const SphereMeasure& sm);
SphereMeasure to_sphere(const AtomicMeasure& nu);

Eigen::Vector3d center_of_mass(const SphereMeasure& sm);

/// (2 Re m01, -2 Im m01, m00 - m11) for a 2x2 Hermitian traceless m.
Eigen::Vector3d bloch_vector(const MomentumMatrix& m);

struct HerschResult {
  GroupElement mobius;  ///< acts on C^2; z -> (a z + b)/(c z + d) on w = z1/z0
  BalanceResult result;
  StabilityVerdict verdict;
  Eigen::Vector3d final_com;
  /// The atom of mass >= 1/2 when the measure is not stable.
  std::optional<Eigen::Vector3d> offending_atom;
};

/// Classifies the P^1 image and balances it; final_com is the center of mass
/// of the transported sphere measure. tol bounds |final_com| on convergence.
HerschResult hersch_balance(const SphereMeasure& sm, double tol = kDefaultBalanceTol,
                            int max_iter = kDefaultBalanceMaxIter);

}  // namespace mbal
