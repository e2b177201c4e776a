#include "mbal/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mbal {

SphereMeasure::SphereMeasure(std::vector<SphereAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorKind::InvalidMeasure, "sphere measure has no atoms");
  double total = 0.0;
  for (const auto& atom : atoms_) {
    if (!(std::abs(atom.point.norm() - 1.0) <= 1e-12)) {
      throw Error(ErrorKind::InvalidMeasure, "sphere atoms must be unit vectors");
    }
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw Error(ErrorKind::InvalidMeasure, "atom weights must be positive and finite");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw Error(ErrorKind::InvalidMeasure, "weights sum to " + std::to_string(total) + ", not 1");
  }
  if (std::abs(total - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    for (auto& atom : atoms_) atom.weight /= total;
  }
}

ProjectivePoint sphere_to_projective(const Eigen::Vector3d& x) {
  // cos(t/2) = sqrt((1 + z)/2), sin(t/2) = sqrt((1 - z)/2), e^{ip} = (x + iy)/sin t.
  const double z = std::clamp(x.z(), -1.0, 1.0);
  const double c = std::sqrt(0.5 * (1.0 + z));
  const double s = std::sqrt(0.5 * (1.0 - z));
  const double rho = std::hypot(x.x(), x.y());
  const Complex phase = rho > 0.0 ? Complex(x.x(), x.y()) / rho : Complex(1.0, 0.0);
  CVector v(2);
  v << c, phase * s;
  return ProjectivePoint(std::move(v));
}

Eigen::Vector3d projective_to_sphere(const ProjectivePoint& p) {
  if (p.ambient_dim() != 2) throw Error(ErrorKind::InvalidArgument, "expected a point of P^1");
  return bloch_vector(momentum_of_point(p));
}

AtomicMeasure to_projective(const SphereMeasure& sm) {
  std::vector<Atom> atoms;
  atoms.reserve(sm.atoms().size());
  for (const auto& atom : sm.atoms()) atoms.push_back(Atom{sphere_to_projective(atom.point), atom.weight});
  return AtomicMeasure(1, std::move(atoms));
}

SphereMeasure to_sphere(const AtomicMeasure& nu) {
  if (nu.dim() != 1) throw Error(ErrorKind::InvalidArgument, "expected a measure on P^1");
  std::vector<SphereAtom> atoms;
  atoms.reserve(nu.size());
  for (const auto& atom : nu.atoms()) {
    Eigen::Vector3d x = projective_to_sphere(atom.point);
    x /= x.norm();
    atoms.push_back(SphereAtom{x, atom.weight});
  }
  return SphereMeasure(std::move(atoms));
}

Eigen::Vector3d center_of_mass(const SphereMeasure& sm) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& atom : sm.atoms()) sum += atom.weight * atom.point;
  return sum;
}

Eigen::Vector3d bloch_vector(const MomentumMatrix& m) {
  const CMatrix& a = m.matrix();
  if (a.rows() != 2 || a.cols() != 2) throw Error(ErrorKind::InvalidArgument, "expected a 2x2 momentum");
  return {2.0 * a(0, 1).real(), -2.0 * a(0, 1).imag(), a(0, 0).real() - a(1, 1).real()};
}

HerschResult hersch_balance(const SphereMeasure& sm, double tol, int max_iter) {
  const AtomicMeasure nu = to_projective(sm);
  StabilityVerdict verdict = classify(nu);

  // |com| = sqrt(2) |momentum|_F on P^1, and tol is meant for the center of mass.
  BalanceOptions options;
  options.tol = tol / std::sqrt(2.0);
  options.max_iter = max_iter;
  BalanceResult result = balance(nu, options);

  std::optional<Eigen::Vector3d> offending;
  if (verdict.kind != StabilityKind::Stable && verdict.certificate) {
    const CMatrix& basis = verdict.certificate->basis;
    offending = projective_to_sphere(ProjectivePoint(basis.col(0)));
    if (result.verdict == BalanceVerdict::DivergedWithCertificate) result.certificate = verdict.certificate;
  }

  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  for (const auto& atom : nu.atoms()) {
    com += atom.weight * projective_to_sphere(act_point(result.g, atom.point));
  }
  return HerschResult{result.g, std::move(result), std::move(verdict), com, offending};
}

}  // namespace mbal
