#include "mbal/measure.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mbal/parallel.hpp"

namespace mbal {

AtomicMeasure::AtomicMeasure(Eigen::Index n, std::vector<Atom> atoms, double merge_tol) : n_(n) {
  if (n < 0) throw Error(ErrorKind::InvalidMeasure, "negative dimension");
  if (atoms.empty()) throw Error(ErrorKind::InvalidMeasure, "measure has no atoms");

  double total = 0.0;
  for (const auto& atom : atoms) {
    if (atom.point.ambient_dim() != n + 1) {
      throw Error(ErrorKind::InvalidMeasure,
                  "atom has " + std::to_string(atom.point.ambient_dim()) +
                      " coordinates, expected " + std::to_string(n + 1));
    }
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw Error(ErrorKind::InvalidMeasure, "atom weights must be positive and finite");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw Error(ErrorKind::InvalidMeasure, "weights sum to " + std::to_string(total) + ", not 1");
  }

  atoms_.reserve(atoms.size());
  for (auto& atom : atoms) {
    bool merged = false;
    for (auto& kept : atoms_) {
      if (kept.point.approx_equal(atom.point, merge_tol)) {
        kept.weight += atom.weight;
        merged = true;
        break;
      }
    }
    if (!merged) atoms_.push_back(std::move(atom));
  }

  const double sum = pairwise_sum<double>(atoms_.size(), [&](std::size_t i) { return atoms_[i].weight; }, 0.0);
  if (std::abs(sum - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    for (auto& atom : atoms_) atom.weight /= sum;
  }
}

CMatrix AtomicMeasure::point_matrix() const {
  CMatrix z(ambient_dim(), static_cast<Eigen::Index>(atoms_.size()));
  for (std::size_t i = 0; i < atoms_.size(); ++i) z.col(static_cast<Eigen::Index>(i)) = atoms_[i].point.coeffs();
  return z;
}

AtomicMeasure pushforward(const GroupElement& g, const AtomicMeasure& nu) {
  if (g.ambient_dim() != nu.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  std::vector<Atom> moved;
  moved.reserve(nu.size());
  for (const auto& atom : nu.atoms()) moved.push_back(Atom{act_point(g, atom.point), atom.weight});
  return AtomicMeasure(nu.dim(), std::move(moved));
}

MomentumMatrix momentum(const AtomicMeasure& nu) {
  const auto dim = nu.ambient_dim();
  const auto& atoms = nu.atoms();
  CMatrix sum = pairwise_sum<CMatrix>(
      atoms.size(),
      [&](std::size_t i) -> CMatrix {
        const CVector& z = atoms[i].point.coeffs();
        return atoms[i].weight * (z * z.adjoint());
      },
      CMatrix::Zero(dim, dim));
  sum.diagonal().array() -= 1.0 / static_cast<double>(dim);
  return MomentumMatrix(sum);
}

double kempf_ness(const AtomicMeasure& nu, const GroupElement& g) {
  if (g.ambient_dim() != nu.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const auto& atoms = nu.atoms();
  return pairwise_sum<double>(
      atoms.size(),
      [&](std::size_t i) {
        const double norm = (g.matrix() * atoms[i].point.coeffs()).norm();
        if (!(norm >= 1e-300) || !std::isfinite(norm)) {
          throw Error(ErrorKind::NumericalDegeneracy, "|g z| left the representable range");
        }
        return atoms[i].weight * std::log(norm);
      },
      0.0);
}

double kempf_ness_derivative(const AtomicMeasure& nu, const GroupElement& g, const SpectralDirection& d) {
  return pairing(momentum(pushforward(g, nu)), d.matrix());
}

}  // namespace mbal
