#pragma once

// Atomic probability measures on P^n, their pushforward under SL(n+1,C), the
// measure momentum map and the measure Kempf-Ness functional
//   Psi(nu, g) = sum_i w_i log |g z_i|   (z_i unit representatives).

#include <vector>

#include "mbal/core_geometry.hpp"

namespace mbal {

inline constexpr double kDefaultMergeTol = 1e-12;
inline constexpr double kWeightSumTol = 1e-6;

struct Atom {
  ProjectivePoint point;
  double weight;
};

class AtomicMeasure {
 public:
  /// Validates and normalizes: every point must live in P^n, weights must be
  /// positive and sum to 1 within 1e-6. Atoms closer than merge_tol (in
  /// 1 - |<p,q>|) are merged keeping the first representative; weights are then
  /// rescaled to sum to 1. Throws InvalidMeasure otherwise.
  AtomicMeasure(Eigen::Index n, std::vector<Atom> atoms, double merge_tol = kDefaultMergeTol);

  /// Projective dimension n of the ambient P^n.
  Eigen::Index dim() const noexcept { return n_; }
  Eigen::Index ambient_dim() const noexcept { return n_ + 1; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Representatives as columns of an (n+1) x m matrix.
  CMatrix point_matrix() const;

 private:
  Eigen::Index n_;
  std::vector<Atom> atoms_;
};

/// Image measure g_* nu; colliding atoms are merged.
AtomicMeasure pushforward(const GroupElement& g, const AtomicMeasure& nu);

/// sum_i w_i (P_{z_i} - Id/(n+1)).
MomentumMatrix momentum(const AtomicMeasure& nu);

/// sum_i w_i log |g z_i|. Throws NumericalDegeneracy if some |g z_i| underflows.
double kempf_ness(const AtomicMeasure& nu, const GroupElement& g);

/// d/dt Psi(nu, exp(tA) g) at t = 0, i.e. tr(momentum(g.nu) A).
double kempf_ness_derivative(const AtomicMeasure& nu, const GroupElement& g,
                             const SpectralDirection& d);

}  // namespace mbal
