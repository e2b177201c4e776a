#pragma once

// Seeded, platform-independent random inputs. The engine is std::mt19937_64
// (fully specified by the standard); uniforms take the top 53 bits of one
// draw, normals use the Box-Muller transform. std:: distributions are avoided
// because their output is implementation-defined.

#include <cstdint>
#include <random>

#include "mbal/measure.hpp"

namespace mbal {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Complex complex_normal();  ///< E|z|^2 = 1
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Unitarily invariant (uniform) point of P^n.
ProjectivePoint random_point(Rng& rng, Eigen::Index n);

/// Haar unitary via QR of a complex Ginibre matrix with phase correction.
CMatrix random_unitary(Rng& rng, Eigen::Index dim);

/// GUE sample projected to trace zero and scaled to unit Frobenius norm.
CMatrix random_traceless_hermitian(Rng& rng, Eigen::Index dim);

/// U diag(s) V with Haar U, V and log-uniform singular values whose ratio is at
/// most max_condition.
CMatrix random_invertible(Rng& rng, Eigen::Index dim, double max_condition);

/// m uniform points of P^n, equal weights or weights uniform in [0.5, 1.5]
/// normalized.
AtomicMeasure random_measure(Rng& rng, Eigen::Index n, std::size_t m, bool equal_weights = true);

Eigen::Vector3d random_sphere_point(Rng& rng);

}  // namespace mbal
