#pragma once

// Points of complex projective space P^n, the Fubini-Study momentum map of the
// SU(n+1) action, SL(n+1,C) group elements and spectral decomposition of
// traceless Hermitian directions.
//
// Conventions: a direction v in su(n+1) is stored as the Hermitian matrix
// A = i v, and a momentum value -i(P - Id/(n+1)) is stored as the Hermitian
// matrix P - Id/(n+1). The duality pairing becomes the real trace tr(m A).

#include <cstddef>
#include <vector>

#include "mbal/types.hpp"

namespace mbal {

inline constexpr double kDefaultClusterTol = 1e-10;
inline constexpr double kDefaultComponentTol = 1e-12;

/// A point [z] of P^n. Coefficients are kept unit-norm with the first nonzero
/// coordinate real and positive, so two representatives of the same point
/// compare equal bitwise after construction.
class ProjectivePoint {
 public:
  /// Throws InvalidArgument for an empty or zero vector.
  explicit ProjectivePoint(CVector z);

  const CVector& coeffs() const noexcept { return z_; }
  /// Projective dimension n.
  Eigen::Index dim() const noexcept { return z_.size() - 1; }
  Eigen::Index ambient_dim() const noexcept { return z_.size(); }

  /// |<p, q>| for unit representatives; 1 means the same point.
  double overlap(const ProjectivePoint& other) const;
  bool approx_equal(const ProjectivePoint& other, double tol) const;
  /// Fubini-Study distance arccos |<p, q>|, in [0, pi/2].
  double fs_distance(const ProjectivePoint& other) const;

 private:
  CVector z_;
};

/// Hermitian traceless matrix representing a momentum value.
class MomentumMatrix {
 public:
  /// Hermitian-symmetrizes its input; tracelessness is the caller's contract.
  explicit MomentumMatrix(const CMatrix& m);
  static MomentumMatrix zero(Eigen::Index ambient_dim);

  const CMatrix& matrix() const noexcept { return m_; }
  double norm() const { return m_.norm(); }

 private:
  CMatrix m_;
};

/// A nonzero traceless Hermitian matrix together with its eigenvalues grouped
/// into distinct ascending critical values c_0 < ... < c_r and the orthogonal
/// projectors onto the eigenspaces V_0, ..., V_r.
class SpectralDirection {
 public:
  const CMatrix& matrix() const noexcept { return a_; }
  Eigen::Index ambient_dim() const noexcept { return a_.rows(); }
  const std::vector<double>& eigenvalues() const noexcept { return values_; }
  const std::vector<CMatrix>& projectors() const noexcept { return projectors_; }
  /// Orthonormal basis of V_i as columns.
  const std::vector<CMatrix>& eigenbases() const noexcept { return bases_; }
  std::vector<int> multiplicities() const;
  std::size_t top_index() const noexcept { return values_.size() - 1; }

  /// exp(t A) computed from the clustered decomposition.
  CMatrix exp(double t) const;

 private:
  friend SpectralDirection spectral_decompose(const CMatrix& a, double cluster_tol);
  CMatrix a_;
  std::vector<double> values_;
  std::vector<CMatrix> projectors_;
  std::vector<CMatrix> bases_;
};

/// An element of SL(n+1, C). Any invertible matrix is accepted and rescaled by
/// det^{-1/(n+1)}.
class GroupElement {
 public:
  /// Throws NumericalDegeneracy if the matrix is (numerically) singular.
  explicit GroupElement(const CMatrix& g);
  static GroupElement identity(Eigen::Index ambient_dim);

  const CMatrix& matrix() const noexcept { return g_; }
  Eigen::Index ambient_dim() const noexcept { return g_.rows(); }
  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& rhs) const;

 private:
  CMatrix g_;
};

/// P_p - Id/(n+1).
MomentumMatrix momentum_of_point(const ProjectivePoint& p);

/// z* A z for the unit representative z; equals sum_i c_i |z_i|^2.
double mu_component(const ProjectivePoint& p, const SpectralDirection& d);

/// Real trace pairing tr(m a) between a momentum and a Hermitian direction.
double pairing(const MomentumMatrix& m, const CMatrix& a);

/// [g z]. Throws NumericalDegeneracy when |g z| < 1e-150.
ProjectivePoint act_point(const GroupElement& g, const ProjectivePoint& p);

/// Clusters the eigenvalues of a: neighbours closer than cluster_tol * |a|_F
/// are merged into one critical value (the cluster mean).
/// Throws ZeroDirection if |a|_F <= 1e-14 and InvalidDirection if a is not
/// Hermitian within 1e-12 (relative) or not traceless.
SpectralDirection spectral_decompose(const CMatrix& a, double cluster_tol = kDefaultClusterTol);

struct FlowLimit {
  std::size_t stratum_index;
  ProjectivePoint limit;
};

/// Limit of exp(tA)[z] as t -> +infinity: the normalized component of z in the
/// highest eigenspace where it is larger than component_tol.
FlowLimit flow_limit(const ProjectivePoint& p, const SpectralDirection& d,
                     double component_tol = kDefaultComponentTol);

/// exp(t H) for a Hermitian H, via its eigendecomposition.
CMatrix hermitian_exp(const CMatrix& h, double t = 1.0);

/// Hermitian positive square root of a Hermitian positive semidefinite matrix.
CMatrix hermitian_sqrt(const CMatrix& s);

}  // namespace mbal
