#pragma once

// Maximal weights of atomic measures along a direction A = iv:
//   lambda = sum_i c_i nu(W_i),
// where W_i is the set of points whose flow limit under exp(tA) lies in P(V_i).
// The returned value is lambda_nu(e(-v)); a measure is stable iff it is
// positive for every nonzero traceless Hermitian A.

#include <vector>

#include "mbal/measure.hpp"

namespace mbal {

inline constexpr double kDefaultFlowTime = 40.0;

struct StratumMass {
  double critical_value;
  double mass;
};

struct WeightReport {
  SpectralDirection direction;
  std::vector<StratumMass> strata;
  double lambda = 0.0;
};

/// Masses nu(W_i) for every critical value of d; lambda is filled in as well.
WeightReport unstable_partition(const AtomicMeasure& nu, const SpectralDirection& d,
                                double component_tol = kDefaultComponentTol);

WeightReport maximal_weight(const AtomicMeasure& nu, const SpectralDirection& d,
                            double component_tol = kDefaultComponentTol);

/// sum_i w_i mu^A(exp(t_max A) [z_i]), the slope of t -> Psi(nu, exp(tA)) at
/// t_max. Converges to maximal_weight from below as t_max grows.
/// Spectral components of norm <= component_tol count as zero, matching the
/// stratum assignment. Throws InvalidArgument for t_max < 0.
double lambda_via_flow(const AtomicMeasure& nu, const SpectralDirection& d,
                       double t_max = kDefaultFlowTime, double component_tol = kDefaultComponentTol);

/// Direction acting as (d - n) on the span of the points and (d + 1) on its
/// orthogonal complement, where d + 1 is the dimension of the span.
/// Throws EmptySpan for no points and SpanIsFull if they span C^{n+1}.
SpectralDirection destabilizing_direction(const std::vector<ProjectivePoint>& span, Eigen::Index n);

/// Same, for a subspace given by an orthonormal basis (columns).
SpectralDirection destabilizing_direction(const CMatrix& orthonormal_basis);

/// Orthonormal basis of the column span of z, with rank decided by singular
/// values above rel_tol * sigma_max.
CMatrix orthonormal_span(const CMatrix& z, double rel_tol = 1e-10);

}  // namespace mbal
