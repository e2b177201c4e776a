#pragma once

// Momentum balancing under the diagonal torus of SL(n+1,C).
//
// For g = diag(e^{theta_0}, ..., e^{theta_n}) with sum theta = 0, the diagonal
// of momentum(g . nu) is grad f(theta) - 1/(n+1), where
//   f(theta) = sum_i w_i (1/2) log(sum_j e^{2 theta_j} |z_ij|^2)
// is smooth and convex. Solving diag momentum = beta means minimizing
// f(theta) - <beta, theta> on the hyperplane sum theta = 0.

#include <vector>

#include "mbal/measure.hpp"

namespace mbal {

enum class TorusVerdict { Converged, MaxIterations };

struct TorusSolveResult {
  RVector theta;  ///< sums to zero
  double residual = 0.0;  ///< |grad f(theta) - 1/(n+1) - beta|
  int iterations = 0;
  TorusVerdict verdict = TorusVerdict::MaxIterations;
};

/// Whether beta + 1/(n+1) lies in the relative interior of the torus momentum
/// polytope sum_i w_i conv{e_j : z_ij != 0}. Uses the exact subset criterion
/// sum_{supp_i in J} w_i < q(J) < sum_{supp_i meets J} w_i for every J.
bool torus_target_inside(const AtomicMeasure& nu, const RVector& beta, double margin = 1e-12);

/// Damped Newton on f - <beta, .>. Throws TargetOutsidePolytope when beta is
/// not in the relative interior and InvalidArgument when beta does not sum to 0.
TorusSolveResult torus_solve(const AtomicMeasure& nu, const RVector& beta, double tol = 1e-10, int max_iter = 200);

/// grad f(theta) (the diagonal of sum_i w_i P_{g z_i}).
RVector torus_gradient(const AtomicMeasure& nu, const RVector& theta);

}  // namespace mbal
