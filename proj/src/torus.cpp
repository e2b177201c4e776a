#include "mbal/torus.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace mbal {

namespace {

// Columns form an orthonormal basis of {theta : sum theta = 0}.
RMatrix zero_sum_basis(Eigen::Index dim) {
  RMatrix u = RMatrix::Zero(dim, dim - 1);
  for (Eigen::Index k = 1; k < dim; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    u.col(k - 1).head(k).setConstant(scale);
    u(k, k - 1) = -static_cast<double>(k) * scale;
  }
  return u;
}

struct TorusState {
  double value = 0.0;  // f(theta)
  RVector gradient;
  RMatrix hessian;
};

TorusState evaluate(const AtomicMeasure& nu, const RVector& theta, bool with_hessian) {
  const auto dim = nu.ambient_dim();
  TorusState st{0.0, RVector::Zero(dim), with_hessian ? RMatrix::Zero(dim, dim) : RMatrix()};
  RVector logits(dim);
  for (const auto& atom : nu.atoms()) {
    const CVector& z = atom.point.coeffs();
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double sq = std::norm(z(j));
      logits(j) = sq > 0.0 ? 2.0 * theta(j) + std::log(sq) : -std::numeric_limits<double>::infinity();
      top = std::max(top, logits(j));
    }
    RVector p = (logits.array() - top).exp();
    const double total = p.sum();
    p /= total;
    st.value += atom.weight * 0.5 * (top + std::log(total));
    st.gradient += atom.weight * p;
    if (with_hessian) {
      st.hessian += 2.0 * atom.weight * (RMatrix(p.asDiagonal()) - p * p.transpose());
    }
  }
  return st;
}

}  // namespace

RVector torus_gradient(const AtomicMeasure& nu, const RVector& theta) {
  if (theta.size() != nu.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "theta has the wrong length");
  return evaluate(nu, theta, false).gradient;
}

bool torus_target_inside(const AtomicMeasure& nu, const RVector& beta, double margin) {
  const auto dim = nu.ambient_dim();
  if (beta.size() != dim) throw Error(ErrorKind::InvalidArgument, "beta has the wrong length");
  if (dim > 24) throw Error(ErrorKind::InvalidArgument, "polytope test limited to n+1 <= 24 coordinates");

  std::vector<std::uint32_t> supports;
  for (const auto& atom : nu.atoms()) {
    std::uint32_t s = 0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (std::abs(atom.point.coeffs()(j)) > kDefaultComponentTol) s |= std::uint32_t{1} << j;
    }
    supports.push_back(s);
  }
  const RVector q = beta.array() + 1.0 / static_cast<double>(dim);
  const std::uint32_t full = (std::uint32_t{1} << dim) - 1;
  // Feasibility of the transportation problem (Hall): lo(J) <= q(J) <= hi(J).
  // Directions along which the polytope is flat need equality instead.
  for (std::uint32_t set = 1; set < full; ++set) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < supports.size(); ++i) {
      const double w = nu.atoms()[i].weight;
      if ((supports[i] & ~set) == 0) lo += w;
      if ((supports[i] & set) != 0) hi += w;
    }
    double qj = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (set & (std::uint32_t{1} << j)) qj += q(j);
    }
    if (hi - lo <= margin) {
      if (std::abs(qj - lo) > 1e-9) return false;
    } else if (!(qj > lo + margin && qj < hi - margin)) {
      return false;
    }
  }
  return true;
}

TorusSolveResult torus_solve(const AtomicMeasure& nu, const RVector& beta, double tol, int max_iter) {
  const auto dim = nu.ambient_dim();
  if (beta.size() != dim) throw Error(ErrorKind::InvalidArgument, "beta has the wrong length");
  if (std::abs(beta.sum()) > 1e-12) throw Error(ErrorKind::InvalidArgument, "beta must sum to zero");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (!torus_target_inside(nu, beta)) {
    throw Error(ErrorKind::TargetOutsidePolytope, "beta is not in the interior of the torus momentum polytope");
  }

  const RMatrix u = zero_sum_basis(dim);
  const RVector shift = beta.array() + 1.0 / static_cast<double>(dim);
  TorusSolveResult result{RVector::Zero(dim), 0.0, 0, TorusVerdict::MaxIterations};
  TorusState st = evaluate(nu, result.theta, true);

  for (int k = 0;; ++k) {
    const RVector residual = st.gradient - shift;
    result.iterations = k;
    result.residual = residual.norm();
    if (result.residual <= tol) {
      result.verdict = TorusVerdict::Converged;
      return result;
    }
    if (k >= max_iter || dim == 1) return result;

    const RVector grad = u.transpose() * residual;
    const RMatrix hess = u.transpose() * st.hessian * u;
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(hess);
    const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    RVector inv = RVector::Zero(eig.eigenvalues().size());
    for (Eigen::Index j = 0; j < inv.size(); ++j) {
      if (eig.eigenvalues()(j) > 1e-14 * top) inv(j) = 1.0 / eig.eigenvalues()(j);
    }
    RVector step_y = -(eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * grad);
    if (!(step_y.dot(grad) < 0.0)) step_y = -grad;
    const RVector direction = u * step_y;
    const double slope = grad.dot(step_y);
    const double objective = st.value - beta.dot(result.theta);

    bool accepted = false;
    double s = 1.0;
    for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
      RVector trial = result.theta + s * direction;
      TorusState next = evaluate(nu, trial, true);
      const double trial_objective = next.value - beta.dot(trial);
      const double trial_residual = (next.gradient - shift).norm();
      // Objective decrease becomes invisible in double precision near the
      // optimum; a shrinking gradient is then accepted instead.
      if (trial_objective <= objective + 1e-4 * s * slope ||
          (trial_objective <= objective + 1e-15 * std::max(1.0, std::abs(objective)) &&
           trial_residual <= (1.0 - 1e-4 * s) * result.residual)) {
        result.theta = std::move(trial);
        st = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) return result;
  }
}

}  // namespace mbal
