#pragma once

// Solvers for momentum(g . nu) = beta with g in SL(n+1,C).
//
// beta = 0 (balanced measures):
//   * FixedPoint: Tyler-type iteration S <- c [sum_i w_i z_i z_i^* / (z_i^* S z_i)]^{-1},
//     det S = 1, returning g = S^{1/2}. S is a fixed point iff g balances nu.
//   * GeodesicDescent: Armijo descent of Psi(nu, g) along g <- exp(-s F) g,
//     F = momentum(g . nu).
// beta != 0: damped Newton on the Gram operator of the fundamental fields,
// with gradient steps on 1/2 |F - beta|^2 when the Gram matrix is singular.

#include <optional>
#include <string>
#include <vector>

#include "mbal/classifier.hpp"
#include "mbal/measure.hpp"

namespace mbal {

enum class BalanceMethod { FixedPoint, GeodesicDescent };
enum class BalanceVerdict { Converged, DivergedWithCertificate, MaxIterations };

const char* to_string(BalanceMethod method);
const char* to_string(BalanceVerdict verdict);

struct TraceRow {
  int iteration = 0;
  double residual = 0.0;
  double kempf_ness = 0.0;  ///< Psi(nu, g_k)
};

struct BalanceResult {
  GroupElement g;
  double residual = 0.0;  ///< |momentum(g . nu) - beta|_F
  int iterations = 0;
  std::vector<TraceRow> trace;
  BalanceVerdict verdict = BalanceVerdict::MaxIterations;
  /// Instability witness when verdict is DivergedWithCertificate.
  std::optional<CandidateSubspace> certificate;
};

inline constexpr double kDefaultBalanceTol = 1e-10;
inline constexpr int kDefaultBalanceMaxIter = 2000;
inline constexpr double kDivergenceCondition = 1e12;

struct BalanceOptions {
  BalanceMethod method = BalanceMethod::FixedPoint;
  double tol = kDefaultBalanceTol;
  int max_iter = kDefaultBalanceMaxIter;
  /// Positive definite, trace-one target rho; beta = rho - Id/(n+1). Absent
  /// means beta = 0.
  std::optional<CMatrix> target_rho;
  /// Starting group element (any invertible matrix); identity by default.
  std::optional<CMatrix> initial;
  /// Condition number of S = g^* g above which the run is declared divergent.
  double divergence_condition = kDivergenceCondition;
};

BalanceResult balance(const AtomicMeasure& nu, const BalanceOptions& options = {});

/// Newton solve of momentum(g . nu) = rho - Id/(n+1) from the identity (or
/// options.initial). Throws NotPositiveTarget for rho outside the open
/// momentum body and NotStable if nu is not stable.
BalanceResult solve_target(const AtomicMeasure& nu, const CMatrix& rho, double tol = kDefaultBalanceTol,
                           int max_iter = 100, const std::optional<CMatrix>& initial = std::nullopt);

/// Orthonormal basis (under tr(AB)) of the (n+1)^2 - 1 traceless Hermitian
/// matrices: Gram-Schmidt of E_jj - E_{j+1,j+1}, then symmetric and
/// antisymmetric off-diagonal pairs.
std::vector<CMatrix> traceless_hermitian_basis(Eigen::Index ambient_dim);

/// G_jk = sum_i w_i 2 Re[(A_j z_i)^* (Id - z_i z_i^*) (A_k z_i)]: the derivative
/// of tr(momentum(exp(t A_j) . nu) A_k) at t = 0.
RMatrix gram_operator(const AtomicMeasure& nu, const std::vector<CMatrix>& basis);
RMatrix gram_operator(const AtomicMeasure& nu, const std::vector<SpectralDirection>& basis);

/// Checks that rho is Hermitian with trace 1 and eigenvalues >= min_eigenvalue.
/// Throws NotPositiveTarget otherwise.
void validate_target(const CMatrix& rho, Eigen::Index ambient_dim, double min_eigenvalue = 1e-10);

/// Writes "iteration,residual,kempf_ness" rows with 17 significant digits.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace mbal
