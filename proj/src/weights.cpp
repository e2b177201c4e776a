#include "mbal/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbal/parallel.hpp"

namespace mbal {

WeightReport unstable_partition(const AtomicMeasure& nu, const SpectralDirection& d, double component_tol) {
  if (d.ambient_dim() != nu.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const auto& values = d.eigenvalues();
  std::vector<double> masses(values.size(), 0.0);
  for (const auto& atom : nu.atoms()) {
    masses[flow_limit(atom.point, d, component_tol).stratum_index] += atom.weight;
  }

  WeightReport report{d, {}, 0.0};
  report.strata.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) report.strata.push_back({values[i], masses[i]});
  report.lambda = pairwise_sum<double>(values.size(), [&](std::size_t i) { return values[i] * masses[i]; }, 0.0);
  return report;
}

WeightReport maximal_weight(const AtomicMeasure& nu, const SpectralDirection& d, double component_tol) {
  return unstable_partition(nu, d, component_tol);
}

double lambda_via_flow(const AtomicMeasure& nu, const SpectralDirection& d, double t_max, double component_tol) {
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw Error(ErrorKind::InvalidArgument, "t_max must be >= 0");
  if (d.ambient_dim() != nu.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");

  // exp(tA) z = sum_i e^{t c_i} P_i z, applied component by component and
  // scaled by the largest e^{t c_i}|P_i z|: forming exp(tA) first would lose
  // small components to rounding. Components at the noise floor are dropped,
  // as in the stratum assignment, since e^{t gap} would amplify them.
  const auto& values = d.eigenvalues();
  const auto& projectors = d.projectors();
  const auto& atoms = nu.atoms();
  return pairwise_sum<double>(
      atoms.size(),
      [&](std::size_t a) {
        const CVector& z = atoms[a].point.coeffs();
        std::vector<CVector> parts(values.size());
        std::vector<double> logs(values.size(), -std::numeric_limits<double>::infinity());
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < values.size(); ++i) {
          parts[i] = projectors[i] * z;
          const double norm = parts[i].norm();
          if (norm > component_tol) logs[i] = t_max * values[i] + std::log(norm);
          top = std::max(top, logs[i]);
        }
        if (!std::isfinite(top)) throw Error(ErrorKind::NumericalDegeneracy, "atom has no spectral component");
        CVector w = CVector::Zero(z.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (std::isfinite(logs[i])) w += std::exp(t_max * values[i] - top) * parts[i];
        }
        const double norm = w.norm();
        if (!(norm >= 1e-150)) throw Error(ErrorKind::NumericalDegeneracy, "flowed vector underflowed");
        w /= norm;
        return atoms[a].weight * w.dot(d.matrix() * w).real();
      },
      0.0);
}

CMatrix orthonormal_span(const CMatrix& z, double rel_tol) {
  if (z.cols() == 0) return CMatrix(z.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(z, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

SpectralDirection destabilizing_direction(const CMatrix& basis) {
  const Eigen::Index dim = basis.rows();
  const Eigen::Index span_dim = basis.cols();
  if (span_dim == 0) throw Error(ErrorKind::EmptySpan, "no points given");
  if (span_dim >= dim) throw Error(ErrorKind::SpanIsFull, "points span the whole space");
  const auto n = static_cast<double>(dim - 1);
  const auto d = static_cast<double>(span_dim - 1);
  const double c0 = d - n;
  const double c1 = d + 1.0;
  const CMatrix proj = basis * basis.adjoint();
  CMatrix a = c0 * proj + c1 * (CMatrix::Identity(dim, dim) - proj);
  return spectral_decompose(a);
}

SpectralDirection destabilizing_direction(const std::vector<ProjectivePoint>& span, Eigen::Index n) {
  if (span.empty()) throw Error(ErrorKind::EmptySpan, "no points given");
  CMatrix z(n + 1, static_cast<Eigen::Index>(span.size()));
  for (std::size_t i = 0; i < span.size(); ++i) {
    if (span[i].ambient_dim() != n + 1) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    z.col(static_cast<Eigen::Index>(i)) = span[i].coeffs();
  }
  return destabilizing_direction(orthonormal_span(z));
}

}  // namespace mbal
