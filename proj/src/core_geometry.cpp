#include "mbal/core_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mbal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::InvalidDirection: return "InvalidDirection";
    case ErrorKind::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorKind::ZeroDirection: return "ZeroDirection";
    case ErrorKind::SpanIsFull: return "SpanIsFull";
    case ErrorKind::EmptySpan: return "EmptySpan";
    case ErrorKind::TooManyAtoms: return "TooManyAtoms";
    case ErrorKind::NotSemistable: return "NotSemistable";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NotPositiveTarget: return "NotPositiveTarget";
    case ErrorKind::TargetOutsidePolytope: return "TargetOutsidePolytope";
    case ErrorKind::DegenerateHull: return "DegenerateHull";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

// Relative size below which a coordinate is treated as zero when picking the
// phase representative.
constexpr double kPhaseCoordTol = 1e-14;
constexpr double kDegenerateNorm = 1e-150;

}  // namespace

ProjectivePoint::ProjectivePoint(CVector z) : z_(std::move(z)) {
  if (z_.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty coefficient vector");
  const double norm = z_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::InvalidArgument, "coefficient vector must be finite and nonzero");
  }
  Eigen::Index lead = 0;
  for (Eigen::Index k = 0; k < z_.size(); ++k) {
    if (std::abs(z_(k)) > kPhaseCoordTol * norm) {
      lead = k;
      break;
    }
  }
  // Both fix-ups are skipped when already satisfied, so re-normalizing a
  // normalized point is bitwise idempotent.
  const Complex c = z_(lead);
  if (!(c.imag() == 0.0 && c.real() > 0.0)) {
    z_ *= std::conj(c) / std::abs(c);
    z_(lead) = z_(lead).real();
  }
  const double sq = z_.squaredNorm();
  if (std::abs(sq - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) z_ /= std::sqrt(sq);
}

double ProjectivePoint::overlap(const ProjectivePoint& other) const {
  if (other.z_.size() != z_.size()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  return std::min(1.0, std::abs(z_.dot(other.z_)));
}

bool ProjectivePoint::approx_equal(const ProjectivePoint& other, double tol) const {
  return overlap(other) >= 1.0 - tol;
}

double ProjectivePoint::fs_distance(const ProjectivePoint& other) const {
  return std::acos(overlap(other));
}

MomentumMatrix::MomentumMatrix(const CMatrix& m) : m_(0.5 * (m + m.adjoint())) {}

MomentumMatrix MomentumMatrix::zero(Eigen::Index ambient_dim) {
  return MomentumMatrix(CMatrix::Zero(ambient_dim, ambient_dim));
}

std::vector<int> SpectralDirection::multiplicities() const {
  std::vector<int> out;
  out.reserve(bases_.size());
  for (const auto& b : bases_) out.push_back(static_cast<int>(b.cols()));
  return out;
}

CMatrix SpectralDirection::exp(double t) const {
  CMatrix out = CMatrix::Zero(a_.rows(), a_.cols());
  for (std::size_t i = 0; i < values_.size(); ++i) out += std::exp(t * values_[i]) * projectors_[i];
  return out;
}

GroupElement::GroupElement(const CMatrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "group element must be a nonempty square matrix");
  }
  const Complex det = g.partialPivLu().determinant();
  if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det))) {
    throw Error(ErrorKind::NumericalDegeneracy, "matrix is singular or not finite");
  }
  const Complex root = std::pow(det, 1.0 / static_cast<double>(g.rows()));
  g_ = g / root;
}

GroupElement GroupElement::identity(Eigen::Index ambient_dim) {
  return GroupElement(CMatrix::Identity(ambient_dim, ambient_dim));
}

GroupElement GroupElement::inverse() const { return GroupElement(g_.inverse()); }

GroupElement GroupElement::operator*(const GroupElement& rhs) const {
  return GroupElement(g_ * rhs.g_);
}

MomentumMatrix momentum_of_point(const ProjectivePoint& p) {
  const CVector& z = p.coeffs();
  const auto dim = z.size();
  CMatrix m = z * z.adjoint();
  m.diagonal().array() -= 1.0 / static_cast<double>(dim);
  return MomentumMatrix(m);
}

double mu_component(const ProjectivePoint& p, const SpectralDirection& d) {
  const CVector& z = p.coeffs();
  return z.dot(d.matrix() * z).real();
}

double pairing(const MomentumMatrix& m, const CMatrix& a) {
  // tr(m a) = sum_jk m_jk a_kj; real because both are Hermitian.
  return (m.matrix().transpose().cwiseProduct(a)).sum().real();
}

ProjectivePoint act_point(const GroupElement& g, const ProjectivePoint& p) {
  CVector w = g.matrix() * p.coeffs();
  const double norm = w.norm();
  if (!(norm >= kDegenerateNorm) || !std::isfinite(norm)) {
    throw Error(ErrorKind::NumericalDegeneracy, "|g z| left the representable range");
  }
  return ProjectivePoint(std::move(w));
}

SpectralDirection spectral_decompose(const CMatrix& a, double cluster_tol) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidDirection, "direction must be a nonempty square matrix");
  }
  const double fro = a.norm();
  if (!std::isfinite(fro)) throw Error(ErrorKind::InvalidDirection, "direction is not finite");
  if (fro <= 1e-14) throw Error(ErrorKind::ZeroDirection, "direction has zero norm");
  if ((a - a.adjoint()).norm() > 1e-12 * std::max(1.0, fro)) {
    throw Error(ErrorKind::InvalidDirection, "direction is not Hermitian");
  }
  if (std::abs(a.trace()) > 1e-10 * std::max(1.0, fro)) {
    throw Error(ErrorKind::InvalidDirection, "direction is not traceless");
  }

  SpectralDirection d;
  d.a_ = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(d.a_);
  const RVector& lambda = eig.eigenvalues();
  const CMatrix& vecs = eig.eigenvectors();

  const double gap_tol = cluster_tol * fro;
  Eigen::Index start = 0;
  const Eigen::Index size = lambda.size();
  for (Eigen::Index k = 1; k <= size; ++k) {
    if (k < size && lambda(k) - lambda(k - 1) <= gap_tol) continue;
    const Eigen::Index count = k - start;
    const double value = lambda.segment(start, count).mean();
    CMatrix basis = vecs.middleCols(start, count);
    d.values_.push_back(value);
    d.projectors_.push_back(basis * basis.adjoint());
    d.bases_.push_back(std::move(basis));
    start = k;
  }
  return d;
}

FlowLimit flow_limit(const ProjectivePoint& p, const SpectralDirection& d, double component_tol) {
  if (!(component_tol > 0.0 && component_tol < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "component_tol must lie in (0, 1)");
  }
  const CVector& z = p.coeffs();
  const auto& bases = d.eigenbases();
  for (std::size_t i = bases.size(); i-- > 0;) {
    CVector coords = bases[i].adjoint() * z;
    if (coords.norm() > component_tol) {
      return FlowLimit{i, ProjectivePoint(bases[i] * coords)};
    }
  }
  // Unreachable for a unit vector: the components have total squared norm 1.
  throw Error(ErrorKind::NumericalDegeneracy, "point has no spectral component above tolerance");
}

CMatrix hermitian_exp(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
  const RVector scaled = (t * eig.eigenvalues()).array().exp();
  return eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix hermitian_sqrt(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (s + s.adjoint()));
  const RVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace mbal
