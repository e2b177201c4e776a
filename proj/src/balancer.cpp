#include "mbal/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mbal/parallel.hpp"
#include "mbal/weights.hpp"

namespace mbal {

const char* to_string(BalanceMethod method) {
  switch (method) {
    case BalanceMethod::FixedPoint: return "FixedPoint";
    case BalanceMethod::GeodesicDescent: return "GeodesicDescent";
  }
  return "Unknown";
}

const char* to_string(BalanceVerdict verdict) {
  switch (verdict) {
    case BalanceVerdict::Converged: return "Converged";
    case BalanceVerdict::DivergedWithCertificate: return "DivergedWithCertificate";
    case BalanceVerdict::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

// sum_i w_i P_{g z_i} - Id/(n+1), without building (and merging) the image measure.
CMatrix momentum_after(const AtomicMeasure& nu, const CMatrix& g) {
  const auto dim = nu.ambient_dim();
  const auto& atoms = nu.atoms();
  CMatrix sum = pairwise_sum<CMatrix>(
      atoms.size(),
      [&](std::size_t i) -> CMatrix {
        const CVector w = g * atoms[i].point.coeffs();
        return (atoms[i].weight / w.squaredNorm()) * (w * w.adjoint());
      },
      CMatrix::Zero(dim, dim));
  sum.diagonal().array() -= 1.0 / static_cast<double>(dim);
  return 0.5 * (sum + sum.adjoint());
}

double kempf_ness_of(const AtomicMeasure& nu, const CMatrix& g) {
  const auto& atoms = nu.atoms();
  return pairwise_sum<double>(
      atoms.size(), [&](std::size_t i) { return atoms[i].weight * std::log((g * atoms[i].point.coeffs()).norm()); },
      0.0);
}

// Second derivative of Psi(exp(-s h) g) at s = 0.
double curvature_along(const AtomicMeasure& nu, const CMatrix& g, const CMatrix& h) {
  const auto& atoms = nu.atoms();
  return pairwise_sum<double>(
      atoms.size(),
      [&](std::size_t i) {
        CVector u = g * atoms[i].point.coeffs();
        u /= u.norm();
        const CVector hu = h * u;
        return 2.0 * atoms[i].weight * (hu - u * u.dot(hu)).squaredNorm();
      },
      0.0);
}

CMatrix normalize_det(const CMatrix& s) {
  // s is Hermitian positive definite, so its determinant is real positive.
  const double det = s.partialPivLu().determinant().real();
  return s / std::pow(det, 1.0 / static_cast<double>(s.rows()));
}

CMatrix hermitian_power(const CMatrix& h, double p) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
  const RVector powered = eig.eigenvalues().cwiseMax(0.0).array().pow(p);
  return eig.eigenvectors() * powered.asDiagonal() * eig.eigenvectors().adjoint();
}

double condition_number(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

CandidateSubspace certificate_from_basis(const AtomicMeasure& nu, CMatrix basis, double tol) {
  CandidateSubspace c;
  c.basis = std::move(basis);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const CVector& z = nu.atoms()[i].point.coeffs();
    if ((z - c.basis * (c.basis.adjoint() * z)).norm() <= tol) {
      c.atoms.push_back(i);
      c.mass += nu.atoms()[i].weight;
    }
  }
  return c;
}

// The subspace along which S = g^* g collapses: eigenvectors below the largest
// multiplicative gap of the spectrum. Matched to the closest atom-spanned
// candidate of the same dimension when the enumeration is affordable.
CandidateSubspace divergence_certificate(const AtomicMeasure& nu, const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (s + s.adjoint()));
  const RVector& lambda = eig.eigenvalues();
  Eigen::Index split = 0;
  double widest = -1.0;
  for (Eigen::Index k = 0; k + 1 < lambda.size(); ++k) {
    const double gap = std::log(std::max(lambda(k + 1), 1e-300)) - std::log(std::max(lambda(k), 1e-300));
    if (gap > widest) {
      widest = gap;
      split = k;
    }
  }
  const CMatrix collapsed = eig.eigenvectors().leftCols(split + 1);

  if (nu.size() <= kDefaultCandidateCap) {
    const CMatrix projector = collapsed * collapsed.adjoint();
    const std::vector<CandidateSubspace> candidates = candidate_subspaces(nu);
    const CandidateSubspace* best = nullptr;
    double best_distance = 0.5;
    for (const auto& c : candidates) {
      if (c.basis.cols() != collapsed.cols()) continue;
      const double distance = (c.basis * c.basis.adjoint() - projector).norm();
      if (distance < best_distance) {
        best_distance = distance;
        best = &c;
      }
    }
    if (best != nullptr) return *best;
  }
  return certificate_from_basis(nu, collapsed, 1e-6);
}

BalanceResult start_result(const CMatrix& g) {
  return BalanceResult{GroupElement(g), 0.0, 0, {}, BalanceVerdict::MaxIterations, std::nullopt};
}

// Atoms that do not span C^{n+1} carry full mass on a proper subspace.
std::optional<CandidateSubspace> degenerate_support(const AtomicMeasure& nu) {
  CMatrix span = orthonormal_span(nu.point_matrix());
  if (span.cols() == nu.ambient_dim()) return std::nullopt;
  return certificate_from_basis(nu, std::move(span), kDefaultSpanTol);
}

BalanceResult fixed_point(const AtomicMeasure& nu, const BalanceOptions& options) {
  const auto dim = nu.ambient_dim();
  const auto& atoms = nu.atoms();
  const CMatrix g0 = options.initial ? *options.initial : CMatrix::Identity(dim, dim);
  CMatrix s = normalize_det(g0.adjoint() * g0);

  auto scatter = [&](const CMatrix& sm) {
    return pairwise_sum<CMatrix>(
        atoms.size(),
        [&](std::size_t i) -> CMatrix {
          const CVector& z = atoms[i].point.coeffs();
          return (atoms[i].weight / z.dot(sm * z).real()) * (z * z.adjoint());
        },
        CMatrix::Zero(dim, dim));
  };
  auto residual_of = [&](const CMatrix& sm, const CMatrix& m) {
    const CMatrix root = hermitian_sqrt(sm);
    CMatrix f = root * m * root;
    f.diagonal().array() -= 1.0 / static_cast<double>(dim);
    return f.norm();
  };

  // Psi at g = S^{1/2}.
  auto psi_of = [&](const CMatrix& sm) {
    return pairwise_sum<double>(
        atoms.size(),
        [&](std::size_t i) {
          const CVector& z = atoms[i].point.coeffs();
          return 0.5 * atoms[i].weight * std::log(z.dot(sm * z).real());
        },
        0.0);
  };

  BalanceResult result = start_result(hermitian_sqrt(s));
  CMatrix m = scatter(s);
  double residual = residual_of(s, m);
  double psi = psi_of(s);
  double step = 1.0;
  for (int k = 0;; ++k) {
    const CMatrix root = hermitian_sqrt(s);
    result.trace.push_back({k, residual, kempf_ness_of(nu, root)});
    result.iterations = k;
    result.residual = residual;
    result.g = GroupElement(root);
    if (residual <= options.tol) {
      result.verdict = BalanceVerdict::Converged;
      return result;
    }
    if (condition_number(s) > options.divergence_condition) {
      result.verdict = BalanceVerdict::DivergedWithCertificate;
      result.certificate = divergence_certificate(nu, s);
      return result;
    }
    if (k >= options.max_iter) {
      result.verdict = BalanceVerdict::MaxIterations;
      return result;
    }

    const CMatrix target = normalize_det(m.inverse());
    // The Tyler step majorizes Psi, so it never increases Psi in exact
    // arithmetic; the residual, by contrast, may rise on the way to a
    // degenerate limit. Damping (S #_a T with halved a) is a guard against
    // rounding only, and a Psi flat to rounding is accepted.
    const auto acceptable = [&](double p) { return p <= psi + 1e-14 * std::max(1.0, std::abs(psi)); };
    CMatrix next;
    double next_psi = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (step >= 1.0) {
        next = target;
      } else {
        const CMatrix inv_root = hermitian_power(s, -0.5);
        next = normalize_det(root * hermitian_power(inv_root * target * inv_root, step) * root);
      }
      next_psi = psi_of(next);
      if (acceptable(next_psi) || attempt >= 8 || !std::isfinite(next_psi)) break;
      step *= 0.5;
    }
    if (acceptable(next_psi)) step = std::min(1.0, 2.0 * step);
    s = 0.5 * (next + next.adjoint());
    m = scatter(s);
    psi = next_psi;
    residual = residual_of(s, m);
  }
}

BalanceResult geodesic_descent(const AtomicMeasure& nu, const BalanceOptions& options) {
  const auto dim = nu.ambient_dim();
  CMatrix g = options.initial ? GroupElement(*options.initial).matrix() : CMatrix::Identity(dim, dim);
  BalanceResult result = start_result(g);
  double step = 1.0;
  for (int k = 0;; ++k) {
    const CMatrix f = momentum_after(nu, g);
    const double residual = f.norm();
    const double psi = kempf_ness_of(nu, g);
    result.trace.push_back({k, residual, psi});
    result.iterations = k;
    result.residual = residual;
    result.g = GroupElement(g);
    if (residual <= options.tol) {
      result.verdict = BalanceVerdict::Converged;
      return result;
    }
    const CMatrix s = g.adjoint() * g;
    if (condition_number(s) > options.divergence_condition) {
      result.verdict = BalanceVerdict::DivergedWithCertificate;
      result.certificate = divergence_certificate(nu, s);
      return result;
    }
    if (k >= options.max_iter) {
      result.verdict = BalanceVerdict::MaxIterations;
      return result;
    }

    // Psi is geodesically convex; along exp(-sF) g its first derivative at
    // s = 0 is -|F|^2 and its second is the curvature below. Backtracking
    // starts from the resulting Newton step: a fixed or doubled trial step
    // overshoots the stiff directions and the iterates zigzag.
    const double slope = residual * residual;
    const double curvature = curvature_along(nu, g, f);
    step = curvature > 0.0 && std::isfinite(slope / curvature) ? slope / curvature : std::min(4.0, 2.0 * step);
    CMatrix candidate;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      candidate = hermitian_exp(f, -step) * g;
      const double trial = kempf_ness_of(nu, candidate);
      // Below |F| ~ 1e-8 the decrease of Psi is lost to rounding; a shrinking
      // gradient with Psi flat to rounding is accepted instead.
      if (trial <= psi - kArmijo * step * slope ||
          (trial <= psi + 1e-15 * std::max(1.0, std::abs(psi)) &&
           momentum_after(nu, candidate).norm() <= (1.0 - kArmijo * step) * residual)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No decrease representable in double precision; report where we are.
      result.verdict = BalanceVerdict::MaxIterations;
      return result;
    }
    g = GroupElement(candidate).matrix();
  }
}

// Coordinates of a traceless Hermitian matrix in an orthonormal basis.
RVector coordinates(const CMatrix& h, const std::vector<CMatrix>& basis) {
  RVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    c(static_cast<Eigen::Index>(j)) = pairing(MomentumMatrix(h), basis[j]);
  }
  return c;
}

CMatrix combine(const RVector& c, const std::vector<CMatrix>& basis) {
  CMatrix out = CMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t j = 0; j < basis.size(); ++j) out += c(static_cast<Eigen::Index>(j)) * basis[j];
  return out;
}

RMatrix gram_at(const AtomicMeasure& nu, const CMatrix& g, const std::vector<CMatrix>& basis) {
  const auto count = static_cast<Eigen::Index>(basis.size());
  const auto& atoms = nu.atoms();
  return pairwise_sum<RMatrix>(
      atoms.size(),
      [&](std::size_t i) -> RMatrix {
        CVector z = g * atoms[i].point.coeffs();
        z /= z.norm();
        // Columns (Id - z z^*) A_j z: the fundamental fields at [z].
        CMatrix fields(z.size(), count);
        for (Eigen::Index j = 0; j < count; ++j) {
          const CVector az = basis[static_cast<std::size_t>(j)] * z;
          fields.col(j) = az - z * z.dot(az);
        }
        return 2.0 * atoms[i].weight * (fields.adjoint() * fields).real();
      },
      RMatrix::Zero(count, count));
}

BalanceResult newton_target(const AtomicMeasure& nu, const CMatrix& rho, double tol, int max_iter,
                            const std::optional<CMatrix>& initial) {
  const auto dim = nu.ambient_dim();
  const std::vector<CMatrix> basis = traceless_hermitian_basis(dim);
  CMatrix beta = 0.5 * (rho + rho.adjoint());
  beta.diagonal().array() -= 1.0 / static_cast<double>(dim);

  CMatrix g = initial ? GroupElement(*initial).matrix() : CMatrix::Identity(dim, dim);
  BalanceResult result = start_result(g);
  auto residual_matrix = [&](const CMatrix& gm) -> CMatrix { return momentum_after(nu, gm) - beta; };

  CMatrix r = residual_matrix(g);
  for (int k = 0;; ++k) {
    const double residual = r.norm();
    result.trace.push_back({k, residual, kempf_ness_of(nu, g)});
    result.iterations = k;
    result.residual = residual;
    result.g = GroupElement(g);
    if (residual <= tol) {
      result.verdict = BalanceVerdict::Converged;
      return result;
    }
    if (k >= max_iter) {
      result.verdict = BalanceVerdict::MaxIterations;
      return result;
    }
    const CMatrix s = g.adjoint() * g;
    if (condition_number(s) > kDivergenceCondition) {
      result.verdict = BalanceVerdict::DivergedWithCertificate;
      result.certificate = divergence_certificate(nu, s);
      return result;
    }

    const RMatrix gram = gram_at(nu, g, basis);
    const RVector c = coordinates(r, basis);
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(gram);
    const double top = eig.eigenvalues().maxCoeff();
    const bool singular = !(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1e-300));

    // Newton direction solves Gram v = -c; its merit slope is -|r|^2. The
    // gradient of 1/2 |r|^2 is Gram c.
    std::vector<RVector> directions;
    if (!singular) directions.push_back(-(eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                                          eig.eigenvectors().transpose() * c));
    directions.push_back(-(gram * c) / std::max(top, 1e-300));

    bool accepted = false;
    const double merit = 0.5 * residual * residual;
    for (const RVector& v : directions) {
      const double slope = c.dot(gram * v);  // d/ds of merit at s = 0
      if (!(slope < 0.0)) continue;
      const CMatrix a = combine(v, basis);
      double step = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
        const CMatrix candidate = GroupElement(hermitian_exp(a, step) * g).matrix();
        const CMatrix cr = residual_matrix(candidate);
        if (0.5 * cr.squaredNorm() <= merit + kArmijo * step * slope) {
          g = candidate;
          r = cr;
          accepted = true;
          break;
        }
      }
      if (accepted) break;
    }
    if (!accepted) {
      result.verdict = BalanceVerdict::MaxIterations;
      return result;
    }
  }
}

}  // namespace

void validate_target(const CMatrix& rho, Eigen::Index ambient_dim, double min_eigenvalue) {
  if (rho.rows() != ambient_dim || rho.cols() != ambient_dim) {
    throw Error(ErrorKind::NotPositiveTarget, "target has the wrong size");
  }
  if ((rho - rho.adjoint()).norm() > 1e-12 * std::max(1.0, rho.norm())) {
    throw Error(ErrorKind::NotPositiveTarget, "target is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10) {
    throw Error(ErrorKind::NotPositiveTarget, "target trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < min_eigenvalue) {
    throw Error(ErrorKind::NotPositiveTarget, "target is not positive definite");
  }
}

BalanceResult balance(const AtomicMeasure& nu, const BalanceOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (options.max_iter < 0) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 0");
  const auto dim = nu.ambient_dim();
  if (options.initial && (options.initial->rows() != dim || options.initial->cols() != dim)) {
    throw Error(ErrorKind::InvalidArgument, "initial group element has the wrong size");
  }

  bool zero_target = true;
  if (options.target_rho) {
    validate_target(*options.target_rho, dim);
    const CMatrix center = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    zero_target = (*options.target_rho - center).norm() <= std::numeric_limits<double>::epsilon();
  }
  if (!zero_target) return newton_target(nu, *options.target_rho, options.tol, options.max_iter, options.initial);

  if (auto support = degenerate_support(nu)) {
    const CMatrix g0 = options.initial ? *options.initial : CMatrix::Identity(dim, dim);
    BalanceResult result = start_result(g0);
    result.residual = momentum_after(nu, result.g.matrix()).norm();
    result.trace.push_back({0, result.residual, kempf_ness_of(nu, result.g.matrix())});
    result.verdict = BalanceVerdict::DivergedWithCertificate;
    result.certificate = std::move(support);
    return result;
  }
  return options.method == BalanceMethod::FixedPoint ? fixed_point(nu, options) : geodesic_descent(nu, options);
}

BalanceResult solve_target(const AtomicMeasure& nu, const CMatrix& rho, double tol, int max_iter,
                           const std::optional<CMatrix>& initial) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  validate_target(rho, nu.ambient_dim());
  if (classify(nu).kind != StabilityKind::Stable) throw Error(ErrorKind::NotStable, "measure is not stable");
  return newton_target(nu, rho, tol, max_iter, initial);
}

std::vector<CMatrix> traceless_hermitian_basis(Eigen::Index dim) {
  std::vector<CMatrix> basis;
  for (Eigen::Index j = 0; j + 1 < dim; ++j) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(j, j) = 1.0;
    e(j + 1, j + 1) = -1.0;
    for (const auto& b : basis) e -= pairing(MomentumMatrix(e), b) * b;
    basis.push_back(e / e.norm());
  }
  const double scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      CMatrix sym = CMatrix::Zero(dim, dim);
      sym(j, k) = scale;
      sym(k, j) = scale;
      basis.push_back(sym);
      CMatrix anti = CMatrix::Zero(dim, dim);
      anti(j, k) = Complex(0.0, scale);
      anti(k, j) = Complex(0.0, -scale);
      basis.push_back(anti);
    }
  }
  return basis;
}

RMatrix gram_operator(const AtomicMeasure& nu, const std::vector<CMatrix>& basis) {
  if (basis.empty()) return RMatrix(0, 0);
  for (const auto& a : basis) {
    if (a.rows() != nu.ambient_dim() || a.cols() != nu.ambient_dim()) {
      throw Error(ErrorKind::InvalidArgument, "basis matrix has the wrong size");
    }
  }
  const auto dim = nu.ambient_dim();
  return gram_at(nu, CMatrix::Identity(dim, dim), basis);
}

RMatrix gram_operator(const AtomicMeasure& nu, const std::vector<SpectralDirection>& basis) {
  std::vector<CMatrix> mats;
  mats.reserve(basis.size());
  for (const auto& d : basis) mats.push_back(d.matrix());
  return gram_operator(nu, mats);
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,residual,kempf_ness\n";
  char line[128];
  for (const auto& row : trace) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", row.iteration, row.residual, row.kempf_ness);
    out += line;
  }
  return out;
}

}  // namespace mbal
