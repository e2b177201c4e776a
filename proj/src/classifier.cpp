#include "mbal/classifier.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "mbal/parallel.hpp"
#include "mbal/weights.hpp"

namespace mbal {

const char* to_string(StabilityKind kind) {
  switch (kind) {
    case StabilityKind::Stable: return "Stable";
    case StabilityKind::PolystableNotStable: return "PolystableNotStable";
    case StabilityKind::SemistableNotPolystable: return "SemistableNotPolystable";
    case StabilityKind::Unstable: return "Unstable";
  }
  return "Unknown";
}

namespace {

using Mask = std::uint64_t;

std::vector<std::size_t> mask_to_indices(Mask mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) out.push_back(i);
  }
  return out;
}

double residual_norm(const CMatrix& basis, const CVector& z) {
  if (basis.cols() == 0) return z.norm();
  return (z - basis * (basis.adjoint() * z)).norm();
}

// Atom restricted to the span of an orthonormal basis, in its coordinates.
AtomicMeasure restrict_to(const AtomicMeasure& nu, const CMatrix& basis, const std::vector<std::size_t>& atoms,
                          double mass) {
  std::vector<Atom> local;
  local.reserve(atoms.size());
  for (std::size_t i : atoms) {
    const Atom& atom = nu.atoms()[i];
    local.push_back(Atom{ProjectivePoint(basis.adjoint() * atom.point.coeffs()), atom.weight / mass});
  }
  return AtomicMeasure(basis.cols() - 1, std::move(local));
}

}  // namespace

std::vector<CandidateSubspace> candidate_subspaces(const AtomicMeasure& nu, std::size_t cap, double span_tol) {
  const std::size_t m = nu.size();
  const Eigen::Index n = nu.dim();
  if (n == 1) {
    // On P^1 the proper subspaces are points; atoms are already distinct.
    std::vector<CandidateSubspace> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      out.push_back(CandidateSubspace{nu.atoms()[i].point.coeffs(), {i}, nu.atoms()[i].weight});
    }
    return out;
  }
  if (m > cap || m > 63) {
    throw Error(ErrorKind::TooManyAtoms,
                std::to_string(m) + " atoms exceed the enumeration cap of " + std::to_string(cap));
  }
  const CMatrix z = nu.point_matrix();

  // Enumerate independent atom subsets of rank <= n. Adding an atom that is
  // already in the span cannot produce a new span, so those branches are cut.
  std::vector<std::pair<Mask, CMatrix>> generated;
  std::function<void(std::size_t, Mask, const CMatrix&)> grow = [&](std::size_t start, Mask mask,
                                                                     const CMatrix& basis) {
    for (std::size_t i = start; i < m; ++i) {
      const CVector zi = z.col(static_cast<Eigen::Index>(i));
      CVector r = basis.cols() == 0 ? zi : CVector(zi - basis * (basis.adjoint() * zi));
      const double norm = r.norm();
      if (norm <= span_tol) continue;
      if (basis.cols() + 1 > n) continue;
      CMatrix extended(basis.rows(), basis.cols() + 1);
      extended << basis, r / norm;
      const Mask next = mask | (Mask{1} << i);
      generated.emplace_back(next, extended);
      grow(i + 1, next, extended);
    }
  };
  grow(0, 0, CMatrix(n + 1, 0));

  std::vector<Mask> closures(generated.size(), 0);
  parallel_for(generated.size(), [&](std::size_t k) {
    Mask closure = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (residual_norm(generated[k].second, z.col(static_cast<Eigen::Index>(i))) <= span_tol) {
        closure |= Mask{1} << i;
      }
    }
    closures[k] = closure;
  });

  std::map<Mask, Eigen::Index> unique;  // closure -> span dimension
  for (std::size_t k = 0; k < generated.size(); ++k) unique.emplace(closures[k], generated[k].second.cols());

  std::vector<CandidateSubspace> out;
  out.reserve(unique.size());
  for (const auto& [mask, span_dim] : unique) {
    CandidateSubspace c;
    c.atoms = mask_to_indices(mask);
    CMatrix members(n + 1, static_cast<Eigen::Index>(c.atoms.size()));
    for (std::size_t j = 0; j < c.atoms.size(); ++j) {
      members.col(static_cast<Eigen::Index>(j)) = z.col(static_cast<Eigen::Index>(c.atoms[j]));
      c.mass += nu.atoms()[c.atoms[j]].weight;
    }
    c.basis = orthonormal_span(members, span_tol);
    if (c.basis.cols() != span_dim) {
      // Gram-Schmidt and SVD disagree only for nearly dependent atoms; trust
      // the SVD rank but never report a full-rank "proper" subspace.
      if (c.basis.cols() > n) continue;
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CandidateSubspace& a, const CandidateSubspace& b) {
    if (a.basis.cols() != b.basis.cols()) return a.basis.cols() < b.basis.cols();
    return a.atoms < b.atoms;
  });
  return out;
}

namespace {

PolystableSplitting trivial_splitting(const AtomicMeasure& nu) {
  std::vector<std::size_t> all(nu.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto dim = nu.ambient_dim();
  return PolystableSplitting{{SplittingBlock{CMatrix::Identity(dim, dim), nu, 1.0, std::move(all)}}};
}

struct Margin {
  double value;
  std::optional<std::size_t> argmin;
};

Margin compute_margin(const AtomicMeasure& nu, const std::vector<CandidateSubspace>& candidates) {
  // P^0 has no nonempty proper subspace; SL(1) is trivial and every measure
  // on a point counts as stable.
  if (nu.dim() == 0 || candidates.empty()) return Margin{1.0, std::nullopt};
  Margin best{candidates.front().slack(nu.dim()), 0};
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double s = candidates[k].slack(nu.dim());
    if (s < best.value) best = Margin{s, k};
  }
  return best;
}

bool is_stable(const AtomicMeasure& nu, const ClassifyOptions& options) {
  if (nu.dim() == 0) return true;
  const auto candidates = candidate_subspaces(nu, options.candidate_cap, options.span_tol);
  return compute_margin(nu, candidates).value > options.tol_eq;
}

std::optional<PolystableSplitting> decompose_semistable(const AtomicMeasure& nu,
                                                        const std::vector<CandidateSubspace>& candidates,
                                                        const ClassifyOptions& options) {
  const Eigen::Index n = nu.dim();
  const std::size_t m = nu.size();

  // A block of a splitting contains every atom of its span (the spans form a
  // direct sum), so blocks are exactly the tight closed candidates. Search for
  // an exact cover of the atoms by such spans.
  std::vector<std::size_t> tight;
  std::vector<Mask> tight_masks;
  std::vector<std::optional<bool>> block_stable;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (std::abs(candidates[k].slack(n)) <= options.tol_eq) {
      tight.push_back(k);
      Mask mask = 0;
      for (std::size_t i : candidates[k].atoms) mask |= Mask{1} << i;
      tight_masks.push_back(mask);
      block_stable.emplace_back();
    }
  }

  auto stable_block = [&](std::size_t t) {
    if (!block_stable[t]) {
      const auto& c = candidates[tight[t]];
      block_stable[t] = is_stable(restrict_to(nu, c.basis, c.atoms, c.mass), options);
    }
    return *block_stable[t];
  };

  if (m > 63) throw Error(ErrorKind::TooManyAtoms, "partition search supports at most 63 atoms");
  const Mask full = (Mask{1} << m) - 1;
  std::vector<std::size_t> chosen;
  std::function<bool(Mask, const CMatrix&)> cover = [&](Mask covered, const CMatrix& span) -> bool {
    if (covered == full) return span.cols() == n + 1;
    std::size_t first = 0;
    while (covered & (Mask{1} << first)) ++first;
    for (std::size_t t = 0; t < tight.size(); ++t) {
      const Mask mask = tight_masks[t];
      if (!(mask & (Mask{1} << first)) || (mask & covered)) continue;
      const CMatrix& basis = candidates[tight[t]].basis;
      if (span.cols() + basis.cols() > n + 1) continue;
      CMatrix joined(n + 1, span.cols() + basis.cols());
      joined << span, basis;
      if (orthonormal_span(joined, options.span_tol).cols() != joined.cols()) continue;
      if (!stable_block(t)) continue;
      chosen.push_back(t);
      if (cover(covered | mask, joined)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!cover(0, CMatrix(n + 1, 0))) return std::nullopt;

  PolystableSplitting splitting;
  for (std::size_t t : chosen) {
    const auto& c = candidates[tight[t]];
    splitting.blocks.push_back(SplittingBlock{c.basis, restrict_to(nu, c.basis, c.atoms, c.mass), c.mass, c.atoms});
  }
  return splitting;
}

}  // namespace

StabilityVerdict classify(const AtomicMeasure& nu, const ClassifyOptions& options) {
  const auto candidates = candidate_subspaces(nu, options.candidate_cap, options.span_tol);
  const Margin margin = compute_margin(nu, candidates);

  StabilityVerdict verdict;
  verdict.margin = margin.value;
  if (margin.argmin) verdict.certificate = candidates[*margin.argmin];

  if (margin.value > options.tol_eq) {
    verdict.kind = StabilityKind::Stable;
    verdict.certificate.reset();
    if (nu.size() <= options.partition_cap) verdict.decomposition = trivial_splitting(nu);
    return verdict;
  }
  if (margin.value < -options.tol_eq) {
    verdict.kind = StabilityKind::Unstable;
    return verdict;
  }
  if (nu.size() > options.partition_cap) {
    throw Error(ErrorKind::TooManyAtoms, std::to_string(nu.size()) + " atoms exceed the partition cap of " +
                                             std::to_string(options.partition_cap));
  }
  verdict.decomposition = decompose_semistable(nu, candidates, options);
  verdict.kind = verdict.decomposition ? StabilityKind::PolystableNotStable : StabilityKind::SemistableNotPolystable;
  return verdict;
}

std::optional<PolystableSplitting> polystable_decompose(const AtomicMeasure& nu, const ClassifyOptions& options) {
  if (nu.size() > options.partition_cap) {
    throw Error(ErrorKind::TooManyAtoms, std::to_string(nu.size()) + " atoms exceed the partition cap of " +
                                             std::to_string(options.partition_cap));
  }
  const auto candidates = candidate_subspaces(nu, options.candidate_cap, options.span_tol);
  const Margin margin = compute_margin(nu, candidates);
  if (margin.value < -options.tol_eq) throw Error(ErrorKind::NotSemistable, "measure is unstable");
  if (margin.value > options.tol_eq) return trivial_splitting(nu);
  return decompose_semistable(nu, candidates, options);
}

AtomicMeasure assemble_polystable(const std::vector<std::pair<CMatrix, AtomicMeasure>>& blocks) {
  if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "no blocks");
  const Eigen::Index dim = blocks.front().first.rows();
  Eigen::Index total = 0;
  for (const auto& [basis, local] : blocks) {
    if (basis.rows() != dim || basis.cols() != local.ambient_dim()) {
      throw Error(ErrorKind::InvalidArgument, "block basis does not match its local measure");
    }
    total += basis.cols();
  }
  if (total != dim) throw Error(ErrorKind::InvalidArgument, "block dimensions do not add up to n+1");

  std::vector<Atom> atoms;
  for (const auto& [basis, local] : blocks) {
    const double share = static_cast<double>(basis.cols()) / static_cast<double>(dim);
    for (const auto& atom : local.atoms()) {
      atoms.push_back(Atom{ProjectivePoint(basis * atom.point.coeffs()), share * atom.weight});
    }
  }
  return AtomicMeasure(dim - 1, std::move(atoms));
}

DonaldsonConditions donaldson_conditions(const AtomicMeasure& nu, const ClassifyOptions& options) {
  const auto candidates = candidate_subspaces(nu, options.candidate_cap, options.span_tol);
  DonaldsonConditions out;
  // Every candidate has dimension <= n-1, hence sits inside some hyperplane.
  out.hyperplanes_null = std::all_of(candidates.begin(), candidates.end(),
                                     [](const CandidateSubspace& c) { return c.mass == 0.0; });
  out.subspace_bound = compute_margin(nu, candidates).value > options.tol_eq;
  return out;
}

}  // namespace mbal
