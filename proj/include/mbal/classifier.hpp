#pragma once

// Exact stability classification of atomic measures on P^n under SL(n+1,C).
//
// nu is stable (semi-stable) iff nu(L) < (dim L + 1)/(n+1) (resp. <=) for every
// proper linear subspace L. For atomic measures it suffices to test the spans
// of atom subsets: shrinking L to the span of the atoms it contains keeps
// nu(L) and does not increase dim L.

#include <cstdint>
#include <optional>
#include <vector>

#include "mbal/measure.hpp"

namespace mbal {

inline constexpr double kDefaultTolEq = 1e-9;
inline constexpr double kDefaultSpanTol = 1e-10;
inline constexpr std::size_t kDefaultCandidateCap = 16;
inline constexpr std::size_t kDefaultPartitionCap = 12;

/// A proper subspace spanned by atoms, closed under "every atom lying in it".
struct CandidateSubspace {
  CMatrix basis;                   ///< orthonormal columns
  std::vector<std::size_t> atoms;  ///< indices of all atoms contained in the span
  double mass = 0.0;               ///< nu(P(span))

  Eigen::Index projective_dim() const { return basis.cols() - 1; }
  /// (dim L + 1)/(n+1) - nu(L); negative values violate semi-stability.
  double slack(Eigen::Index n) const {
    return static_cast<double>(basis.cols()) / static_cast<double>(n + 1) - mass;
  }
};

/// Deduplicated spans of nonempty atom subsets with projective dimension <= n-1.
/// Ordered by dimension, then by atom set. Throws TooManyAtoms above cap; on
/// P^1 the candidates are the atoms themselves and no cap applies.
std::vector<CandidateSubspace> candidate_subspaces(const AtomicMeasure& nu,
                                                   std::size_t cap = kDefaultCandidateCap,
                                                   double span_tol = kDefaultSpanTol);

struct SplittingBlock {
  CMatrix basis;  ///< orthonormal basis of V_j (columns)
  AtomicMeasure measure;  ///< restriction, expressed in the coordinates of basis
  double mass = 0.0;
  std::vector<std::size_t> atoms;  ///< atom indices of the parent measure
};

/// C^{n+1} = V_0 + ... + V_r with nu = sum_j dim V_j/(n+1) nu_j, nu_j stable.
struct PolystableSplitting {
  std::vector<SplittingBlock> blocks;
};

enum class StabilityKind { Stable, PolystableNotStable, SemistableNotPolystable, Unstable };

const char* to_string(StabilityKind kind);

struct StabilityVerdict {
  StabilityKind kind = StabilityKind::Unstable;
  double margin = 0.0;
  std::optional<CandidateSubspace> certificate;
  std::optional<PolystableSplitting> decomposition;
};

struct ClassifyOptions {
  double tol_eq = kDefaultTolEq;
  std::size_t candidate_cap = kDefaultCandidateCap;
  std::size_t partition_cap = kDefaultPartitionCap;
  double span_tol = kDefaultSpanTol;
};

StabilityVerdict classify(const AtomicMeasure& nu, const ClassifyOptions& options = {});

/// Splitting into stable blocks of mass dim V_j/(n+1), or nullopt if nu is
/// semi-stable but not polystable. A stable nu yields one block.
/// Throws NotSemistable if nu is unstable and TooManyAtoms above the caps.
std::optional<PolystableSplitting> polystable_decompose(const AtomicMeasure& nu,
                                                        const ClassifyOptions& options = {});

/// Inverse of decomposition: sum_j dim V_j/(n+1) (basis_j)_* nu_j, where each
/// local measure lives on P(V_j) in the coordinates of basis_j (any basis, not
/// necessarily orthonormal). The bases must together span C^{n+1} as a direct
/// sum.
AtomicMeasure assemble_polystable(const std::vector<std::pair<CMatrix, AtomicMeasure>>& blocks);

struct DonaldsonConditions {
  bool hyperplanes_null = false;   ///< nu(H) = 0 for every hyperplane H
  bool subspace_bound = false;     ///< nu(L)/(dim L+1) < 1/(n+1) for proper L
};

DonaldsonConditions donaldson_conditions(const AtomicMeasure& nu, const ClassifyOptions& options = {});

}  // namespace mbal
