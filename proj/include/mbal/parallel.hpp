#pragma once

#include <cstddef>
#include <functional>
#include <utility>

namespace mbal {

/// Number of worker threads the library may use: MEASURE_BALANCER_THREADS if
/// set to a positive integer, else std::thread::hardware_concurrency().
unsigned max_threads();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks; each
/// index is visited exactly once, so callers writing to slot i get results that
/// do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (tree) reduction of term(0) + ... + term(count-1). The summation
/// order depends only on count, never on scheduling.
template <class T, class Term>
T pairwise_sum(std::size_t begin, std::size_t end, const Term& term, const T& zero) {
  if (end <= begin) return zero;
  if (end - begin == 1) return term(begin);
  const std::size_t mid = begin + (end - begin) / 2;
  T left = pairwise_sum<T>(begin, mid, term, zero);
  left += pairwise_sum<T>(mid, end, term, zero);
  return left;
}

template <class T, class Term>
T pairwise_sum(std::size_t count, const Term& term, const T& zero) {
  return pairwise_sum<T>(std::size_t{0}, count, term, zero);
}

}  // namespace mbal
