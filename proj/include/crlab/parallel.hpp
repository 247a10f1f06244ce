// Deterministic data-parallel helpers. Work is split into fixed-size chunks
// accumulated in index order, then combined over a fixed pairwise tree, so
// results are identical for the serial and OpenMP paths and independent of
// the thread count.
#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace crlab {

template <class T, class Eval>
std::vector<T> parallel_map(std::size_t n, const Eval& eval, bool parallel) {
  std::vector<T> out(n);
  std::exception_ptr err = nullptr;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        out[std::size_t(i)] = eval(std::size_t(i));
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!err) err = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < n && !err; ++i) {
      try {
        out[i] = eval(i);
      } catch (...) {
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

template <class T>
T tree_combine(std::vector<T> parts, T zero) {
  if (parts.empty()) return zero;
  while (parts.size() > 1) {
    std::size_t h = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) parts[h++] = parts[i] + parts[i + 1];
    if (parts.size() % 2) parts[h++] = parts.back();
    parts.resize(h);
  }
  return parts[0];
}

inline constexpr std::size_t kReduceChunk = 1024;

// sum_{i<n} eval(i), chunked and tree-combined; bitwise reproducible
template <class T, class Eval>
T chunked_reduce(std::size_t n, const Eval& eval, T zero, bool parallel) {
  const std::size_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<T> parts(nchunks, zero);
  std::exception_ptr err = nullptr;
  auto run_chunk = [&](std::size_t c) {
    T acc = zero;
    const std::size_t lo = c * kReduceChunk, hi = std::min(n, lo + kReduceChunk);
    for (std::size_t i = lo; i < hi; ++i) acc = acc + eval(i);
    parts[c] = acc;
  };
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
      try {
        run_chunk(std::size_t(c));
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!err) err = std::current_exception();
      }
    }
  } else {
    for (std::size_t c = 0; c < nchunks && !err; ++c) {
      try {
        run_chunk(c);
      } catch (...) {
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
  return tree_combine(std::move(parts), zero);
}

}  // namespace crlab
