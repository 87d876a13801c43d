#pragma once

// Parallel map and deterministic reductions.
//
// Every parallel loop in the toolkit writes into index-addressed slots and is
// followed by a serial pairwise reduction over the slot index, so results are
// bit-identical for any thread count.

#include <complex>
#include <cstddef>
#include <span>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace kirchhoff::parallel {

/// Environment variable consulted by the CLI for the worker count.
inline constexpr const char* kThreadEnvVar = "KIRCHHOFF_THREADS";

/// Caps the number of worker threads (n >= 1). n == 0 restores the default.
void set_thread_count(int n);

/// Current cap (the hardware concurrency when no cap is set).
int thread_count();

/// Reads kThreadEnvVar; returns 0 when unset or unparsable.
int thread_count_from_env();

template <class F>
void for_each_index(std::size_t n, F&& body, std::size_t grain = 16) {
  if (n <= grain) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, grain),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                    });
}

/// Pairwise tree sum over the index order: ranges are halved recursively down to
/// blocks of at most 8 terms, which are summed left to right.
double pairwise_sum(std::span<const double> terms);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> terms);

}  // namespace kirchhoff::parallel
