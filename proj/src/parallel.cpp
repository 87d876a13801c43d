#include "kirchhoff/parallel.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include <tbb/global_control.h>

namespace kirchhoff::parallel {

namespace {

std::mutex g_control_mutex;
std::unique_ptr<tbb::global_control> g_control;

template <class T>
T pairwise(std::span<const T> terms) {
  if (terms.size() <= 8) {
    T acc{};
    for (const T& t : terms) acc += t;
    return acc;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise(terms.first(half)) + pairwise(terms.subspan(half));
}

}  // namespace

void set_thread_count(int n) {
  std::lock_guard lock(g_control_mutex);
  g_control.reset();
  if (n > 0) {
    g_control = std::make_unique<tbb::global_control>(
        tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(n));
  }
}

int thread_count() {
  return static_cast<int>(
      tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism));
}

int thread_count_from_env() {
  const char* raw = std::getenv(kThreadEnvVar);
  if (raw == nullptr) return 0;
  try {
    const int n = std::stoi(raw);
    return n > 0 ? n : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

double pairwise_sum(std::span<const double> terms) { return pairwise(terms); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> terms) {
  return pairwise(terms);
}

}  // namespace kirchhoff::parallel
