#include "gpvortex/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace gpv {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* e = std::getenv("GPVORTEX_THREADS")) {
      try {
        const int v = std::stoi(e);
        if (v >= 1) return std::min(v, hw);
      } catch (...) {
      }
    }
    return hw;
  }();
  return n;
}

}  // namespace

int thread_count() {
  const int o = g_override.load();
  return o > 0 ? o : env_threads();
}

void set_thread_count(int n) { g_override.store(std::max(0, n)); }

void parallel_for(int n, const std::function<void(int)>& f) {
  const int nt = std::min(thread_count(), n);
  if (nt <= 1 || n < 16) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const int lo = static_cast<int>(static_cast<long>(n) * t / nt);
    const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / nt);
    pool.emplace_back([lo, hi, &f] {
      for (int i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

double ordered_sum(const std::vector<double>& parts) {
  double t = 0.0;
  for (double x : parts) t += x;
  return t;
}

}  // namespace gpv
