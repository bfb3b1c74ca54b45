#include "prestrain/jet.hpp"

#include <thread>

namespace prestrain {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRESTRAIN_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

namespace {

// Contiguous chunking shared by both parallel entry points so that the
// reduction order depends only on (n, threads).
std::vector<std::pair<int, int>> chunk_ranges(int n, int threads) {
  std::vector<std::pair<int, int>> ranges;
  int chunk = (n + threads - 1) / threads;
  for (int begin = 0; begin < n; begin += chunk)
    ranges.emplace_back(begin, std::min(begin + chunk, n));
  return ranges;
}

}  // namespace

double parallel_sum(int n, const std::function<double(int)>& term, int threads) {
  threads = resolve_thread_count(threads);
  if (n <= 0) return 0.0;
  if (threads == 1 || n < 64) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += term(i);
    return acc;
  }
  auto ranges = chunk_ranges(n, threads);
  std::vector<double> partial(ranges.size(), 0.0);
  std::vector<std::thread> pool;
  for (size_t c = 0; c < ranges.size(); ++c) {
    pool.emplace_back([&, c] {
      double acc = 0.0;
      for (int i = ranges[c].first; i < ranges[c].second; ++i) acc += term(i);
      partial[c] = acc;
    });
  }
  for (auto& t : pool) t.join();
  double total = 0.0;
  for (double p : partial) total += p;  // fixed chunk order
  return total;
}

void parallel_for(int n, const std::function<void(int)>& fn, int threads) {
  threads = resolve_thread_count(threads);
  if (n <= 0) return;
  if (threads == 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  auto ranges = chunk_ranges(n, threads);
  std::vector<std::thread> pool;
  for (auto [begin, end] : ranges) {
    pool.emplace_back([&, begin, end] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("line fit needs at least two samples");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw NumericalError("degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (size_t i = 0; i < x.size(); ++i)
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y[i] - fit.slope * x[i] - fit.intercept));
  return fit;
}

}  // namespace prestrain
