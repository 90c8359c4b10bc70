#include "kobalab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <exception>
#include <mutex>
#include <thread>

namespace kobalab {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opts) {
  const std::size_t n = x0.size();
  SimplexResult result;
  if (n == 0) {
    result.value = safe_eval(f, x0);
    result.evals = 1;
    result.x = std::move(x0);
    return result;
  }
  const double nd = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / nd;
  const double contract = 0.75 - 1.0 / (2.0 * nd);
  const double shrink = 1.0 - 1.0 / nd;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = x0[i] != 0.0 ? opts.initial_step * std::max(1.0, std::abs(x0[i])) : opts.initial_step;
    simplex[i + 1][i] += step;
  }
  std::vector<double> values(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = safe_eval(f, simplex[i]);
    ++evals;
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
    if (std::abs(values[worst] - values[best]) <= opts.ftol && diameter <= opts.xtol) break;
    if (diameter <= opts.xtol * 1e-3) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / nd;
    }
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + reflect * (centroid[k] - simplex[worst][k]);
    const double fr = safe_eval(f, trial);
    ++evals;

    if (fr < values[best]) {
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + expand * (trial[k] - centroid[k]);
      const double fe = safe_eval(f, trial2);
      ++evals;
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    for (std::size_t k = 0; k < n; ++k)
      trial2[k] = outside ? centroid[k] + contract * (trial[k] - centroid[k])
                          : centroid[k] + contract * (simplex[worst][k] - centroid[k]);
    const double fc = safe_eval(f, trial2);
    ++evals;
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + shrink * (simplex[i][k] - simplex[best][k]);
      values[i] = safe_eval(f, simplex[i]);
      ++evals;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  result.evals = evals;
  return result;
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = inside_parallel_region ? 1 : std::min(hw, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::mutex error_lock;
  std::exception_ptr error;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      inside_parallel_region = true;
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard g(error_lock);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

SimplexResult multi_start(const Objective& f, const std::vector<std::vector<double>>& starts, const SimplexOptions& opts) {
  std::vector<SimplexResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { results[i] = nelder_mead(f, starts[i], opts); });
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (auto& r : results) {
    best.evals += r.evals;
    if (r.value < best.value) {
      const int evals = best.evals;
      best = std::move(r);
      best.evals = evals;
    }
  }
  return best;
}

double bisect(const std::function<bool(double)>& is_high, double lo, double hi, int iterations) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (is_high(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace kobalab
