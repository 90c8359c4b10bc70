#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace kobalab {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
  int max_evals = 4000;
  double initial_step = 0.1;
  double ftol = 1e-13;  ///< stop when the simplex value spread drops below this
  double xtol = 1e-12;  ///< ... and its diameter below this
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
};

/// Nelder-Mead with dimension-adaptive coefficients (Gao & Han 2012).
SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opts = {});

/// Runs nelder_mead from every start and returns the best result. Starts are
/// processed in parallel when hardware threads are available; the result is
/// independent of scheduling (ties broken by start index).
SimplexResult multi_start(const Objective& f, const std::vector<std::vector<double>>& starts, const SimplexOptions& opts = {});

/// Calls body(i) for i in [0, count) on up to hardware_concurrency threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Seeded engine used everywhere randomness is needed.
using Rng = std::mt19937_64;

/// Scalar bisection for an increasing predicate: returns the boundary between
/// false (at lo) and true (at hi).
double bisect(const std::function<bool(double)>& is_high, double lo, double hi, int iterations = 60);

}  // namespace kobalab
