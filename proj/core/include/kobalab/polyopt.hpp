#pragma once

#include <optional>
#include <vector>

#include "kobalab/discs.hpp"

namespace kobalab {

struct PolyOptOptions {
  int degree = 6;
  int restarts = 32;
  unsigned seed = 1;
  /// Screening: every restart runs these penalty stages on the coarse grid.
  std::vector<double> screen_weights = {1e2, 1e4};
  int screen_evals = 600;
  std::vector<double> screen_radii = {0.2, 0.5, 0.8, 1.0};
  int screen_angles = 48;
  /// Polishing: the best screened restarts shrink alpha by bisection, restoring
  /// feasibility on the fine grid by Levenberg-Marquardt at each step.
  int polish_count = 2;
  int bisection_steps = 24;
  int max_evals = 1000;  ///< residual evaluations per feasibility restoration
  int exchange_rounds = 6;
  std::vector<double> penalty_radii = {0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0};
  int penalty_angles = 128;
  /// For PolyDisc and Ball the margin is subharmonic along discs, so only the
  /// unit circle is penalized, with this many nodes.
  int circle_angles = 128;
  double buffer = 1e-4;
  /// Incumbents re-verified on the full grid, best first.
  int verify_candidates = 4;
  GridParams verify{};
};

struct PolyOptResult {
  double alpha = 1.0;
  AnalyticDisc disc;
  ContainmentReport report;
  int evals = 0;
};

/// Searches polynomial discs phi(z) = z0 + zeta (w - z0)/alpha + zeta (zeta - alpha) P(zeta)
/// minimizing alpha; only grid-verified discs are returned.
std::optional<PolyOptResult> optimize_lempert_disc(const DomainSpec& domain, const CPoint& z, const CPoint& w,
                                                   const PolyOptOptions& opts = {});

/// Same for phi(z) = z0 + zeta X/alpha + zeta^2 P(zeta), so that alpha phi'(0) = X.
/// On the polydisc both searches run in the coordinatewise automorphism charts
/// centred at z0, with z0, w and X transported accordingly.
std::optional<PolyOptResult> optimize_kr_disc(const DomainSpec& domain, const CPoint& z, const CPoint& X,
                                              const PolyOptOptions& opts = {});

}  // namespace kobalab
