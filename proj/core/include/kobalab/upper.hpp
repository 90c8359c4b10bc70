#pragma once

#include <vector>

#include "kobalab/bound.hpp"
#include "kobalab/polyopt.hpp"

namespace kobalab {

enum class Strategy { ExplicitFamily, PolyOpt, BestOf };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct UpperOptions {
  Strategy strategy = Strategy::BestOf;
  PolyOptOptions poly{};
  GridParams grid{};
  /// Constant for F8 legs and pieces on GMinus; 0 selects just below the critical constant.
  double minus_constant = 0.0;
};

/// Upper bound for the Lempert function: the smallest |alpha| over verified
/// discs with phi(0) = z, phi(alpha) = w.
Bound lempert_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w, const UpperOptions& opts = {});

/// Chain z = y_0, ..., y_m = w with per-leg Lempert upper bounds.
Chain lempert_chain_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w, int m,
                          const UpperOptions& opts = {});

/// Wraps a chain as an ell^(m) (or l^(m)) bound.
Bound chain_bound(const Chain& chain, Quantity q = Quantity::LempertM);

/// Upper bound for kappa(z; X): smallest |alpha| over verified discs with phi(0) = z, alpha phi'(0) = X.
Bound kobayashi_royden_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X,
                             const UpperOptions& opts = {});

/// kappa^(m)(z; X) over decompositions X = X_1 + ... + X_m.
Bound kr_decomposed_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X, int m,
                          const UpperOptions& opts = {});

/// kappa hat as the minimum of kappa^(m) over m <= m_max (0 selects 2n + 1).
Bound kobayashi_busemann_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X, int m_max = 0,
                               const UpperOptions& opts = {});

struct PathOptions {
  int nodes = 3;                ///< interior nodes of the piecewise linear path
  int samples_per_segment = 8;  ///< trapezoid samples per segment
  int optimizer_evals = 120;    ///< Nelder-Mead budget for moving the nodes (closed-form kappa only)
};

/// Kobayashi distance upper bound: the smaller of l^(m) over explicit chains
/// (m = 2, 3) and the trapezoid integral of kappa upper bounds along a piecewise linear path.
Bound kobayashi_distance_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w,
                               const PathOptions& path = {}, const UpperOptions& opts = {});

/// Cheap kappa upper bound: closed forms and family discs through z, else the
/// largest affine disc z + zeta X / alpha found by bisection on a coarse grid.
Bound kappa_quick_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X);

}  // namespace kobalab
