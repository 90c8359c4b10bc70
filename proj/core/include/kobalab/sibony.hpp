#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "kobalab/bound.hpp"
#include "kobalab/cpoint.hpp"

namespace kobalab {

/// Candidate for the Sibony metric of GPlain(mu) at p_eps:
///
///   u = max(log(f(z1) + |z'|^2), log(L |z'|^(2+alpha))) - L'   for |z'| <= c1 eps^(1/mu)
///   u = log(L |z'|^(2+alpha)) - L'                              for |z'| >= (c1/2) eps^(1/mu)
///
/// with f(zeta) = eps^(2/mu) |(zeta + eps)/(zeta - eps)|^2. The test function is e^u.
struct CandidateFunction {
  double mu = 2.0;
  double eps = 0.01;
  double alpha = 1.0;
  double c1 = 0.0;  ///< |z'| <= c1 eps^(1/mu) and z in G imply Re z1 <= eps/2
  double c2 = 0.0;  ///< f + |z'|^2 <= c2 eps^(2/mu) on the collar
  double c3 = 0.0;  ///< |z'|^(2+alpha) >= c3 eps^((2+alpha)/mu) on the collar
  double L = 0.0;
  double L_prime = 0.0;
  std::size_t dim = 2;

  double collar_inner() const;
  double collar_outer() const;
  /// Radius of the ball around p_eps on which the f-branch is the larger one.
  double smooth_radius() const;

  double f(Complex z1) const;
  double log_f_branch(const CPoint& z) const;       ///< log(f(z1) + |z'|^2)
  double log_radial_branch(const CPoint& z) const;  ///< log(L |z'|^(2+alpha))
  double u(const CPoint& z) const;
  double value(const CPoint& z) const { return std::exp(u(z)); }

  /// Levi form of e^u at p_eps: e^(-L') (f_{zeta zeta-bar}(-eps) |X1|^2 + |X'|^2).
  double levi_at_base(const CPoint& X) const;
};

/// Closed-form d^2 f / dzeta dzeta-bar = eps^(2/mu) * 4 eps^2 / |zeta - eps|^4; equals eps^(2/mu - 2) / 4 at -eps.
double f_levi(double mu, double eps, Complex zeta);

struct SamplingOptions {
  std::size_t samples = 10000;
  unsigned seed = 1;
};

/// Largest c with |z'| <= c eps^(1/mu), z in GPlain(mu, dim) => Re z1 <= eps/2,
/// by bisection on the sampled implication.
double find_c1(double mu, double eps, std::size_t dim = 2, const SamplingOptions& opts = {});

/// Builds the candidate with the collar constants and checks admissibility;
/// throws ConstructionError with a witness if any sampled check fails.
/// c1 = 0 selects find_c1.
CandidateFunction sibony_candidate(double mu, double eps, double alpha = 1.0, double c1 = 0.0, std::size_t dim = 2,
                                   const SamplingOptions& opts = {});

/// Gluing exponent 1 / log(1/eps), which keeps e^(-L') bounded as eps -> 0.
double adaptive_alpha(double eps);

struct AdmissibilityReport {
  bool ok = false;
  std::size_t samples = 0;
  double max_u = 0.0;              ///< sup of u over the sample (must be <= 0)
  double min_dominance = 0.0;      ///< min over collar samples of radial minus f-branch logs (must be >= 0)
  double min_eigen_relative = 0.0; ///< min eigenvalue of the complex Hessian of u over max(1, trace)
  std::size_t seam_points = 0;     ///< excluded from the Hessian check
  std::string failure;
  CPoint witness;
};

AdmissibilityReport check_admissibility(const CandidateFunction& c, const SamplingOptions& opts = {});

/// Real function on C^n with an optional closed-form Levi form.
struct ScalarField {
  std::function<double(const CPoint&)> eval;
  std::function<double(const CPoint&, const CPoint&)> closed_levi;
  std::string name;
};

/// f(z1) + |z'|^2 for the candidate's parameters; carries the closed-form Levi form.
ScalarField f_branch(const CandidateFunction& c);

struct LeviEvaluation {
  CPoint point;
  CPoint direction;
  double value = 0.0;
  std::string method;  ///< "closed-form" or "finite-difference"
};

/// Levi form d d-bar fn (z)(X, X-bar). Uses the closed form when available unless
/// force_fd; otherwise 1/4 of the second derivatives along X and iX by central
/// differences with h = 1e-5 * scale (scale 0 selects |z|, or 1 at the origin), one Richardson step.
LeviEvaluation levi_form(const ScalarField& fn, const CPoint& z, const CPoint& X, bool force_fd = false,
                         double scale = 0.0);

/// max over admissible candidates of (Levi form of the test function at p_eps)^(1/2).
/// Candidates: alpha = 1, alpha = adaptive_alpha(eps), and |z'|^2 / (n - 1).
Bound sibony_lower(double mu, double eps, const CPoint& X, const SamplingOptions& opts = {});

}  // namespace kobalab
