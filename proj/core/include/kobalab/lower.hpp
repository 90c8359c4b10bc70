#pragma once

#include "kobalab/bound.hpp"
#include "kobalab/domains.hpp"

namespace kobalab {

/// Pseudohyperbolic distance; throws ArgumentError unless |zeta|, |eta| < 1.
double mobius(Complex zeta, Complex eta);

/// max_j m(z_j / r, w_j / r) over coordinate projections onto the disc of
/// radius r containing the domain's j-th coordinate. Valid for ell^(m), every m.
Bound projection_lower(const DomainSpec& domain, const CPoint& z, const CPoint& w);

/// max_j |X_j| r / (r^2 - |z_j|^2), the infinitesimal projection bound.
Bound projection_kr_lower(const DomainSpec& domain, const CPoint& z, const CPoint& X);

/// beta with psi(C beta^2) = eps, by bisection to relative 1e-12.
double beta_eps(const ModulusOfContinuity& psi, double eps, double C);

/// The radius beta of the square-root argument: (2 beta^2)^mu = eps for the
/// G models, psi(2 (n - 1) beta^2) = eps for GPsi.
double sqrt_trick_beta(const DomainSpec& domain, double eps);

/// Lower bound for ell(p_delta, p_eps) on GPlain, GTilde, GMinus (mu > 1/2)
/// and GPsi, from the square-root substitution and the Schwarz-Pick lemma.
Bound sqrt_trick_lower(const DomainSpec& domain, double delta, double eps);

/// Lower bound for kappa(p_eps; (1, 0, ..., 0)) from the Schwarz lemma
/// applied to the same square-root map.
Bound sqrt_trick_kr_lower(const DomainSpec& domain, double eps);

/// gap_lower * inner_lower, for gap_lower in (0, 1].
double localize_lower(double gap_lower, double inner_lower);

}  // namespace kobalab
