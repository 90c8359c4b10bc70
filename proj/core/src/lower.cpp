#include "kobalab/lower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace kobalab {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Radius of the disc containing every coordinate of the domain.
double coordinate_radius(const DomainSpec& d) {
  switch (d.kind()) {
    case DomainKind::Punctured: return coordinate_radius(d.base());
    case DomainKind::QuadImage: return d.quad().radius;
    default: return 1.0;
  }
}

Bound lower(Quantity q, double value, std::string method) {
  Bound b;
  b.quantity = q;
  b.value = value;
  b.direction = Direction::Lower;
  b.grade = Grade::Certified;
  b.method = std::move(method);
  return b;
}

bool sqrt_trick_domain(const DomainSpec& d) {
  switch (d.kind()) {
    case DomainKind::GPlain:
    case DomainKind::GTilde:
    case DomainKind::GMinus: return d.mu() > 0.5;
    case DomainKind::GPsi: return true;
    default: return false;
  }
}

// Real point base with Re phi_1 < base on the real axis of the image of D(0, beta).
double sqrt_base(const DomainSpec& d, double eps) {
  if (d.kind() == DomainKind::GPsi) return eps;
  return static_cast<double>(d.dim() - 1) * eps;
}

void require_sqrt_trick(const DomainSpec& d, double eps) {
  if (!sqrt_trick_domain(d))
    throw CapabilityError("square-root lower bound needs GPlain, GTilde or GMinus with mu > 1/2, or GPsi; got " +
                          d.describe());
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0, 1)");
}

}  // namespace

double mobius(Complex zeta, Complex eta) {
  if (!(std::abs(zeta) < 1.0 && std::abs(eta) < 1.0)) throw ArgumentError("mobius: arguments must lie in the open unit disc");
  return pseudo_hyperbolic(zeta, eta);
}

Bound projection_lower(const DomainSpec& domain, const CPoint& z, const CPoint& w) {
  if (!contains(domain, z).inside) throw ArgumentError("z is not in " + domain.describe());
  if (!contains(domain, w).inside) throw ArgumentError("w is not in " + domain.describe());
  const double r = coordinate_radius(domain);
  Bound b = lower(Quantity::Lempert, 0.0, "projection");
  std::size_t arg = 0;
  for (std::size_t j = 0; j < z.dim(); ++j) {
    const double m = mobius(z[j] / r, w[j] / r);
    if (m > b.value) {
      b.value = m;
      arg = j;
    }
  }
  b.derivation = {"coordinate projections z -> z_j / " + fmt(r) + " map the domain into the unit disc",
                  "pseudohyperbolic distance is contracted; best coordinate j = " + std::to_string(arg + 1),
                  "valid for ell^(m) for every m by the triangle inequality for m"};
  return b;
}

Bound projection_kr_lower(const DomainSpec& domain, const CPoint& z, const CPoint& X) {
  if (!contains(domain, z).inside) throw ArgumentError("z is not in " + domain.describe());
  z.require_same_dim(X);
  const double r = coordinate_radius(domain);
  Bound b = lower(Quantity::KR, 0.0, "projection");
  for (std::size_t j = 0; j < z.dim(); ++j)
    b.value = std::max(b.value, std::abs(X[j]) * r / (r * r - std::norm(z[j])));
  b.derivation = {"Schwarz-Pick for the coordinate projections onto the disc of radius " + fmt(r)};
  return b;
}

double beta_eps(const ModulusOfContinuity& psi, double eps, double C) {
  if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
  if (!(C > 0.0)) throw ArgumentError("C must be positive");
  double hi = 1.0;
  while (psi(hi) < eps) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) < eps ? lo : hi) = mid;
  }
  // x = C beta^2 with psi(x) = eps; hi keeps psi(C beta^2) >= eps.
  return std::sqrt(hi / C);
}

double sqrt_trick_beta(const DomainSpec& domain, double eps) {
  require_sqrt_trick(domain, eps);
  if (domain.kind() == DomainKind::GPsi)
    return beta_eps(domain.psi(), eps, 2.0 * static_cast<double>(domain.dim() - 1));
  return std::sqrt(std::pow(eps, 1.0 / domain.mu()) / 2.0);
}

Bound sqrt_trick_lower(const DomainSpec& domain, double delta, double eps) {
  require_sqrt_trick(domain, eps);
  if (!(delta > 0.0 && delta <= eps)) throw ArgumentError("delta must lie in (0, eps]");
  const double beta = sqrt_trick_beta(domain, eps);
  if (!(beta < 1.0)) throw RangeError("beta >= 1: eps too large for the square-root argument");
  const double base = sqrt_base(domain, eps);
  const double a = std::sqrt(base + eps), b = std::sqrt(base + delta);
  const double factor = (eps - delta) / ((a + b) * (a + b));
  Bound out = lower(Quantity::Lempert, beta * factor, "sqrt-trick");
  out.derivation = {
      "beta = " + fmt(beta) + "; for |zeta| <= beta the tail coordinates are at most 2 beta^2",
      "phi_1(D(0, beta)) avoids [" + fmt(base) + ", oo), where f(xi) = -(" + fmt(base) +
          " - xi)^(1/2) maps into the left half plane",
      "f(-eps) = -" + fmt(a) + ", f(-delta) = -" + fmt(b),
      "alpha / beta >= (eps - delta) / (" + fmt(a) + " + " + fmt(b) + ")^2 = " + fmt(factor),
      "alpha >= " + fmt(beta * factor)};
  return out;
}

Bound sqrt_trick_kr_lower(const DomainSpec& domain, double eps) {
  require_sqrt_trick(domain, eps);
  const double beta = sqrt_trick_beta(domain, eps);
  if (!(beta < 1.0)) throw RangeError("beta >= 1: eps too large for the square-root argument");
  const double a2 = sqrt_base(domain, eps) + eps;
  Bound out = lower(Quantity::KR, beta / (4.0 * a2), "sqrt-trick");
  out.derivation = {"beta = " + fmt(beta),
                    "g(z) = (f(phi_1(beta z)) + a) / (f(phi_1(beta z)) - a), a = " + fmt(std::sqrt(a2)) +
                        ", maps D to D with g(0) = 0",
                    "|g'(0)| = beta |lambda| f'(-eps) / (2a) = beta |lambda| / (4 a^2) <= 1",
                    "kappa(p_eps; (1, 0)) >= beta / (4 a^2) = " + fmt(out.value)};
  return out;
}

double localize_lower(double gap_lower, double inner_lower) {
  if (!(gap_lower > 0.0 && gap_lower <= 1.0)) throw ArgumentError("gap lower bound must lie in (0, 1]");
  if (!(inner_lower >= 0.0)) throw ArgumentError("inner lower bound must be nonnegative");
  return gap_lower * inner_lower;
}

}  // namespace kobalab
