#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "kobalab/discs.hpp"
#include "kobalab/optimize.hpp"

namespace kobalab {

namespace {

struct Outcome {
  bool ok = false;
  std::string inequality;
  std::string reason;
};

Outcome pass(std::string id) { return {true, std::move(id), {}}; }
Outcome fail(std::string why) { return {false, {}, std::move(why)}; }

// Domains D for which D contains the model domain (kind, mu) on which a family was proved.
bool includes(const DomainSpec& d, DomainKind native, double native_mu) {
  switch (d.kind()) {
    case DomainKind::PolyDisc: return true;
    case DomainKind::GPlain:
    case DomainKind::GTilde:
      return (native == DomainKind::GPlain || native == DomainKind::GMinus) && d.mu() <= native_mu;
    case DomainKind::GMinus: return native == DomainKind::GMinus && d.mu() <= native_mu;
    default: return false;
  }
}

std::optional<DomainKind> native_kind(Family f) {
  switch (f) {
    case Family::F4: return std::nullopt;
    case Family::F8: return DomainKind::GMinus;
    default: return DomainKind::GPlain;
  }
}

Outcome within(const DomainSpec& d, DomainKind native, double native_mu, std::string id) {
  if (includes(d, native, native_mu)) return pass(std::move(id));
  return fail("target " + d.describe() + " does not contain " + std::string(to_string(native)) +
              "(mu=" + std::to_string(native_mu) + ")");
}

Outcome check_explicit(const ExplicitRep& e, const DomainSpec& d) {
  const auto& p = e.params;
  switch (e.family) {
    case Family::F1: {
      // z1 is constant and the tail term is smallest at z = 0.
      if (!(std::abs(p.c) < 1.0)) return fail("|c| >= 1");
      CPoint at(p.dim);
      at[0] = p.c;
      if (!(d.defining_margin(at.coords()) < 0.0)) return fail("(c, 0) is not in the domain");
      return pass("vertical-constant");
    }
    case Family::F2:
      if (!(p.eps + std::sqrt(p.eps) < 1.0)) return fail("eps + sqrt(eps) >= 1");
      return within(d, DomainKind::GPlain, 2.0, "sqrt-square");
    case Family::F3: {
      const double mu = p.mu;
      if (!(p.delta > 0.0 && p.delta <= p.eps)) return fail("delta outside (0, eps]");
      if (!(f3_alpha(p.eps, p.delta, mu) < 1.0)) return fail("alpha >= 1");
      if (!(p.eps + std::pow(p.eps, 1.0 - 1.0 / (2.0 * mu)) < 1.0)) return fail("first coordinate leaves the unit disc");
      if (mu > 0.5 && mu <= 1.0) return within(d, DomainKind::GPlain, mu, "tau-case-1");
      if (mu > 1.0) {
        const double c = 1.0 - 1.0 / (2.0 * mu);
        if (!(p.delta > c * p.eps)) return fail("delta <= (1 - 1/(2 mu)) eps");
        const double slope = 2.0 * mu * std::pow(c, mu - 1.0) * (1.0 - 1.0 / (4.0 * mu) + std::pow(c, mu));
        if (!(slope > 1.0)) return fail("right-hand side derivative bound <= 1");
        return within(d, DomainKind::GPlain, mu, "tau-case-2.1");
      }
      return fail("no reduction for mu <= 1/2");
    }
    case Family::F4: return fail("no analytic reduction for F4");
    case Family::F5:
      if (!(p.eps > 0.0 && p.eps < 1.0 && p.delta > 0.0 && p.delta < 1.0)) return fail("eps, delta outside (0, 1)");
      return within(d, DomainKind::GPlain, 0.5, "mobius-product-square");
    case Family::F6:
      if (!(p.eps > 0.0 && p.eps < 1.0)) return fail("eps outside (0, 1)");
      return within(d, DomainKind::GPlain, 1.0, "linear-slack");
    case Family::F7: {
      const double mu = p.mu;
      if (!(mu > 1.0)) return fail("mu <= 1");
      const double C = p.C > 0.0 ? p.C : f7_default_constant(mu);
      const double k = C * std::pow(p.eps, 1.0 - 1.0 / mu);
      if (!(p.eps + k < 1.0)) return fail("first coordinate leaves the unit disc");
      // F(x) = x^mu - k x + eps is convex with its minimum at x_mu.
      const double x = std::min(1.0, std::pow(k / mu, 1.0 / (mu - 1.0)));
      const double fmin = std::pow(x, mu) - k * x + p.eps;
      if (!(fmin > 0.0)) return fail("F_mu(x_mu) <= 0");
      return within(d, DomainKind::GPlain, mu, "convex-minimum");
    }
    case Family::F8: {
      const double mu = p.mu;
      if (!(mu >= 1.0)) return fail("mu < 1");
      const double C = p.C > 0.0 ? p.C : f8_default_constant();
      const double k = C * std::pow(p.eps, 1.0 - 1.0 / mu);
      if (!(p.eps + k < 1.0)) return fail("first coordinate leaves the unit disc");
      // With s = |x| + |y| <= sqrt(2)|z| it suffices that g(s) = eps + (s/sqrt2)^mu - k s > 0 on [0, sqrt2].
      const double r2 = std::numbers::sqrt2;
      auto g = [&](double s) { return p.eps + std::pow(s / r2, mu) - k * s; };
      double gmin = std::min(g(0.0), g(r2));
      if (mu > 1.0) {
        const double s = r2 * std::pow(r2 * k / mu, 1.0 / (mu - 1.0));
        if (s < r2) gmin = std::min(gmin, p.eps - k * s * (1.0 - 1.0 / mu));
      }
      if (!(gmin > 0.0)) return fail("g(s*) <= 0");
      return within(d, DomainKind::GMinus, mu, "minus-convex-minimum");
    }
  }
  return fail("unknown family");
}

Outcome check_mobius(const MobiusRep& m) {
  for (const auto& c : m.coords) {
    if (!(std::abs(c.center) < 1.0)) return fail("Mobius centre outside the unit disc");
    if (!(std::abs(c.rotation) <= 1.0)) return fail("Mobius rotation factor exceeds 1");
    for (const auto& a : c.zeros)
      if (!(std::abs(a) < 1.0)) return fail("Blaschke zero outside the unit disc");
  }
  return pass("mobius-product");
}

int degree(const PolynomialRep& p) {
  int deg = 0;
  for (const auto& row : p.coeffs)
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] != Complex{}) deg = std::max(deg, static_cast<int>(k));
  return deg;
}

Complex coeff(const std::vector<Complex>& row, std::size_t k) { return k < row.size() ? row[k] : Complex{}; }

Outcome check_polynomial(const PolynomialRep& p, const DomainSpec& d) {
  const int deg = degree(p);
  if (!p.chart.empty()) {
    // Each chart maps the unit disc onto itself, so the inner polynomial must stay in the polydisc.
    if (d.kind() != DomainKind::PolyDisc || deg > 1) return fail("no analytic verifier for charted polynomial discs");
    for (const auto& row : p.coeffs)
      if (!(std::abs(coeff(row, 0)) + std::abs(coeff(row, 1)) <= 1.0)) return fail("|a_j| + |b_j| > 1");
    return pass("charted-affine-max-modulus");
  }
  if (deg == 0) {
    CPoint at(p.coeffs.size());
    for (std::size_t j = 0; j < p.coeffs.size(); ++j) at[j] = coeff(p.coeffs[j], 0);
    if (!(d.defining_margin(at.coords()) < 0.0)) return fail("constant point is not in the domain");
    return pass("constant-point");
  }
  if (deg == 1 && d.kind() == DomainKind::PolyDisc) {
    for (const auto& row : p.coeffs)
      if (!(std::abs(coeff(row, 0)) + std::abs(coeff(row, 1)) <= 1.0)) return fail("|a_j| + |b_j| > 1");
    return pass("affine-max-modulus");
  }
  if (deg == 1 && d.kind() == DomainKind::Ball) {
    // sup over the closed disc of |a + b z|^2 is |a|^2 + 2|<a, b>| + |b|^2.
    double aa = 0.0, bb = 0.0;
    Complex ab{};
    for (const auto& row : p.coeffs) {
      aa += std::norm(coeff(row, 0));
      bb += std::norm(coeff(row, 1));
      ab += coeff(row, 0) * std::conj(coeff(row, 1));
    }
    if (!(aa + 2.0 * std::abs(ab) + bb <= 1.0)) return fail("affine disc leaves the ball");
    return pass("affine-ball-slice");
  }
  return fail("no analytic verifier for polynomial discs of degree " + std::to_string(deg));
}

Outcome check(const AnalyticDisc& disc, const DomainSpec& d) {
  if (const auto* e = std::get_if<ExplicitRep>(&disc.rep())) return check_explicit(*e, d);
  if (const auto* m = std::get_if<MobiusRep>(&disc.rep())) return check_mobius(*m);
  if (const auto* p = std::get_if<PolynomialRep>(&disc.rep())) return check_polynomial(*p, d);
  return fail("no analytic verifier");
}

struct RingResult {
  double worst = -std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  Complex worst_zeta{};
};

struct Scan {
  GridStats stats;
  std::optional<RingResult> first_violation;
};

std::vector<double> ring_radii(const GridParams& g) {
  std::vector<double> radii;
  if (g.include_center) radii.push_back(0.0);
  for (int k = 1; k <= g.rings; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
  for (int j = 1; j <= g.interior_linear; ++j) radii.push_back(j / 32.0);
  for (int k = 6; k < 6 + g.interior_geometric; ++k) radii.push_back(std::ldexp(1.0, -k));
  return radii;
}

// With stop_early the scan gives up after the first ring holding a violation;
// the statistics are then partial.
Scan scan(const AnalyticDisc& disc, const DomainSpec& domain, const GridParams& g, bool stop_early = false) {
  const double tau = g.tau > 0.0 ? g.tau : containment_tolerance(domain);
  const std::vector<double> radii = ring_radii(g);
  std::vector<RingResult> res(radii.size());
  std::vector<Complex> roots(static_cast<std::size_t>(g.angles));
  for (int a = 0; a < g.angles; ++a) roots[a] = std::polar(1.0, 2.0 * std::numbers::pi * a / g.angles);
  std::atomic<bool> violated = false;
  parallel_for(radii.size(), [&](std::size_t i) {
    if (stop_early && violated.load(std::memory_order_relaxed)) return;
    RingResult rr;
    const double r = radii[i];
    const int n = r == 0.0 ? 1 : g.angles;
    for (int a = 0; a < n; ++a) {
      const Complex z = r * roots[a];
      const CPoint w = disc.eval_unchecked(z);
      double m = domain.defining_margin(w.coords());
      if (!std::isfinite(m)) m = std::numeric_limits<double>::infinity();
      if (m > rr.worst) {
        rr.worst = m;
        rr.worst_zeta = z;
      }
      rr.best = std::min(rr.best, m);
    }
    if (rr.worst > -tau) violated.store(true, std::memory_order_relaxed);
    res[i] = rr;
  });
  Scan s;
  s.stats.rings = static_cast<int>(radii.size());
  s.stats.angles = g.angles;
  s.stats.tau = tau;
  for (double r : radii) s.stats.samples += r == 0.0 ? 1 : g.angles;
  s.stats.worst_margin = -std::numeric_limits<double>::infinity();
  s.stats.best_margin = std::numeric_limits<double>::infinity();
  for (const auto& rr : res) {
    if (rr.worst > s.stats.worst_margin) {
      s.stats.worst_margin = rr.worst;
      s.stats.worst_zeta = rr.worst_zeta;
    }
    s.stats.best_margin = std::min(s.stats.best_margin, rr.best);
    if (!s.first_violation && rr.worst > -tau) s.first_violation = rr;
  }
  return s;
}

void check_dims(const AnalyticDisc& disc, const DomainSpec& domain) {
  if (disc.dim() != domain.dim())
    throw ArgumentError("disc dimension " + std::to_string(disc.dim()) + " does not match domain dimension " +
                        std::to_string(domain.dim()));
}

}  // namespace

bool has_analytic_verifier(const AnalyticDisc& disc, const DomainSpec& domain) {
  if (std::holds_alternative<MobiusRep>(disc.rep())) return domain.kind() == DomainKind::PolyDisc;
  if (const auto* p = std::get_if<PolynomialRep>(&disc.rep())) {
    const int deg = degree(*p);
    if (!p->chart.empty()) return deg <= 1 && domain.kind() == DomainKind::PolyDisc;
    return deg == 0 || (deg == 1 && (domain.kind() == DomainKind::PolyDisc || domain.kind() == DomainKind::Ball));
  }
  const auto* e = std::get_if<ExplicitRep>(&disc.rep());
  if (!e) return false;
  if (e->family == Family::F1) return domain.kind() == DomainKind::PolyDisc || domain.is_g_variant();
  const auto native = native_kind(e->family);
  if (!native) return false;
  switch (domain.kind()) {
    case DomainKind::PolyDisc:
    case DomainKind::GPlain:
    case DomainKind::GTilde: return true;
    case DomainKind::GMinus: return *native == DomainKind::GMinus;
    default: return false;
  }
}

GridStats grid_scan(const AnalyticDisc& disc, const DomainSpec& domain, const GridParams& grid) {
  check_dims(disc, domain);
  return scan(disc, domain, grid).stats;
}

ContainmentReport verify_containment(const AnalyticDisc& disc, const DomainSpec& domain, VerifyMode mode,
                                     const GridParams& grid) {
  check_dims(disc, domain);
  ContainmentReport rep;
  const bool registered = has_analytic_verifier(disc, domain);
  if (mode == VerifyMode::Analytic && !registered)
    throw CapabilityError("no analytic verifier for " + disc.describe() + " in " + domain.describe());

  std::string analytic_reason;
  if (registered && mode != VerifyMode::Grid) {
    const Outcome o = check(disc, domain);
    if (o.ok) {
      ContainmentCertificate c;
      c.kind = ContainmentCertificate::Kind::Analytic;
      c.inequality = o.inequality;
      c.domain = domain.describe();
      c.disc = disc.describe();
      rep.ok = true;
      rep.certificate = c;
      return rep;
    }
    analytic_reason = o.reason;
  }

  const Scan s = scan(disc, domain, grid);
  rep.grid = s.stats;
  if (mode == VerifyMode::Analytic || !s.first_violation) {
    if (mode == VerifyMode::Analytic) {
      rep.reason = "analytic check failed: " + analytic_reason;
    } else {
      ContainmentCertificate c;
      c.kind = ContainmentCertificate::Kind::Grid;
      c.grid = s.stats;
      c.domain = domain.describe();
      c.disc = disc.describe();
      rep.ok = true;
      rep.certificate = c;
      return rep;
    }
  } else {
    rep.reason = "grid margin " + std::to_string(s.first_violation->worst) + " exceeds -tau";
    if (!analytic_reason.empty()) rep.reason += "; analytic check failed: " + analytic_reason;
  }
  const Complex wz = s.first_violation ? s.first_violation->worst_zeta : s.stats.worst_zeta;
  rep.witness_zeta = wz;
  rep.witness_point = disc.eval_unchecked(wz);
  rep.witness_margin = domain.defining_margin(rep.witness_point.coords());
  return rep;
}

double f4_a0(double mu) {
  if (!(mu > 1.0 && mu <= 2.0)) throw ArgumentError("F4 constant search needs 1 < mu <= 2");
  static std::mutex lock;
  static std::map<double, double> cache;
  {
    std::lock_guard g(lock);
    if (auto it = cache.find(mu); it != cache.end()) return it->second;
  }
  const DomainSpec domain = DomainSpec::g_plain(mu);
  const double c = 1.0 - 1.0 / (2.0 * mu);
  double found = 0.0;
  for (int k = -4; k <= 40 && found == 0.0; ++k) {
    const double a0 = std::ldexp(1.0, -k);
    bool ok = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      for (double ratio : {c, 0.5, 0.1}) {
        FamilyParams p;
        p.eps = eps;
        p.delta = ratio * eps;
        p.mu = mu;
        p.a0 = a0;
        try {
          const auto disc = paper_disc(Family::F4, p);
          if (scan(disc, domain, GridParams{}, true).first_violation) ok = false;
        } catch (const ArgumentError&) {
          ok = false;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) found = a0;
  }
  if (found == 0.0) throw ConstructionError("no admissible a0 found for F4");
  std::lock_guard g(lock);
  cache[mu] = found;
  return found;
}

}  // namespace kobalab
