#include "kobalab/upper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <variant>

#include "kobalab/optimize.hpp"

namespace kobalab {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::ExplicitFamily: return "explicit-family";
    case Strategy::PolyOpt: return "poly-opt";
    case Strategy::BestOf: return "best-of";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "explicit-family") return Strategy::ExplicitFamily;
  if (s == "poly-opt") return Strategy::PolyOpt;
  if (s == "best-of") return Strategy::BestOf;
  throw ArgumentError("unknown strategy '" + std::string(s) + "'");
}

namespace {

constexpr double kInterpTol = 1e-10;
constexpr double kSlopeTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool close(const CPoint& a, const CPoint& b) { return distance(a, b) <= kInterpTol * std::max(1.0, a.norm()); }

// Values read off a verified disc are rounded up by a few ulps so rounding cannot cross an exact lower bound.
double round_up(double v) { return v + 16.0 * std::numeric_limits<double>::epsilon() * std::abs(v); }

void require_inside(const DomainSpec& d, const CPoint& z, const char* name) {
  if (!contains(d, z).inside) throw ArgumentError(std::string(name) + " is not in " + d.describe());
}

bool tail_zero(const CPoint& z, std::size_t from) {
  for (std::size_t j = from; j < z.dim(); ++j)
    if (z[j] != Complex{}) return false;
  return true;
}

bool g_model(const DomainSpec& d) {
  return d.kind() == DomainKind::GPlain || d.kind() == DomainKind::GTilde || d.kind() == DomainKind::GMinus;
}

bool plain_like(const DomainSpec& d) { return d.kind() == DomainKind::GPlain || d.kind() == DomainKind::GTilde; }

bool closed_form(const DomainSpec& d) { return d.kind() == DomainKind::PolyDisc || d.kind() == DomainKind::Ball; }

// Explicit candidates are already extremal: closed-form domains, and punctured
// closed-form domains once a base disc missing the removed points is found.
bool extremal_known(const DomainSpec& d, const std::vector<Bound>& cands) {
  if (closed_form(d)) return true;
  return d.kind() == DomainKind::Punctured && closed_form(d.base()) && !cands.empty();
}

Grade grade_for(const DomainSpec& d, const ContainmentCertificate& c) {
  Grade g = c.grade();
  if (d.demonstration_grade()) g = weakest(g, Grade::Numeric);
  return g;
}

std::string cert_text(const ContainmentCertificate& c) {
  if (c.kind == ContainmentCertificate::Kind::Analytic) return "analytic containment: " + c.inequality;
  return "grid containment: worst margin " + fmt(c.grid.worst_margin) + " over " + std::to_string(c.grid.samples) +
         " samples";
}

double minus_constant(const DomainSpec& d, const UpperOptions& o) {
  return o.minus_constant > 0.0 ? o.minus_constant : f8_critical_constant(d.mu()) * (1.0 - 1e-6);
}

std::optional<AnalyticDisc> try_disc(Family f, const FamilyParams& p) {
  try {
    return paper_disc(f, p);
  } catch (const ArgumentError&) {
    return std::nullopt;
  }
}

FamilyParams params(const DomainSpec& d, double eps, double delta = 0.0, double mu = 0.0, double C = 0.0) {
  FamilyParams p;
  p.eps = eps;
  p.delta = delta;
  p.mu = mu;
  p.C = C;
  p.dim = d.dim();
  return p;
}

std::optional<Bound> lempert_from_disc(const DomainSpec& d, const AnalyticDisc& disc, Complex u0, Complex u1,
                                       const CPoint& z, const CPoint& w, const GridParams& grid,
                                       const std::string& method) {
  if (!(std::abs(u0) < 1.0 && std::abs(u1) < 1.0)) return std::nullopt;
  if (!close(disc.eval(u0), z) || !close(disc.eval(u1), w)) return std::nullopt;
  const ContainmentReport rep = verify_containment(disc, d, VerifyMode::Auto, grid);
  if (!rep.ok) return std::nullopt;
  Recentered rc = recenter(disc, u0, u1);
  Bound b;
  b.quantity = Quantity::Lempert;
  b.value = round_up(rc.alpha);
  b.grade = grade_for(d, *rep.certificate);
  b.method = method;
  b.derivation = {disc.describe() + " passes through both points", cert_text(*rep.certificate),
                  "ell <= m(u0, u1) = " + fmt(rc.alpha)};
  b.disc = DiscWitness{rc.disc, 0.0, rc.alpha, rep.certificate};
  return b;
}

std::optional<Bound> kappa_from_disc(const DomainSpec& d, const AnalyticDisc& disc, Complex u, const CPoint& z,
                                     const CPoint& X, const GridParams& grid, const std::string& method) {
  if (!(std::abs(u) < 1.0)) return std::nullopt;
  if (!close(disc.eval(u), z)) return std::nullopt;
  const CPoint dv = disc.derivative(u);
  std::size_t j = 0;
  for (std::size_t i = 1; i < dv.dim(); ++i)
    if (std::abs(dv[i]) > std::abs(dv[j])) j = i;
  if (dv[j] == Complex{}) return std::nullopt;
  const Complex lambda = X[j] / dv[j];
  if (distance(X, lambda * dv) > kInterpTol * X.norm()) return std::nullopt;
  const ContainmentReport rep = verify_containment(disc, d, VerifyMode::Auto, grid);
  if (!rep.ok) return std::nullopt;
  const double alpha = std::abs(lambda) / (1.0 - std::norm(u));
  Bound b;
  b.quantity = Quantity::KR;
  b.value = round_up(alpha);
  b.grade = grade_for(d, *rep.certificate);
  b.method = method;
  b.derivation = {disc.describe() + " passes through z with tangent parallel to X", cert_text(*rep.certificate),
                  "kappa <= |lambda| / (1 - |u|^2) = " + fmt(alpha)};
  b.disc = DiscWitness{disc.precomposed(Mobius::automorphism(u, lambda / std::abs(lambda))), 0.0, alpha,
                       rep.certificate};
  return b;
}

// Discs (-eps + k zeta, zeta, 0, ...) in the G models, as paper families.
std::vector<std::pair<Family, AnalyticDisc>> linear_discs(const DomainSpec& d, double eps, double k) {
  std::vector<std::pair<Family, AnalyticDisc>> out;
  if (!(eps > 0.0 && eps < 1.0 && k > 0.0)) return out;
  auto add = [&](Family f, const FamilyParams& p) {
    if (auto disc = try_disc(f, p)) out.emplace_back(f, *disc);
  };
  const double mu = d.mu();
  const double C = k / std::pow(eps, 1.0 - 1.0 / mu);
  if (plain_like(d)) {
    if (std::abs(k - std::sqrt(eps)) <= kSlopeTol * std::sqrt(eps)) add(Family::F2, params(d, eps));
    if (std::abs(k - (1.0 - eps)) <= kSlopeTol) add(Family::F6, params(d, eps));
    if (mu > 1.0) add(Family::F7, params(d, eps, 0.0, mu, C));
    if (mu >= 1.0) add(Family::F8, params(d, eps, 0.0, mu, C));
  } else if (d.kind() == DomainKind::GMinus) {
    add(Family::F8, params(d, eps, 0.0, mu, C));
  }
  return out;
}

// Real positive k with z1 = -eps + k z2 for a real eps, if the data allow it.
std::optional<std::pair<double, double>> linear_slope(Complex dz1, Complex dz2, const CPoint& base) {
  if (dz2 == Complex{}) return std::nullopt;
  const Complex k = dz1 / dz2;
  if (!(k.real() > 0.0) || std::abs(k.imag()) > kSlopeTol * std::abs(k)) return std::nullopt;
  const Complex e = k.real() * base[1] - base[0];
  if (std::abs(e.imag()) > kSlopeTol * std::max(1.0, std::abs(e))) return std::nullopt;
  return std::make_pair(k.real(), e.real());
}

AnalyticDisc polydisc_mobius(const CPoint& z, const std::vector<Complex>& factors) {
  std::vector<MobiusCoordinate> coords;
  for (std::size_t j = 0; j < z.dim(); ++j) {
    // The extremal coordinate has |factor| = 1 up to rounding.
    Complex f = std::abs(factors[j]) > 1.0 ? factors[j] / std::abs(factors[j]) : factors[j];
    while (std::abs(f) > 1.0) f *= 1.0 - std::numeric_limits<double>::epsilon();
    coords.push_back(MobiusCoordinate{z[j], f, {0.0}});
  }
  return AnalyticDisc::mobius_composite(std::move(coords));
}

// Affine parametrization of the slice of the ball by the complex line z + t v.
struct BallSlice {
  AnalyticDisc disc;
  Complex u0;  ///< parameter of z
};

BallSlice ball_slice(const CPoint& z, const CPoint& v) {
  const double vv = v.norm() * v.norm();
  const Complex g = inner(v, z);
  const Complex c = -std::conj(g) / vv;
  const double R = std::sqrt((1.0 - z.norm() * z.norm()) / vv + std::norm(g) / (vv * vv)) * (1.0 - 1e-12);
  std::vector<std::vector<Complex>> coeffs(z.dim());
  for (std::size_t j = 0; j < z.dim(); ++j) coeffs[j] = {z[j] + v[j] * c, v[j] * R};
  return {AnalyticDisc::polynomial(std::move(coeffs)), -c / R};
}

// True if the disc image misses p. Affine discs (up to a disc automorphism) are
// solved exactly; other discs are sampled.
bool avoids(const AnalyticDisc& disc, const CPoint& p) {
  if (const auto* poly = std::get_if<PolynomialRep>(&disc.rep())) {
    const auto& c = poly->coeffs;
    const bool affine =
        poly->chart.empty() && std::all_of(c.begin(), c.end(), [](const auto& row) { return row.size() <= 2; });
    if (affine) {
      auto coef = [&](std::size_t j, std::size_t k) { return k < c[j].size() ? c[j][k] : Complex{}; };
      std::size_t j = 0;
      for (std::size_t i = 1; i < c.size(); ++i)
        if (std::abs(coef(i, 1)) > std::abs(coef(j, 1))) j = i;
      if (coef(j, 1) == Complex{}) return distance(disc.eval(0.0), p) > 0.0;
      const Complex t = (p[j] - coef(j, 0)) / coef(j, 1);
      if (std::abs(t) >= 1.0) return true;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (std::abs(coef(i, 0) + coef(i, 1) * t - p[i]) > kInterpTol) return true;
      return false;
    }
  }
  double closest = kInf;
  for (int k = 0; k <= 40; ++k) {
    const double r = k < 20 ? k / 20.0 : 1.0 - std::ldexp(1.0, 20 - k);
    const int angles = k == 0 ? 1 : 1024;
    for (int a = 0; a < angles; ++a)
      closest = std::min(closest, distance(disc.eval_unchecked(std::polar(r, 2.0 * std::numbers::pi * a / angles)), p));
  }
  return closest > 1e-9;
}

// Base-domain candidates whose discs miss the removed points.
std::vector<Bound> punctured_candidates(const DomainSpec& d, std::vector<Bound> base) {
  std::vector<Bound> out;
  for (auto& b : base) {
    if (!b.disc) continue;
    const bool ok = std::all_of(d.excluded().begin(), d.excluded().end(),
                                [&](const CPoint& p) { return avoids(b.disc->disc, p); });
    if (!ok) continue;
    b.grade = weakest(b.grade, Grade::Numeric);
    b.derivation.push_back("the disc misses the " + std::to_string(d.excluded().size()) + " removed point(s)");
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Bound> explicit_lempert(const DomainSpec& d, const CPoint& z, const CPoint& w, const UpperOptions& o) {
  if (d.kind() == DomainKind::Punctured) return punctured_candidates(d, explicit_lempert(d.base(), z, w, o));
  std::vector<Bound> out;
  auto push = [&](std::optional<Bound> b) {
    if (b) out.push_back(std::move(*b));
  };
  const std::size_t n = d.dim();
  if (d.kind() == DomainKind::PolyDisc) {
    double alpha = 0.0;
    for (std::size_t j = 0; j < n; ++j) alpha = std::max(alpha, pseudo_hyperbolic(z[j], w[j]));
    std::vector<Complex> factors(n);
    for (std::size_t j = 0; j < n; ++j) factors[j] = ((w[j] - z[j]) / (1.0 - std::conj(z[j]) * w[j])) / alpha;
    push(lempert_from_disc(d, polydisc_mobius(z, factors), 0.0, alpha, z, w, o.grid, "polydisc-mobius"));
    return out;
  }
  if (d.kind() == DomainKind::Ball) {
    const BallSlice s = ball_slice(z, w - z);
    const auto& rows = std::get<PolynomialRep>(s.disc.rep()).coeffs;
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(rows[i][1]) > std::abs(rows[j][1])) j = i;
    const Complex uw = (w[j] - rows[j][0]) / rows[j][1];
    push(lempert_from_disc(d, s.disc, s.u0, uw, z, w, o.grid, "ball-slice"));
    return out;
  }
  if (!g_model(d) || n < 2 || !tail_zero(z, 2) || !tail_zero(w, 2)) return out;

  const double tz = normal_parameter(z);
  const double tw = normal_parameter(w);
  if (tz > 0.0 && tw > 0.0 && plain_like(d)) {
    const double eps = std::max(tz, tw), delta = std::min(tz, tw);
    auto family = [&](Family f, FamilyParams p, const std::string& method) {
      const auto disc = try_disc(f, p);
      if (!disc) return;
      const InterpolationNodes nodes = interpolation_nodes(f, p);
      const bool z_first = close(disc->eval(nodes.first), z);
      const Complex u0 = z_first ? nodes.first : nodes.second;
      const Complex u1 = z_first ? nodes.second : nodes.first;
      push(lempert_from_disc(d, *disc, u0, u1, z, w, o.grid, method));
    };
    const double mu = d.mu();
    if (mu <= 0.5) family(Family::F5, params(d, eps, delta), "F5");
    if (mu > 0.5) family(Family::F3, params(d, eps, delta, mu), "F3");
    if (mu > 1.0 && delta <= (1.0 - 1.0 / (2.0 * mu)) * eps) family(Family::F4, params(d, eps, delta, mu), "F4");
  }

  if (z[0] == w[0]) {
    FamilyParams p = params(d, 0.0);
    p.c = z[0];
    if (auto disc = try_disc(Family::F1, p)) push(lempert_from_disc(d, *disc, z[1], w[1], z, w, o.grid, "F1"));
  } else if (const auto ke = linear_slope(w[0] - z[0], w[1] - z[1], z)) {
    for (const auto& [f, disc] : linear_discs(d, ke->second, ke->first))
      push(lempert_from_disc(d, disc, z[1], w[1], z, w, o.grid, std::string(to_string(f))));
  }
  return out;
}

std::vector<Bound> explicit_kappa(const DomainSpec& d, const CPoint& z, const CPoint& X, const UpperOptions& o) {
  if (d.kind() == DomainKind::Punctured) return punctured_candidates(d, explicit_kappa(d.base(), z, X, o));
  std::vector<Bound> out;
  auto push = [&](std::optional<Bound> b) {
    if (b) out.push_back(std::move(*b));
  };
  const std::size_t n = d.dim();
  if (d.kind() == DomainKind::PolyDisc) {
    double alpha = 0.0;
    for (std::size_t j = 0; j < n; ++j) alpha = std::max(alpha, std::abs(X[j]) / (1.0 - std::norm(z[j])));
    std::vector<Complex> factors(n);
    for (std::size_t j = 0; j < n; ++j) factors[j] = X[j] / (alpha * (1.0 - std::norm(z[j])));
    push(kappa_from_disc(d, polydisc_mobius(z, factors), 0.0, z, X, o.grid, "polydisc-mobius"));
    return out;
  }
  if (d.kind() == DomainKind::Ball) {
    const BallSlice s = ball_slice(z, X);
    push(kappa_from_disc(d, s.disc, s.u0, z, X, o.grid, "ball-slice"));
    return out;
  }
  if (!g_model(d) || n < 2 || !tail_zero(z, 2) || !tail_zero(X, 2)) return out;

  if (X[0] == Complex{}) {
    FamilyParams p = params(d, 0.0);
    p.c = z[0];
    if (auto disc = try_disc(Family::F1, p)) push(kappa_from_disc(d, *disc, z[1], z, X, o.grid, "F1"));
  } else if (const auto ke = linear_slope(X[0], X[1], z)) {
    for (const auto& [f, disc] : linear_discs(d, ke->second, ke->first))
      push(kappa_from_disc(d, disc, z[1], z, X, o.grid, std::string(to_string(f))));
  } else if (X[1] == Complex{}) {
    const double t = normal_parameter(z);
    if (t > 0.0 && plain_like(d)) {
      // Two-point families with coinciding nodes: the second coordinate vanishes to order two.
      const double mu = d.mu();
      if (mu <= 0.5) {
        if (auto disc = try_disc(Family::F5, params(d, t, t)))
          push(kappa_from_disc(d, *disc, -t, z, X, o.grid, "F5 (delta = eps)"));
      } else if (auto disc = try_disc(Family::F3, params(d, t, t, mu))) {
        push(kappa_from_disc(d, *disc, 0.0, z, X, o.grid, "F3 (delta = eps)"));
      }
    }
  }
  return out;
}

Bound best_of(std::vector<Bound> cands) {
  auto better = [](const Bound& a, const Bound& b) {
    if (a.value != b.value) return a.value < b.value;
    return static_cast<int>(a.grade) < static_cast<int>(b.grade);
  };
  return *std::min_element(cands.begin(), cands.end(), better);
}

Bound constant_bound(const DomainSpec& d, const CPoint& z, Quantity q) {
  std::vector<std::vector<Complex>> coeffs(z.dim());
  for (std::size_t j = 0; j < z.dim(); ++j) coeffs[j] = {z[j]};
  const AnalyticDisc disc = AnalyticDisc::polynomial(std::move(coeffs));
  const ContainmentReport rep = verify_containment(disc, d, VerifyMode::Auto);
  Bound b;
  b.quantity = q;
  b.value = 0.0;
  b.grade = rep.ok ? grade_for(d, *rep.certificate) : Grade::NumericWeak;
  b.method = "constant";
  b.derivation = {"coinciding points: the constant disc gives 0"};
  b.disc = DiscWitness{disc, 0.0, 0.0, rep.certificate};
  return b;
}

Bound trivial_lempert() {
  Bound b;
  b.quantity = Quantity::Lempert;
  b.value = 1.0;
  b.grade = Grade::NumericWeak;
  b.method = "trivial";
  b.derivation = {"no verified disc found; ell < 1 on a connected domain"};
  return b;
}

std::optional<Bound> affine_kappa(const DomainSpec& d, const CPoint& z, const CPoint& X) {
  GridParams coarse;
  coarse.rings = 10;
  coarse.angles = 256;
  coarse.interior_linear = 7;
  coarse.interior_geometric = 0;
  const double tau = containment_tolerance(d);
  auto disc_at = [&](double a) {
    std::vector<std::vector<Complex>> coeffs(z.dim());
    for (std::size_t j = 0; j < z.dim(); ++j) coeffs[j] = {z[j], X[j] / a};
    return AnalyticDisc::polynomial(std::move(coeffs));
  };
  auto ok = [&](double a) { return grid_scan(disc_at(a), d, coarse).worst_margin < -tau; };
  double hi = X.norm();
  int k = 0;
  while (!ok(hi) && k++ < 80) hi *= 2.0;
  if (k > 80) return std::nullopt;
  double lo = hi;
  for (int i = 0; i < 80 && ok(lo); ++i) lo *= 0.5;
  if (ok(lo)) return std::nullopt;
  for (int i = 0; i < 40; ++i) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  for (int attempt = 0; attempt < 8; ++attempt, hi *= 1.01) {
    const AnalyticDisc disc = disc_at(hi);
    if (auto b = kappa_from_disc(d, disc, 0.0, z, X, GridParams{}, "affine-bisection")) {
      b->grade = weakest(b->grade, Grade::Numeric);
      return b;
    }
  }
  return std::nullopt;
}

Bound infinite_kappa() {
  Bound b;
  b.quantity = Quantity::KR;
  b.value = kInf;
  b.grade = Grade::NumericWeak;
  b.method = "trivial";
  b.derivation = {"no verified disc found"};
  return b;
}

Bound poly_bound(Quantity q, const PolyOptResult& r, const DomainSpec& d) {
  Bound b;
  b.quantity = q;
  b.value = r.alpha;
  b.grade = weakest(Grade::Numeric, grade_for(d, *r.report.certificate));
  b.method = "poly-opt";
  b.derivation = {"optimized polynomial disc " + r.disc.describe(), cert_text(*r.report.certificate),
                  std::to_string(r.evals) + " objective evaluations"};
  b.disc = DiscWitness{r.disc, 0.0, r.alpha, r.report.certificate};
  return b;
}

Chain make_chain(const DomainSpec& d, const std::vector<CPoint>& pts, const UpperOptions& o) {
  Chain c;
  c.points = pts;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) c.legs.push_back(lempert_upper(d, pts[i], pts[i + 1], o));
  return c;
}

UpperOptions with_strategy(UpperOptions o, Strategy s) {
  o.strategy = s;
  return o;
}

// Intermediate points q = (-delta, (eps - delta)/k): a linear family leg from p_eps, then a vertical leg to p_delta.
std::vector<CPoint> paper_midpoints(const DomainSpec& d, const CPoint& z, const CPoint& w, const UpperOptions& o) {
  std::vector<CPoint> out;
  if (!g_model(d) || d.dim() < 2) return out;
  const double tz = normal_parameter(z), tw = normal_parameter(w);
  if (!(tz > 0.0 && tw > 0.0) || tz == tw) return out;
  const double eps = std::max(tz, tw), delta = std::min(tz, tw);
  const double mu = d.mu();
  std::vector<double> slopes;
  if (plain_like(d)) {
    if (eps + std::sqrt(eps) < 1.0) slopes.push_back(std::sqrt(eps));
    if (mu > 1.0) slopes.push_back(f7_default_constant(mu) * std::pow(eps, 1.0 - 1.0 / mu));
    if (mu <= 1.0) slopes.push_back(1.0 - eps);
  } else {
    slopes.push_back(minus_constant(d, o) * std::pow(eps, 1.0 - 1.0 / mu));
  }
  for (double k : slopes) {
    CPoint q(d.dim());
    q[0] = -delta;
    q[1] = (eps - delta) / k;
    if (contains(d, q).inside) out.push_back(q);
  }
  return out;
}

Chain best_chain(std::vector<Chain> cs) {
  return *std::min_element(cs.begin(), cs.end(),
                           [](const Chain& a, const Chain& b) { return a.aggregate_ell() < b.aggregate_ell(); });
}

Chain two_leg_chain(const DomainSpec& d, const CPoint& z, const CPoint& w, const UpperOptions& o) {
  const UpperOptions ex = with_strategy(o, Strategy::ExplicitFamily);
  const Bound direct = lempert_upper(d, z, w, ex);
  std::vector<Chain> cs;
  {
    Chain c;
    c.points = {z, w, w};
    c.legs = {direct, constant_bound(d, w, Quantity::Lempert)};
    cs.push_back(std::move(c));
  }
  std::vector<CPoint> mids = paper_midpoints(d, z, w, o);
  const CPoint mid = 0.5 * (z + w);
  if (contains(d, mid).inside) mids.push_back(mid);
  for (const auto& y : mids) cs.push_back(make_chain(d, {z, y, w}, ex));
  Chain best = best_chain(std::move(cs));
  if (o.strategy != Strategy::ExplicitFamily) {
    for (std::size_t i = 0; i < best.legs.size(); ++i) {
      if (best.legs[i].value == 0.0) continue;
      Bound alt = lempert_upper(d, best.points[i], best.points[i + 1], o);
      if (alt.value < best.legs[i].value) best.legs[i] = std::move(alt);
    }
  }
  return best;
}

}  // namespace

Bound lempert_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w, const UpperOptions& opts) {
  require_inside(domain, z, "z");
  require_inside(domain, w, "w");
  if (z == w) return constant_bound(domain, z, Quantity::Lempert);
  std::vector<Bound> cands;
  if (opts.strategy != Strategy::PolyOpt) cands = explicit_lempert(domain, z, w, opts);
  const bool run_poly = opts.strategy == Strategy::PolyOpt || (opts.strategy == Strategy::BestOf && !extremal_known(domain, cands));
  if (run_poly)
    if (auto r = optimize_lempert_disc(domain, z, w, opts.poly)) cands.push_back(poly_bound(Quantity::Lempert, *r, domain));
  if (cands.empty()) return trivial_lempert();
  return best_of(std::move(cands));
}

Chain lempert_chain_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w, int m, const UpperOptions& opts) {
  if (m < 1) throw ArgumentError("chain length m must be >= 1");
  require_inside(domain, z, "z");
  require_inside(domain, w, "w");
  if (m == 1) {
    Chain c;
    c.points = {z, w};
    c.legs = {lempert_upper(domain, z, w, opts)};
    return c;
  }
  if (m == 2) return two_leg_chain(domain, z, w, opts);

  // Pad the (m-1)-chain with a zero leg, so the value never increases with m.
  std::vector<Chain> cs;
  {
    Chain c = lempert_chain_upper(domain, z, w, m - 1, opts);
    c.points.push_back(w);
    c.legs.push_back(constant_bound(domain, w, Quantity::Lempert));
    cs.push_back(std::move(c));
  }
  // Two two-leg chains through the normal point at the geometric mean.
  const double tz = normal_parameter(z), tw = normal_parameter(w);
  if (m >= 4 && g_model(domain) && tz > 0.0 && tw > 0.0 && tz != tw) {
    const CPoint p = normal_point(domain, std::sqrt(tz * tw));
    Chain a = two_leg_chain(domain, z, p, opts);
    const Chain b = two_leg_chain(domain, p, w, opts);
    a.points.insert(a.points.end(), b.points.begin() + 1, b.points.end());
    a.legs.insert(a.legs.end(), b.legs.begin(), b.legs.end());
    while (static_cast<int>(a.legs.size()) < m) {
      a.points.push_back(w);
      a.legs.push_back(constant_bound(domain, w, Quantity::Lempert));
    }
    cs.push_back(std::move(a));
  }
  Chain best = best_chain(std::move(cs));

  // Coordinate descent: replace y_i by a two-leg construction between its neighbours.
  const UpperOptions ex = with_strategy(opts, Strategy::ExplicitFamily);
  for (int sweep = 0; sweep < 3; ++sweep) {
    bool improved = false;
    for (std::size_t i = 1; i + 1 < best.points.size(); ++i) {
      const double current = best.legs[i - 1].value + best.legs[i].value;
      for (const auto& y : paper_midpoints(domain, best.points[i - 1], best.points[i + 1], opts)) {
        Bound a = lempert_upper(domain, best.points[i - 1], y, ex);
        Bound b = lempert_upper(domain, y, best.points[i + 1], ex);
        if (a.value + b.value < current - 1e-15) {
          best.points[i] = y;
          best.legs[i - 1] = std::move(a);
          best.legs[i] = std::move(b);
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

Bound chain_bound(const Chain& chain, Quantity q) {
  if (q != Quantity::LempertM && q != Quantity::LempertLogM && q != Quantity::KDist)
    throw ArgumentError("chain_bound needs ell_m, l_m or k");
  Bound b;
  b.quantity = q;
  b.value = q == Quantity::LempertM ? chain.aggregate_ell() : chain.aggregate_l();
  b.grade = chain.grade();
  b.m = static_cast<int>(chain.m());
  b.method = "chain";
  b.chain = std::make_shared<const Chain>(chain);
  for (const auto& leg : chain.legs) b.derivation.push_back("leg " + leg.method + ": " + fmt(leg.value));
  return b;
}

Bound kobayashi_royden_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X, const UpperOptions& opts) {
  require_inside(domain, z, "z");
  z.require_same_dim(X);
  if (X.is_zero()) {
    Bound b = constant_bound(domain, z, Quantity::KR);
    b.method = "zero-vector";
    b.derivation = {"X = 0"};
    return b;
  }
  std::vector<Bound> cands;
  if (opts.strategy != Strategy::PolyOpt) cands = explicit_kappa(domain, z, X, opts);
  const bool run_poly = opts.strategy == Strategy::PolyOpt || (opts.strategy == Strategy::BestOf && !extremal_known(domain, cands));
  if (run_poly)
    if (auto r = optimize_kr_disc(domain, z, X, opts.poly)) cands.push_back(poly_bound(Quantity::KR, *r, domain));
  if (cands.empty())
    if (auto a = affine_kappa(domain, z, X)) cands.push_back(std::move(*a));
  if (cands.empty()) return infinite_kappa();
  return best_of(std::move(cands));
}

Bound kappa_quick_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X) {
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  return kobayashi_royden_upper(domain, z, X, o);
}

namespace {

struct Decomposition {
  std::vector<CPoint> pieces;
  std::string method;
};

Bound decomposition_bound(const DomainSpec& d, const CPoint& z, const Decomposition& dec, const UpperOptions& o) {
  Bound b;
  b.quantity = Quantity::KRM;
  b.method = dec.method;
  b.grade = Grade::Certified;
  b.decomposition = dec.pieces;
  for (const auto& X : dec.pieces) {
    Bound p = kobayashi_royden_upper(d, z, X, o);
    b.value += p.value;
    b.grade = weakest(b.grade, p.grade);
    b.derivation.push_back("piece via " + p.method + ": " + fmt(p.value));
    b.pieces.push_back(std::move(p));
  }
  return b;
}

// Slope k of the paper's linear leg through the normal point p_t.
std::optional<double> paper_slope(const DomainSpec& d, double t, const UpperOptions& o) {
  const double mu = d.mu();
  if (d.kind() == DomainKind::GMinus) return minus_constant(d, o) * std::pow(t, 1.0 - 1.0 / mu);
  if (!plain_like(d)) return std::nullopt;
  if (mu == 2.0) return std::sqrt(t);
  if (mu > 1.0) return f7_default_constant(mu) * std::pow(t, 1.0 - 1.0 / mu);
  return 1.0 - t;
}

Decomposition split(const CPoint& X, double s, const std::string& method) {
  CPoint a(X.dim()), b(X.dim());
  a[0] = X[0];
  a[1] = X[0] * s;
  b[1] = -X[0] * s;
  return {{a, b}, method};
}

}  // namespace

Bound kr_decomposed_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X, int m, const UpperOptions& opts) {
  if (m < 1) throw ArgumentError("decomposition length m must be >= 1");
  require_inside(domain, z, "z");
  z.require_same_dim(X);
  const UpperOptions ex = with_strategy(opts, Strategy::ExplicitFamily);

  std::vector<Bound> cands;
  {
    Bound single = kobayashi_royden_upper(domain, z, X, opts);
    Bound b;
    b.quantity = Quantity::KRM;
    b.value = single.value;
    b.grade = single.grade;
    b.method = "single-disc";
    b.decomposition = {X};
    b.derivation = {"kappa^(m) <= kappa: " + fmt(single.value)};
    b.pieces = {std::move(single)};
    cands.push_back(std::move(b));
  }
  if (m >= 2) {
    std::vector<CPoint> axes;
    for (std::size_t j = 0; j < X.dim(); ++j)
      if (X[j] != Complex{}) axes.push_back(CPoint::axis(X.dim(), X[j], j));
    if (axes.size() >= 2 && static_cast<int>(axes.size()) <= m)
      cands.push_back(decomposition_bound(domain, z, {axes, "coordinate-split"}, ex));

    const double t = normal_parameter(z);
    const bool paper_case = g_model(domain) && domain.dim() >= 2 && t > 0.0 && tail_zero(X, 2) &&
                            X[1] == Complex{} && X[0] != Complex{};
    if (paper_case) {
      if (const auto k = paper_slope(domain, t, opts)) {
        const double s_paper = 1.0 / *k;
        cands.push_back(decomposition_bound(domain, z, split(X, s_paper, "paper-split"), ex));
        if (opts.strategy != Strategy::ExplicitFamily) {
          // Smallest s whose first piece still lies on a certified family disc.
          auto certified = [&](double s) {
            const Decomposition dec = split(X, s, "");
            const auto c = explicit_kappa(domain, z, dec.pieces[0], ex);
            return std::any_of(c.begin(), c.end(), [](const Bound& b) { return b.grade == Grade::Certified; });
          };
          if (certified(s_paper)) {
            double lo = s_paper * 1e-3, hi = s_paper;
            if (!certified(lo)) {
              for (int i = 0; i < 50; ++i) {
                const double mid = std::sqrt(lo * hi);
                (certified(mid) ? hi : lo) = mid;
              }
              cands.push_back(decomposition_bound(domain, z, split(X, hi, "optimized-split"), ex));
            }
          }
        }
      }
    }
  }
  Bound b = best_of(std::move(cands));
  b.m = m;
  return b;
}

Bound kobayashi_busemann_upper(const DomainSpec& domain, const CPoint& z, const CPoint& X, int m_max,
                               const UpperOptions& opts) {
  if (m_max == 0) m_max = static_cast<int>(2 * domain.dim() + 1);
  if (m_max < 1) throw ArgumentError("m_max must be >= 1");
  Bound b = kr_decomposed_upper(domain, z, X, m_max, opts);
  b.quantity = Quantity::KHat;
  b.derivation.push_back("kappa hat <= kappa^(m) for m = " + std::to_string(m_max));
  return b;
}

namespace {

double segment_integral(const DomainSpec& d, const CPoint& a, const CPoint& b, int samples, std::vector<double>& out) {
  const CPoint v = b - a;
  std::vector<double> f(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const CPoint y = a + (static_cast<double>(i) / samples) * v;
    if (!contains(d, y).inside) return kInf;
    f[i] = kappa_quick_upper(d, y, v).value;
    if (!std::isfinite(f[i])) return kInf;
  }
  double s = 0.5 * (f.front() + f.back());
  for (int i = 1; i < samples; ++i) s += f[i];
  out.insert(out.end(), f.begin(), f.end());
  return s / samples;
}

double path_integral(const DomainSpec& d, const std::vector<CPoint>& nodes, int samples, std::vector<double>& out) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    total += segment_integral(d, nodes[i], nodes[i + 1], samples, out);
    if (!std::isfinite(total)) return kInf;
  }
  return total;
}

}  // namespace

Bound kobayashi_distance_upper(const DomainSpec& domain, const CPoint& z, const CPoint& w, const PathOptions& path,
                               const UpperOptions& opts) {
  require_inside(domain, z, "z");
  require_inside(domain, w, "w");
  if (z == w) return constant_bound(domain, z, Quantity::KDist);
  if (path.nodes < 0 || path.samples_per_segment < 1) throw ArgumentError("invalid path options");

  std::vector<Bound> cands;
  for (int m = 1; m <= 3; ++m) {
    Bound b = chain_bound(lempert_chain_upper(domain, z, w, m, opts), Quantity::KDist);
    b.derivation.insert(b.derivation.begin(), "k <= l^(" + std::to_string(m) + ")");
    cands.push_back(std::move(b));
  }

  const std::size_t n = z.dim();
  const int k = path.nodes;
  auto nodes_of = [&](std::span<const double> x) {
    std::vector<CPoint> nodes{z};
    for (int i = 1; i <= k; ++i) {
      CPoint y = z + (static_cast<double>(i) / (k + 1)) * (w - z);
      for (std::size_t j = 0; j < n && !x.empty(); ++j)
        y[j] += Complex(x[(i - 1) * 2 * n + 2 * j], x[(i - 1) * 2 * n + 2 * j + 1]);
      nodes.push_back(y);
    }
    nodes.push_back(w);
    return nodes;
  };
  std::vector<double> x0(closed_form(domain) ? static_cast<std::size_t>(k) * 2 * n : 0, 0.0);
  if (!x0.empty() && path.optimizer_evals > 0) {
    auto f = [&](std::span<const double> x) {
      std::vector<double> scratch;
      return path_integral(domain, nodes_of(x), path.samples_per_segment, scratch);
    };
    SimplexOptions so;
    so.max_evals = path.optimizer_evals;
    so.initial_step = 0.05 * distance(z, w);
    x0 = nelder_mead(f, x0, so).x;
  }
  auto witness = std::make_shared<PathWitness>();
  witness->nodes = nodes_of(x0);
  witness->integral = path_integral(domain, witness->nodes, path.samples_per_segment, witness->kappa_samples);
  if (std::isfinite(witness->integral)) {
    Bound b;
    b.quantity = Quantity::KDist;
    b.value = witness->integral;
    b.grade = Grade::Numeric;
    b.method = "path-integral";
    b.derivation = {"trapezoid rule over " + std::to_string(witness->nodes.size() - 1) + " segments with " +
                    std::to_string(path.samples_per_segment) + " steps each"};
    b.path = witness;
    cands.push_back(std::move(b));
  }
  return best_of(std::move(cands));
}

}  // namespace kobalab
