#include "kobalab/discs.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kobalab {

std::string_view to_string(Family f) {
  static constexpr std::string_view names[] = {"F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8"};
  return names[static_cast<int>(f)];
}

Family family_from_string(std::string_view s) {
  for (int i = 0; i < 8; ++i)
    if (to_string(static_cast<Family>(i)) == s) return static_cast<Family>(i);
  throw ArgumentError("unknown disc family '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Mobius

Complex Mobius::derivative(Complex z) const {
  const Complex den = r * z + s;
  return (p * s - q * r) / (den * den);
}

bool Mobius::is_identity() const { return p == Complex(1.0) && q == Complex{} && r == Complex{} && s == Complex(1.0); }

Mobius Mobius::after(const Mobius& in) const {
  return {p * in.p + q * in.r, p * in.q + q * in.s, r * in.p + s * in.r, r * in.q + s * in.s};
}

Mobius Mobius::automorphism(Complex a, Complex theta) {
  if (!(std::abs(a) < 1.0)) throw ArgumentError("automorphism centre must lie in the unit disc");
  return {theta, a, std::conj(a) * theta, 1.0};
}

// ---------------------------------------------------------------------------
// Blaschke and friends

Complex blaschke(double alpha, Complex z) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ArgumentError("blaschke: alpha must lie in [0, 1)");
  return z * (z - alpha) / (1.0 - alpha * z);
}

Complex blaschke_derivative(double alpha, Complex z) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ArgumentError("blaschke: alpha must lie in [0, 1)");
  const Complex den = 1.0 - alpha * z;
  return (2.0 * z - alpha - alpha * z * z) / (den * den);
}

double pseudo_hyperbolic(Complex a, Complex b) { return std::abs((a - b) / (1.0 - std::conj(b) * a)); }

namespace {

Complex moebius_point(double t, Complex z) { return (z + t) / (1.0 + t * z); }
Complex moebius_point_derivative(double t, Complex z) {
  const Complex den = 1.0 + t * z;
  return (1.0 - t * t) / (den * den);
}

double family_constant(Family f, const FamilyParams& p) {
  if (p.C > 0.0) return p.C;
  return f == Family::F7 ? f7_default_constant(p.mu) : f8_default_constant();
}

CPoint pad(std::size_t dim, Complex a, Complex b) {
  CPoint out(dim);
  out[0] = a;
  out[1] = b;
  return out;
}

Complex int_pow(Complex z, int n) {
  Complex r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

CPoint explicit_eval(const ExplicitRep& e, Complex z) {
  const auto& p = e.params;
  switch (e.family) {
    case Family::F1: return pad(p.dim, p.c, z);
    case Family::F2:
    case Family::F6:
    case Family::F7:
    case Family::F8: return pad(p.dim, -p.eps + e.scale * z, z);
    case Family::F3: return pad(p.dim, -p.eps + e.scale * z, blaschke(e.alpha, z));
    case Family::F4: return pad(p.dim, -p.delta - e.scale * int_pow(z, e.nu), blaschke(e.alpha, z));
    case Family::F5: return pad(p.dim, z, moebius_point(p.eps, z) * moebius_point(p.delta, z));
  }
  return CPoint(p.dim);
}

CPoint explicit_derivative(const ExplicitRep& e, Complex z) {
  const auto& p = e.params;
  switch (e.family) {
    case Family::F1: return pad(p.dim, 0.0, 1.0);
    case Family::F2:
    case Family::F6:
    case Family::F7:
    case Family::F8: return pad(p.dim, e.scale, 1.0);
    case Family::F3: return pad(p.dim, e.scale, blaschke_derivative(e.alpha, z));
    case Family::F4:
      return pad(p.dim, -e.scale * double(e.nu) * int_pow(z, e.nu - 1), blaschke_derivative(e.alpha, z));
    case Family::F5:
      return pad(p.dim, 1.0,
                 moebius_point_derivative(p.eps, z) * moebius_point(p.delta, z) +
                     moebius_point(p.eps, z) * moebius_point_derivative(p.delta, z));
  }
  return CPoint(p.dim);
}

Complex mobius_coord_eval(const MobiusCoordinate& m, Complex z) {
  Complex u = m.rotation;
  for (const auto& a : m.zeros) u *= (z - a) / (1.0 - std::conj(a) * z);
  return (u + m.center) / (1.0 + std::conj(m.center) * u);
}

Complex mobius_coord_derivative(const MobiusCoordinate& m, Complex z) {
  Complex u = m.rotation;
  Complex du = 0.0;
  for (const auto& a : m.zeros) {
    const Complex den = 1.0 - std::conj(a) * z;
    const Complex f = (z - a) / den;
    const Complex df = (1.0 - std::norm(a)) / (den * den);
    du = du * f + u * df;
    u *= f;
  }
  const Complex den = 1.0 + std::conj(m.center) * u;
  return (1.0 - std::norm(m.center)) / (den * den) * du;
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticDisc

AnalyticDisc AnalyticDisc::explicit_family(Family f, const FamilyParams& p) {
  if (p.dim < 2) throw ArgumentError("disc families need dimension >= 2");
  ExplicitRep e{f, p};
  switch (f) {
    case Family::F2: e.scale = std::sqrt(p.eps); break;
    case Family::F3:
      e.scale = std::pow(p.eps, 1.0 - 1.0 / (2.0 * p.mu));
      e.alpha = f3_alpha(p.eps, p.delta, p.mu);
      break;
    case Family::F4:
      e.nu = f4_nu(p.mu);
      e.scale = p.a0 * std::pow(p.eps, 1.0 - e.nu / (2.0 * p.mu));
      e.alpha = f4_alpha(p.eps, p.delta, p.mu, p.a0);
      break;
    case Family::F6: e.scale = 1.0 - p.eps; break;
    case Family::F7:
    case Family::F8: e.scale = family_constant(f, p) * std::pow(p.eps, 1.0 - 1.0 / p.mu); break;
    default: break;
  }
  return AnalyticDisc(std::move(e));
}

AnalyticDisc AnalyticDisc::polynomial(std::vector<std::vector<Complex>> coeffs, std::vector<Complex> chart) {
  if (coeffs.empty()) throw ArgumentError("polynomial disc needs at least one coordinate");
  for (const auto& row : coeffs)
    for (const auto& c : row)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ArgumentError("non-finite polynomial coefficient");
  if (!chart.empty() && chart.size() != coeffs.size()) throw ArgumentError("chart needs one centre per coordinate");
  for (const auto& c : chart)
    if (!(std::abs(c) < 1.0)) throw ArgumentError("chart centres must lie in the unit disc");
  return AnalyticDisc(PolynomialRep{std::move(coeffs), std::move(chart)});
}

AnalyticDisc AnalyticDisc::mobius_composite(std::vector<MobiusCoordinate> coords) {
  if (coords.empty()) throw ArgumentError("Mobius disc needs at least one coordinate");
  for (const auto& m : coords) {
    if (!(std::abs(m.center) < 1.0)) throw ArgumentError("Mobius coordinate centre must lie in the unit disc");
    if (!(std::abs(m.rotation) <= 1.0)) throw ArgumentError("Mobius coordinate factor must have modulus <= 1");
    for (const auto& a : m.zeros)
      if (!(std::abs(a) < 1.0)) throw ArgumentError("Blaschke zeros must lie in the unit disc");
  }
  return AnalyticDisc(MobiusRep{std::move(coords)});
}

std::size_t AnalyticDisc::dim() const {
  return std::visit(
      [](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ExplicitRep>) return r.params.dim;
        else if constexpr (std::is_same_v<T, PolynomialRep>) return r.coeffs.size();
        else return r.coords.size();
      },
      rep_);
}

CPoint AnalyticDisc::base_eval(Complex w) const {
  return std::visit(
      [&](const auto& r) -> CPoint {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ExplicitRep>) {
          return explicit_eval(r, w);
        } else if constexpr (std::is_same_v<T, PolynomialRep>) {
          CPoint out(r.coeffs.size());
          for (std::size_t j = 0; j < r.coeffs.size(); ++j) {
            Complex acc = 0.0;
            for (auto it = r.coeffs[j].rbegin(); it != r.coeffs[j].rend(); ++it) acc = acc * w + *it;
            out[j] = r.chart.empty() ? acc : (acc + r.chart[j]) / (1.0 + std::conj(r.chart[j]) * acc);
          }
          return out;
        } else {
          CPoint out(r.coords.size());
          for (std::size_t j = 0; j < r.coords.size(); ++j) out[j] = mobius_coord_eval(r.coords[j], w);
          return out;
        }
      },
      rep_);
}

CPoint AnalyticDisc::base_derivative(Complex w) const {
  return std::visit(
      [&](const auto& r) -> CPoint {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ExplicitRep>) {
          return explicit_derivative(r, w);
        } else if constexpr (std::is_same_v<T, PolynomialRep>) {
          CPoint out(r.coeffs.size());
          for (std::size_t j = 0; j < r.coeffs.size(); ++j) {
            Complex acc = 0.0;
            const auto& c = r.coeffs[j];
            for (std::size_t k = c.size(); k-- > 1;) acc = acc * w + double(k) * c[k];
            if (!r.chart.empty()) {
              Complex q = 0.0;
              for (auto it = c.rbegin(); it != c.rend(); ++it) q = q * w + *it;
              const Complex den = 1.0 + std::conj(r.chart[j]) * q;
              acc *= (1.0 - std::norm(r.chart[j])) / (den * den);
            }
            out[j] = acc;
          }
          return out;
        } else {
          CPoint out(r.coords.size());
          for (std::size_t j = 0; j < r.coords.size(); ++j) out[j] = mobius_coord_derivative(r.coords[j], w);
          return out;
        }
      },
      rep_);
}

CPoint AnalyticDisc::eval_unchecked(Complex z) const { return base_eval(reparam_.is_identity() ? z : reparam_(z)); }

CPoint AnalyticDisc::eval(Complex z) const {
  if (!(std::abs(z) < 1.0)) throw ArgumentError("disc evaluation needs |zeta| < 1");
  return eval_unchecked(z);
}

CPoint AnalyticDisc::derivative(Complex z) const {
  if (!(std::abs(z) < 1.0)) throw ArgumentError("disc derivative needs |zeta| < 1");
  if (reparam_.is_identity()) return base_derivative(z);
  return reparam_.derivative(z) * base_derivative(reparam_(z));
}

AnalyticDisc AnalyticDisc::precomposed(const Mobius& m) const {
  AnalyticDisc out = *this;
  out.reparam_ = reparam_.after(m);
  return out;
}

std::string AnalyticDisc::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ExplicitRep>) {
          os << to_string(r.family) << "(eps=" << r.params.eps << ", delta=" << r.params.delta << ", mu=" << r.params.mu
             << ")";
        } else if constexpr (std::is_same_v<T, PolynomialRep>) {
          std::size_t deg = 0;
          for (const auto& row : r.coeffs) deg = std::max(deg, row.size() ? row.size() - 1 : 0);
          os << "Polynomial(n=" << r.coeffs.size() << ", degree=" << deg << ")";
          if (!r.chart.empty()) os << " in automorphism charts";
        } else {
          os << "MobiusComposite(n=" << r.coords.size() << ")";
        }
      },
      rep_);
  if (!reparam_.is_identity()) os << " o automorphism";
  return os.str();
}

Recentered recenter(const AnalyticDisc& d, Complex u0, Complex u1) {
  if (!(std::abs(u0) < 1.0 && std::abs(u1) < 1.0)) throw ArgumentError("recenter: nodes must lie in the unit disc");
  const Complex w = (u1 - u0) / (1.0 - std::conj(u0) * u1);
  const double alpha = std::abs(w);
  const Complex theta = alpha > 0.0 ? w / alpha : Complex(1.0);
  return {d.precomposed(Mobius::automorphism(u0, theta)), alpha};
}

// ---------------------------------------------------------------------------
// Family parameters

double f3_alpha(double eps, double delta, double mu) { return (eps - delta) / std::pow(eps, 1.0 - 1.0 / (2.0 * mu)); }

int f4_nu(double mu) { return static_cast<int>(std::ceil(mu)); }

double f4_alpha(double eps, double delta, double mu, double a0) {
  const int nu = f4_nu(mu);
  const double a = a0 * std::pow(eps, 1.0 - nu / (2.0 * mu));
  return std::pow((eps - delta) / a, 1.0 / nu);
}

double f7_default_constant(double mu) {
  if (!(mu > 1.0)) throw ArgumentError("F7 requires mu > 1");
  const double gap = std::pow(mu, 1.0 / (1.0 - mu)) - std::pow(mu, mu / (1.0 - mu));
  return std::pow(0.5 / gap, (mu - 1.0) / mu);
}

double f8_critical_constant(double mu) {
  if (!(mu >= 1.0)) throw ArgumentError("F8 requires mu >= 1");
  if (mu == 1.0) return 1.0 / std::numbers::sqrt2;
  const double denom = (1.0 - 1.0 / mu) * std::numbers::sqrt2 * std::pow(std::numbers::sqrt2 / mu, 1.0 / (mu - 1.0));
  return std::pow(1.0 / denom, (mu - 1.0) / mu);
}

double f8_default_constant() { return 1.0 / std::numbers::sqrt2; }

namespace {

[[noreturn]] void invalid(Family f, const std::string& what) {
  throw ArgumentError(std::string(to_string(f)) + ": " + what);
}

void require_eps(Family f, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) invalid(f, "eps must lie in (0, 1)");
}

}  // namespace

AnalyticDisc paper_disc(Family f, FamilyParams p) {
  if (p.dim < 2) invalid(f, "dimension must be >= 2");
  switch (f) {
    case Family::F1:
      if (!(std::abs(p.c) < 1.0)) invalid(f, "|c| must be < 1");
      break;
    case Family::F2:
      require_eps(f, p.eps);
      if (!(p.eps + std::sqrt(p.eps) < 1.0)) invalid(f, "eps + sqrt(eps) must be < 1");
      break;
    case Family::F3: {
      require_eps(f, p.eps);
      if (!(p.mu > 0.5)) invalid(f, "requires mu > 1/2");
      if (!(p.delta > 0.0 && p.delta <= p.eps)) invalid(f, "requires 0 < delta <= eps");
      if (p.mu > 1.0 && !(p.delta > (1.0 - 1.0 / (2.0 * p.mu)) * p.eps))
        invalid(f, "Case 2.1 requires delta > (1 - 1/(2 mu)) eps when mu > 1");
      if (!(f3_alpha(p.eps, p.delta, p.mu) < 1.0)) invalid(f, "alpha must be < 1");
      if (!(p.eps + std::pow(p.eps, 1.0 - 1.0 / (2.0 * p.mu)) < 1.0)) invalid(f, "first coordinate leaves the unit disc");
      break;
    }
    case Family::F4: {
      require_eps(f, p.eps);
      if (!(p.mu > 1.0)) invalid(f, "Case 2.2 requires mu > 1");
      if (!(p.delta > 0.0 && p.delta <= (1.0 - 1.0 / (2.0 * p.mu)) * p.eps))
        invalid(f, "Case 2.2 requires 0 < delta <= (1 - 1/(2 mu)) eps");
      if (p.a0 == 0.0) p.a0 = f4_a0(p.mu);
      if (!(p.a0 > 0.0)) invalid(f, "a0 must be positive");
      const int nu = f4_nu(p.mu);
      const double a = p.a0 * std::pow(p.eps, 1.0 - nu / (2.0 * p.mu));
      if (!(f4_alpha(p.eps, p.delta, p.mu, p.a0) < 1.0)) invalid(f, "alpha must be < 1");
      if (!(p.delta + a < 1.0)) invalid(f, "first coordinate leaves the unit disc");
      break;
    }
    case Family::F5:
      require_eps(f, p.eps);
      if (!(p.delta > 0.0 && p.delta < 1.0)) invalid(f, "delta must lie in (0, 1)");
      break;
    case Family::F6: require_eps(f, p.eps); break;
    case Family::F7:
    case Family::F8: {
      require_eps(f, p.eps);
      if (f == Family::F7 && !(p.mu > 1.0)) invalid(f, "requires mu > 1");
      if (f == Family::F8 && !(p.mu >= 1.0)) invalid(f, "requires mu >= 1");
      if (p.C < 0.0) invalid(f, "C must be positive");
      if (p.C == 0.0) p.C = family_constant(f, p);
      if (!(p.eps + p.C * std::pow(p.eps, 1.0 - 1.0 / p.mu) < 1.0)) invalid(f, "first coordinate leaves the unit disc");
      break;
    }
  }
  return AnalyticDisc::explicit_family(f, p);
}

InterpolationNodes interpolation_nodes(Family f, const FamilyParams& p) {
  switch (f) {
    case Family::F3: return {0.0, f3_alpha(p.eps, p.delta, p.mu)};
    case Family::F4: return {0.0, f4_alpha(p.eps, p.delta, p.mu, p.a0 > 0.0 ? p.a0 : f4_a0(p.mu))};
    case Family::F5: return {-p.eps, -p.delta};
    default: return {0.0, 0.0};
  }
}

}  // namespace kobalab
