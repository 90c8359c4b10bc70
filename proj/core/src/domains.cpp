#include "kobalab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kobalab/optimize.hpp"

namespace kobalab {

// ---------------------------------------------------------------------------
// ModulusOfContinuity

ModulusOfContinuity ModulusOfContinuity::power(double p) {
  if (!(p > 1.0)) throw ArgumentError("power modulus needs exponent > 1");
  return {Kind::Power, p};
}

ModulusOfContinuity ModulusOfContinuity::log_type() { return {Kind::Log, 0.0}; }

double ModulusOfContinuity::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  switch (kind) {
    case Kind::Power: return std::pow(x, exponent);
    case Kind::Log: return x <= 1.0 ? x / (1.0 - std::log(x)) : x;
  }
  return 0.0;
}

std::string ModulusOfContinuity::name() const {
  if (kind == Kind::Log) return "log";
  std::ostringstream os;
  os << "power(" << exponent << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Quadratic normalization

double QuadraticForm::operator()(Complex z1, Complex z2) const {
  return a11 * std::norm(z1) + (b11 * z1 * z1).real() + (c12 * z1 * std::conj(z2)).real() + (d12 * z1 * z2).real() +
         (alpha2 * z2 * z2).real() + levi22 * std::norm(z2);
}

CPoint QuadNormalization::to_original(const CPoint& z) const {
  return CPoint{z[0] + alpha1 * z[0] * z[0] - alpha2 * z[1] * z[1], z[1]};
}

// ---------------------------------------------------------------------------
// DomainSpec

std::string_view to_string(DomainKind k) {
  switch (k) {
    case DomainKind::PolyDisc: return "PolyDisc";
    case DomainKind::Ball: return "Ball";
    case DomainKind::GPlain: return "GPlain";
    case DomainKind::GTilde: return "GTilde";
    case DomainKind::GMinus: return "GMinus";
    case DomainKind::GPsi: return "GPsi";
    case DomainKind::Punctured: return "Punctured";
    case DomainKind::QuadImage: return "QuadImage";
  }
  return "?";
}

DomainKind domain_kind_from_string(std::string_view s) {
  for (auto k : {DomainKind::PolyDisc, DomainKind::Ball, DomainKind::GPlain, DomainKind::GTilde, DomainKind::GMinus,
                 DomainKind::GPsi, DomainKind::Punctured, DomainKind::QuadImage})
    if (to_string(k) == s) return k;
  throw ArgumentError("unknown domain variant '" + std::string(s) + "'");
}

namespace {

void require_dim(std::size_t n, std::size_t min_dim = 1) {
  if (n < min_dim) throw ArgumentError("domain dimension must be >= " + std::to_string(min_dim));
}

}  // namespace

DomainSpec DomainSpec::polydisc(std::size_t n) {
  require_dim(n);
  DomainSpec d;
  d.kind_ = DomainKind::PolyDisc;
  d.dim_ = n;
  return d;
}

DomainSpec DomainSpec::ball(std::size_t n) {
  require_dim(n);
  DomainSpec d;
  d.kind_ = DomainKind::Ball;
  d.dim_ = n;
  return d;
}

DomainSpec DomainSpec::g_plain(double mu, std::size_t n) {
  require_dim(n, 2);
  if (!(mu > 0.0 && mu <= 2.0)) throw ArgumentError("GPlain requires 0 < mu <= 2");
  DomainSpec d;
  d.kind_ = DomainKind::GPlain;
  d.dim_ = n;
  d.mu_ = mu;
  return d;
}

DomainSpec DomainSpec::g_tilde(double mu, std::size_t n) {
  require_dim(n, 2);
  if (!(mu > 0.0 && mu <= 2.0)) throw ArgumentError("GTilde requires 0 < mu <= 2");
  DomainSpec d;
  d.kind_ = DomainKind::GTilde;
  d.dim_ = n;
  d.mu_ = mu;
  return d;
}

DomainSpec DomainSpec::g_minus(double mu) {
  if (!(mu >= 1.0)) throw ArgumentError("GMinus requires mu >= 1");
  DomainSpec d;
  d.kind_ = DomainKind::GMinus;
  d.dim_ = 2;
  d.mu_ = mu;
  return d;
}

DomainSpec DomainSpec::g_psi(ModulusOfContinuity psi, std::size_t n) {
  require_dim(n, 2);
  DomainSpec d;
  d.kind_ = DomainKind::GPsi;
  d.dim_ = n;
  d.psi_ = psi;
  return d;
}

DomainSpec DomainSpec::punctured(const DomainSpec& base, std::vector<CPoint> excluded) {
  for (const auto& p : excluded)
    if (p.dim() != base.dim()) throw ArgumentError("excluded point dimension does not match base domain");
  DomainSpec d;
  d.kind_ = DomainKind::Punctured;
  d.dim_ = base.dim();
  d.mu_ = base.mu();
  d.base_ = std::make_shared<const DomainSpec>(base);
  d.excluded_ = std::move(excluded);
  return d;
}

DomainSpec DomainSpec::quad_image(const QuadNormalization& quad) {
  if (!(quad.radius > 0.0)) throw ArgumentError("QuadImage requires a positive radius");
  DomainSpec d;
  d.kind_ = DomainKind::QuadImage;
  d.dim_ = 2;
  d.quad_ = quad;
  return d;
}

const DomainSpec& DomainSpec::base() const {
  if (!base_) throw CapabilityError("domain has no base domain");
  return *base_;
}

bool DomainSpec::is_g_variant() const {
  return kind_ == DomainKind::GPlain || kind_ == DomainKind::GTilde || kind_ == DomainKind::GMinus ||
         kind_ == DomainKind::GPsi;
}

double DomainSpec::defining_margin(std::span<const Complex> z) const {
  double box = 0.0;
  for (const auto& c : z) box = std::max(box, std::norm(c));
  box = std::sqrt(box) - 1.0;

  // |c|^mu from |c|^2 without the hypot call.
  auto abs_pow = [](Complex c, double mu) {
    const double n = std::norm(c);
    return mu == 2.0 ? n : mu == 1.0 ? std::sqrt(n) : std::pow(n, 0.5 * mu);
  };
  auto tail_power = [&](double mu) {
    double s = 0.0;
    for (std::size_t j = 1; j < z.size(); ++j) s += abs_pow(z[j], mu);
    return s;
  };

  switch (kind_) {
    case DomainKind::PolyDisc: return box;
    case DomainKind::Ball: {
      double s = 0.0;
      for (const auto& c : z) s += std::norm(c);
      return std::sqrt(s) - 1.0;
    }
    case DomainKind::GPlain: return std::max(z[0].real() - tail_power(mu_), box);
    case DomainKind::GTilde: return std::max(z[0].real() - std::pow(std::abs(z[0].imag()), mu_) - tail_power(mu_), box);
    case DomainKind::GMinus: return std::max(z[0].real() + std::abs(z[0].imag()) - tail_power(mu_), box);
    case DomainKind::GPsi: {
      double tail = 0.0;
      for (std::size_t j = 1; j < z.size(); ++j) tail += std::norm(z[j]);
      return std::max(z[0].real() - psi_(std::abs(z[0].imag()) + std::sqrt(tail)), box);
    }
    case DomainKind::Punctured: {
      const double m = base_->defining_margin(z);
      for (const auto& p : excluded_)
        if (std::equal(z.begin(), z.end(), p.begin())) return std::max(m, 0.0);
      return m;
    }
    case DomainKind::QuadImage: {
      const Complex x1 = z[0] + quad_.alpha1 * z[0] * z[0] - quad_.alpha2 * z[1] * z[1];
      const double r = std::max(std::abs(z[0]), std::abs(z[1])) - quad_.radius;
      return std::max(x1.real() + quad_.form(x1, z[1]), r);
    }
  }
  return 1.0;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  switch (kind_) {
    case DomainKind::GPlain:
    case DomainKind::GTilde:
    case DomainKind::GMinus: os << "mu=" << mu_ << ", "; break;
    case DomainKind::GPsi: os << "psi=" << psi_.name() << ", "; break;
    case DomainKind::Punctured: os << base_->describe() << " minus " << excluded_.size() << " points, "; break;
    case DomainKind::QuadImage: os << "r=" << quad_.radius << ", "; break;
    default: break;
  }
  os << "n=" << dim_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Operations

Membership contains(const DomainSpec& domain, const CPoint& z) {
  if (z.dim() != domain.dim())
    throw ArgumentError("point of dimension " + std::to_string(z.dim()) + " for domain of dimension " +
                        std::to_string(domain.dim()));
  const double m = domain.defining_margin(z.coords());
  return {m < 0.0, m};
}

double containment_tolerance(const DomainSpec&) {
  // All model domains live in the unit polydisc, so the scale is 1.
  return 1e-12;
}

namespace {

BoundaryData g_tilde_boundary(const DomainSpec& domain, const CPoint& z, const BoundaryOptions& opts) {
  const std::size_t n = domain.dim();
  const double mu = domain.mu();
  // Boundary parametrization: (y, Re w2, Im w2, ...) -> (h + i y, w2, ...),
  // h = |y|^mu + sum |w_j|^mu.
  auto surface = [&](std::span<const double> p) {
    CPoint w(n);
    double h = std::pow(std::abs(p[0]), mu);
    for (std::size_t j = 1; j < n; ++j) {
      w[j] = Complex(p[2 * j - 1], p[2 * j]);
      h += std::pow(std::abs(w[j]), mu);
    }
    w[0] = Complex(h, p[0]);
    return w;
  };
  const Objective dist2 = [&](std::span<const double> p) {
    const CPoint w = surface(p);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(z[j] - w[j]);
    return s;
  };

  std::vector<std::vector<double>> starts;
  std::vector<double> s0(2 * n - 1, 0.0);
  starts.push_back(s0);
  s0[0] = z[0].imag();
  for (std::size_t j = 1; j < n; ++j) {
    s0[2 * j - 1] = z[j].real();
    s0[2 * j] = z[j].imag();
  }
  starts.push_back(s0);
  Rng rng(opts.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double spread = std::max(1e-3, 2.0 * std::abs(z[0].real()) + z.norm());
  for (int r = 0; r < opts.restarts; ++r) {
    auto s = s0;
    for (auto& v : s) v += spread * jitter(rng);
    starts.push_back(std::move(s));
  }
  SimplexOptions so;
  so.max_evals = 6000;
  so.initial_step = std::max(1e-4, 0.5 * spread);
  so.ftol = 1e-30;
  so.xtol = 1e-15;
  auto best = multi_start(dist2, starts, so);
  // polish from the incumbent with a small simplex
  so.initial_step = 1e-3 * std::max(1e-6, std::sqrt(best.value));
  auto polished = nelder_mead(dist2, best.x, so);
  if (polished.value < best.value) best = polished;

  BoundaryData out;
  out.grade = Grade::Numeric;
  out.gap = std::sqrt(best.value);
  out.nearest = surface(best.x);
  out.unique = mu >= 1.0 && out.nearest.norm() < opts.unique_neighborhood;

  // Faces of the unit polydisc.
  const double box_gap = 1.0 - z.max_abs();
  if (box_gap < out.gap) {
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(z[k]) > std::abs(z[j])) j = k;
    out.gap = box_gap;
    out.nearest = z;
    out.nearest[j] = z[j] == Complex{} ? Complex(1.0) : z[j] / std::abs(z[j]);
    out.unique = false;
  }
  out.inner_normal = out.gap > 0.0 ? (1.0 / out.gap) * (z - out.nearest) : CPoint::axis(n, -1.0);
  return out;
}

}  // namespace

BoundaryData boundary_data(const DomainSpec& domain, const CPoint& z, const BoundaryOptions& opts) {
  const auto mem = contains(domain, z);
  const std::size_t n = domain.dim();
  switch (domain.kind()) {
    case DomainKind::PolyDisc: {
      if (!mem.inside) throw ArgumentError("boundary_data: point is not in the domain");
      std::size_t j = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (std::abs(z[k]) > std::abs(z[j])) j = k;
      const Complex dir = z[j] == Complex{} ? Complex(1.0) : z[j] / std::abs(z[j]);
      BoundaryData out;
      out.gap = 1.0 - std::abs(z[j]);
      out.nearest = z;
      out.nearest[j] = dir;
      out.inner_normal = CPoint::axis(n, -dir, j);
      out.unique = z[j] != Complex{};
      return out;
    }
    case DomainKind::Ball: {
      if (!mem.inside) throw ArgumentError("boundary_data: point is not in the domain");
      const double r = z.norm();
      const CPoint dir = r > 0.0 ? (1.0 / r) * z : CPoint::axis(n, 1.0);
      BoundaryData out;
      out.gap = 1.0 - r;
      out.nearest = dir;
      out.inner_normal = Complex(-1.0) * dir;
      out.unique = r > 0.0;
      return out;
    }
    case DomainKind::GTilde:
      if (domain.mu() < 1.0) throw CapabilityError("boundary_data: GTilde supported only for mu >= 1");
      if (!mem.inside) throw ArgumentError("boundary_data: point is not in the domain");
      return g_tilde_boundary(domain, z, opts);
    default:
      throw CapabilityError("boundary_data: unsupported domain " + domain.describe());
  }
}

CPoint normal_point(const DomainSpec& domain, double t) {
  if (!(t > 0.0 && t < 1.0)) throw ArgumentError("normal_point: t must lie in (0, 1)");
  switch (domain.kind()) {
    case DomainKind::PolyDisc:
    case DomainKind::Ball: return CPoint::axis(domain.dim(), 1.0 - t);
    case DomainKind::Punctured: return normal_point(domain.base(), t);
    default: return CPoint::axis(domain.dim(), -t);
  }
}

double normal_parameter(const CPoint& z) {
  if (z.dim() == 0 || z[0].imag() != 0.0 || !(z[0].real() < 0.0 && z[0].real() > -1.0)) return -1.0;
  for (std::size_t j = 1; j < z.dim(); ++j)
    if (z[j] != Complex{}) return -1.0;
  return -z[0].real();
}

QuadNormalization normalize_quadratic(const QuadraticForm& q, const QuadNormalizationOptions& opts) {
  if (std::abs(q.levi22 + 1.0) > 1e-12)
    throw ArgumentError("normalize_quadratic: d^2 q / dz2 dz2bar (0) must equal -1");
  QuadNormalization out;
  out.form = q;
  out.c1 = std::abs(q.a11) + std::abs(q.b11);
  out.c2 = std::abs(q.c12) + std::abs(q.d12);
  const double a1 = out.c1 + 0.5 * out.c2 * out.c2 + 1.0;
  out.alpha1 = a1;
  out.alpha2 = q.alpha2;
  out.c3 = out.c1 + 0.5 * out.c2 * out.c2 + a1 + 1.0;

  const int g = opts.grid_per_axis;
  for (double r : opts.radii) {
    // Lipschitz bound for the quadratic part keeps the map injective on r D^2.
    if (2.0 * r * (std::abs(out.alpha1) + std::abs(out.alpha2)) >= 1.0) continue;
    out.radius = r;
    const DomainSpec image = DomainSpec::quad_image(out);
    bool ok = true;
    for (int i0 = 0; i0 < g && ok; ++i0)
      for (int i1 = 0; i1 < g && ok; ++i1)
        for (int i2 = 0; i2 < g && ok; ++i2)
          for (int i3 = 0; i3 < g && ok; ++i3) {
            auto coord = [&](int i) { return r * (-1.0 + (2.0 * i + 1.0) / g); };
            const Complex z1(coord(i0), coord(i1));
            const Complex z2(coord(i2), coord(i3));
            if (std::abs(z1) >= r || std::abs(z2) >= r) continue;
            if (!(z1.real() < 0.25 * std::norm(z2))) continue;
            if (!(image.defining_margin(std::vector<Complex>{z1, z2}) < 0.0)) ok = false;
          }
    if (ok) return out;
  }
  throw ConstructionError("normalize_quadratic: sampled inclusion failed at every tried radius");
}

}  // namespace kobalab
