#include "kobalab/sibony.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "kobalab/optimize.hpp"

namespace kobalab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double tail_norm2(const CPoint& z) {
  double s = 0.0;
  for (std::size_t j = 1; j < z.dim(); ++j) s += std::norm(z[j]);
  return s;
}

double g_margin(double mu, const CPoint& z) {
  double s = 0.0, box = std::abs(z[0]) - 1.0;
  for (std::size_t j = 1; j < z.dim(); ++j) {
    s += std::pow(std::abs(z[j]), mu);
    box = std::max(box, std::abs(z[j]) - 1.0);
  }
  return std::max(box, z[0].real() - s);
}

Complex unit_disc_sample(Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return std::polar(std::sqrt(U(rng)), 2.0 * std::numbers::pi * U(rng));
}

// Random point of the sphere of radius R in C^(n-1).
std::vector<Complex> sphere_sample(Rng& rng, std::size_t m, double R) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<Complex> v(m);
  double s = 0.0;
  for (auto& c : v) {
    c = Complex(N(rng), N(rng));
    s += std::norm(c);
  }
  for (auto& c : v) c *= R / std::sqrt(s);
  return v;
}

Eigen::MatrixXcd f_branch_hessian(const CandidateFunction& c, const CPoint& z) {
  const std::size_t n = z.dim();
  const double s = std::pow(c.eps, 1.0 / c.mu);
  const Complex G = s * (z[0] + c.eps) / (z[0] - c.eps);
  const Complex dG = s * (-2.0 * c.eps) / ((z[0] - c.eps) * (z[0] - c.eps));
  const double S = std::norm(G) + tail_norm2(z);
  std::vector<Complex> Si(n);  // dS/dz_i
  Si[0] = dG * std::conj(G);
  for (std::size_t j = 1; j < n; ++j) Si[j] = std::conj(z[j]);
  Eigen::MatrixXcd H(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double Sij = i != j ? 0.0 : (i == 0 ? std::norm(dG) : 1.0);
      H(i, j) = (Sij * S - Si[i] * std::conj(Si[j])) / (S * S);
    }
  return H;
}

Eigen::MatrixXcd radial_branch_hessian(const CandidateFunction& c, const CPoint& z) {
  const std::size_t n = z.dim();
  const double r2 = tail_norm2(z);
  const double k = 1.0 + c.alpha / 2.0;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      H(i, j) = k * ((i == j ? r2 : 0.0) - std::conj(z[i]) * z[j]) / (r2 * r2);
  return H;
}

double relative_min_eigen(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  const double trace = H.trace().real();
  return es.eigenvalues().minCoeff() / std::max(1.0, std::abs(trace));
}

void require_candidate_args(double mu, double eps, std::size_t dim) {
  if (!(mu > 1.0 && mu <= 2.0)) throw ArgumentError("the Sibony candidate needs 1 < mu <= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0, 1)");
  if (dim < 2) throw ArgumentError("dimension must be >= 2");
}

}  // namespace

double CandidateFunction::collar_inner() const { return 0.5 * collar_outer(); }
double CandidateFunction::collar_outer() const { return c1 * std::pow(eps, 1.0 / mu); }
double CandidateFunction::smooth_radius() const { return std::pow(L, -1.0 / alpha); }

double CandidateFunction::f(Complex z1) const {
  return std::pow(eps, 2.0 / mu) * std::norm((z1 + eps) / (z1 - eps));
}

double CandidateFunction::log_f_branch(const CPoint& z) const { return std::log(f(z[0]) + tail_norm2(z)); }

double CandidateFunction::log_radial_branch(const CPoint& z) const {
  const double r2 = tail_norm2(z);
  if (r2 == 0.0) return kNegInf;
  return std::log(L) + (1.0 + alpha / 2.0) * std::log(r2);
}

double CandidateFunction::u(const CPoint& z) const {
  const double r = std::sqrt(tail_norm2(z));
  const double radial = log_radial_branch(z);
  if (r <= collar_outer()) return std::max(log_f_branch(z), radial) - L_prime;
  return radial - L_prime;
}

double CandidateFunction::levi_at_base(const CPoint& X) const {
  return std::exp(-L_prime) * (f_levi(mu, eps, -eps) * std::norm(X[0]) + tail_norm2(X));
}

double f_levi(double mu, double eps, Complex zeta) {
  const double d = std::abs(zeta - eps);
  return std::pow(eps, 2.0 / mu) * 4.0 * eps * eps / (d * d * d * d);
}

double adaptive_alpha(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0, 1)");
  return eps < std::exp(-1.0) ? 1.0 / std::log(1.0 / eps) : 1.0;
}

double find_c1(double mu, double eps, std::size_t dim, const SamplingOptions& opts) {
  require_candidate_args(mu, eps, dim);
  const std::size_t m = dim - 1;
  // Directions on the unit sphere of C^(n-1), plus the equal-moduli direction where
  // sum |z_j|^mu is largest for mu <= 2.
  Rng rng(opts.seed);
  std::vector<std::vector<Complex>> dirs;
  dirs.push_back(std::vector<Complex>(m, Complex(1.0 / std::sqrt(static_cast<double>(m)))));
  const std::size_t count = std::max<std::size_t>(1, opts.samples / 10);
  for (std::size_t i = 0; i < count; ++i) dirs.push_back(sphere_sample(rng, m, 1.0));
  // Re z1 < sum |z_j|^mu is approached from inside, so the implication holds iff the
  // sampled sup of sum |z_j|^mu on the sphere of radius c eps^(1/mu) is <= eps/2.
  auto holds = [&](double c) {
    const double R = c * std::pow(eps, 1.0 / mu);
    if (R >= 1.0) return false;
    double sup = 0.0;
    for (const auto& d : dirs) {
      double s = 0.0;
      for (const auto& x : d) s += std::pow(std::abs(x) * R, mu);
      sup = std::max(sup, s);
    }
    return sup <= eps / 2.0;
  };
  if (holds(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo * (1.0 - 1e-9);
}

AdmissibilityReport check_admissibility(const CandidateFunction& c, const SamplingOptions& opts) {
  AdmissibilityReport rep;
  rep.max_u = kNegInf;
  rep.min_dominance = std::numeric_limits<double>::infinity();
  rep.min_eigen_relative = std::numeric_limits<double>::infinity();
  Rng rng(opts.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t n = c.dim;

  auto fail = [&](std::string why, const CPoint& z) {
    if (rep.failure.empty()) {
      rep.failure = std::move(why);
      rep.witness = z;
    }
  };

  // Points of G_mu: uniform in the polydisc by rejection, every fourth one with
  // the tail drawn from the collar and every fourth near p_eps.
  std::size_t accepted = 0, attempts = 0;
  while (accepted < opts.samples && attempts < 100 * opts.samples) {
    ++attempts;
    CPoint z(n);
    const int kind = static_cast<int>(attempts % 4);
    if (kind == 1) {
      const double r = c.collar_inner() + U(rng) * (c.collar_outer() - c.collar_inner());
      const auto t = sphere_sample(rng, n - 1, r);
      z[0] = unit_disc_sample(rng);
      for (std::size_t j = 1; j < n; ++j) z[j] = t[j - 1];
    } else if (kind == 2) {
      const double r = c.eps * U(rng);
      z[0] = -c.eps + std::polar(r, 2.0 * std::numbers::pi * U(rng));
      const auto t = sphere_sample(rng, n - 1, c.eps * U(rng));
      for (std::size_t j = 1; j < n; ++j) z[j] = t[j - 1];
    } else {
      for (std::size_t j = 0; j < n; ++j) z[j] = unit_disc_sample(rng);
    }
    if (!(g_margin(c.mu, z) < 0.0)) continue;
    ++accepted;

    const double u = c.u(z);
    rep.max_u = std::max(rep.max_u, u);
    if (u > 0.0) fail("u > 0", z);

    const double r = std::sqrt(tail_norm2(z));
    const double A = c.log_f_branch(z), B = c.log_radial_branch(z);
    if (r >= c.collar_inner() && r <= c.collar_outer()) {
      rep.min_dominance = std::min(rep.min_dominance, B - A);
      if (B < A) fail("f-branch exceeds the radial branch on the collar", z);
    }

    const bool inner = r <= c.collar_outer();
    if (inner && std::abs(A - B) < 1e-6) {
      ++rep.seam_points;
      continue;
    }
    const bool f_active = inner && A > B;
    if (f_active && !(std::isfinite(A))) continue;
    if (!f_active && r == 0.0) continue;
    const double e = relative_min_eigen(f_active ? f_branch_hessian(c, z) : radial_branch_hessian(c, z));
    rep.min_eigen_relative = std::min(rep.min_eigen_relative, e);
    if (e < -1e-8) fail("complex Hessian of u has a negative eigenvalue", z);
  }
  rep.samples = accepted;
  if (accepted < opts.samples) fail("could not sample enough points of the domain", CPoint(n));
  rep.ok = rep.failure.empty();
  return rep;
}

CandidateFunction sibony_candidate(double mu, double eps, double alpha, double c1, std::size_t dim,
                                   const SamplingOptions& opts) {
  require_candidate_args(mu, eps, dim);
  if (!(alpha > 0.0)) throw ArgumentError("gluing exponent alpha must be positive");
  if (c1 < 0.0) throw ArgumentError("c1 must be nonnegative");
  CandidateFunction c;
  c.mu = mu;
  c.eps = eps;
  c.alpha = alpha;
  c.dim = dim;
  c.c1 = c1 > 0.0 ? c1 : find_c1(mu, eps, dim, opts);
  // On Re z1 <= eps/2 the ratio |(z1 + eps)/(z1 - eps)| is at most 3.
  c.c2 = 9.0 + c.c1 * c.c1;
  c.c3 = std::pow(c.c1 / 2.0, 2.0 + alpha);
  c.L = c.c2 / c.c3 * std::pow(eps, -alpha / mu);
  const double R = std::sqrt(static_cast<double>(dim - 1));
  c.L_prime = std::max({std::log(c.L) + (2.0 + alpha) * std::log(R), std::log(c.c2) + 2.0 / mu * std::log(eps),
                        std::log(c.L) + (2.0 + alpha) * std::log(c.collar_outer())});
  const AdmissibilityReport rep = check_admissibility(c, opts);
  if (!rep.ok) {
    std::string w;
    for (const auto& x : rep.witness) w += "(" + fmt(x.real()) + "," + fmt(x.imag()) + ")";
    throw ConstructionError("Sibony candidate (mu=" + fmt(mu) + ", eps=" + fmt(eps) + ", alpha=" + fmt(alpha) +
                            ") fails admissibility: " + rep.failure + " at " + w);
  }
  return c;
}

ScalarField f_branch(const CandidateFunction& c) {
  ScalarField s;
  s.name = "f-branch";
  s.eval = [c](const CPoint& z) { return c.f(z[0]) + tail_norm2(z); };
  s.closed_levi = [c](const CPoint& z, const CPoint& X) {
    return f_levi(c.mu, c.eps, z[0]) * std::norm(X[0]) + tail_norm2(X);
  };
  return s;
}

LeviEvaluation levi_form(const ScalarField& fn, const CPoint& z, const CPoint& X, bool force_fd, double scale) {
  z.require_same_dim(X);
  LeviEvaluation out;
  out.point = z;
  out.direction = X;
  if (fn.closed_levi && !force_fd) {
    out.value = fn.closed_levi(z, X);
    out.method = "closed-form";
    return out;
  }
  if (!fn.eval) throw ArgumentError("scalar field has no evaluator");
  if (scale <= 0.0) scale = z.norm() > 0.0 ? z.norm() : 1.0;
  const double f0 = fn.eval(z);
  auto second = [&](const CPoint& v, double h) {
    return (fn.eval(z + h * v) - 2.0 * f0 + fn.eval(z - h * v)) / (h * h);
  };
  const CPoint iX = Complex(0.0, 1.0) * X;
  auto levi = [&](double h) { return 0.25 * (second(X, h) + second(iX, h)); };
  const double h = 1e-5 * scale;
  out.value = (4.0 * levi(h / 2.0) - levi(h)) / 3.0;
  if (!std::isfinite(out.value)) throw NumericError("non-finite second differences in the Levi form");
  out.method = "finite-difference";
  return out;
}

Bound sibony_lower(double mu, double eps, const CPoint& X, const SamplingOptions& opts) {
  const std::size_t n = X.dim();
  require_candidate_args(mu, eps, n);
  Bound b;
  b.quantity = Quantity::Sibony;
  b.direction = Direction::Lower;
  b.grade = Grade::Numeric;
  b.value = -1.0;

  // |z'|^2 / (n - 1): vanishes at p_eps, log is psh, values in [0, 1) on the polydisc.
  const double tail = std::sqrt(tail_norm2(X) / static_cast<double>(n - 1));
  b.value = tail;
  b.method = "tail-norm";
  b.derivation = {"|z'|^2 / (n - 1) gives " + fmt(tail)};

  std::string errors;
  for (double alpha : {1.0, adaptive_alpha(eps)}) {
    try {
      const CandidateFunction c = sibony_candidate(mu, eps, alpha, 0.0, n, opts);
      const double v = std::sqrt(c.levi_at_base(X));
      b.derivation.push_back("candidate alpha=" + fmt(alpha) + " c1=" + fmt(c.c1) + " c2=" + fmt(c.c2) + " c3=" +
                             fmt(c.c3) + " L=" + fmt(c.L) + " L'=" + fmt(c.L_prime) + " gives " + fmt(v));
      if (v > b.value) {
        b.value = v;
        b.method = "candidate(alpha=" + fmt(alpha) + ")";
      }
    } catch (const ConstructionError& e) {
      errors += std::string(e.what()) + "; ";
    }
  }
  if (b.value <= 0.0 && !errors.empty() && !X.is_zero()) throw ConstructionError("no admissible candidate: " + errors);
  b.derivation.push_back("admissibility is sampled with " + std::to_string(opts.samples) + " points (seed " +
                         std::to_string(opts.seed) + ")");
  return b;
}

}  // namespace kobalab
