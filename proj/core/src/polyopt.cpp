#include "kobalab/polyopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "kobalab/optimize.hpp"

namespace kobalab {

namespace {

enum class Target { Lempert, KR };

struct Problem {
  const DomainSpec& domain;
  CPoint z;
  CPoint v;  // w - z for Lempert, X for KR
  Target target;
  int degree;
  std::size_t n;
  std::vector<Complex> nodes;
  std::vector<std::vector<Complex>> powers;  // powers[i][k] = nodes[i]^k
  std::vector<Complex> chart;                // outer automorphism centres; z and v are then chart coordinates

  void add_node(Complex nd) {
    std::vector<Complex> pw(degree + 1);
    pw[0] = 1.0;
    for (int k = 1; k <= degree; ++k) pw[k] = pw[k - 1] * nd;
    nodes.push_back(nd);
    powers.push_back(std::move(pw));
  }

  std::size_t free_coeffs() const { return static_cast<std::size_t>(degree - 1); }
  std::size_t dims() const { return 1 + 2 * n * free_coeffs(); }

  // x = (log alpha, Re p_{j,k}, Im p_{j,k}, ...)
  std::vector<std::vector<Complex>> coefficients(std::span<const double> x) const {
    const double alpha = std::exp(x[0]);
    const std::size_t f = free_coeffs();
    std::vector<std::vector<Complex>> c(n, std::vector<Complex>(degree + 1));
    for (std::size_t j = 0; j < n; ++j) {
      auto p = [&](std::size_t k) {
        return k < f ? Complex(x[1 + 2 * (j * f + k)], x[2 + 2 * (j * f + k)]) : Complex{};
      };
      c[j][0] = z[j];
      if (target == Target::Lempert) {
        c[j][1] = v[j] / alpha - alpha * p(0);
        for (int k = 2; k <= degree; ++k) c[j][k] = p(k - 2) - alpha * p(k - 1);
      } else {
        c[j][1] = v[j] / alpha;
        for (int k = 2; k <= degree; ++k) c[j][k] = p(k - 2);
      }
    }
    return c;
  }

  double margin_at(const std::vector<std::vector<Complex>>& c, std::size_t i, std::vector<Complex>& pt) const {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc{};
      for (int k = 0; k <= degree; ++k) acc += c[j][k] * powers[i][k];
      pt[j] = chart.empty() ? acc : (acc + chart[j]) / (1.0 + std::conj(chart[j]) * acc);
    }
    return domain.defining_margin(pt);
  }

  double worst_margin(const std::vector<std::vector<Complex>>& c, double buffer, double* penalty) const {
    double worst = -std::numeric_limits<double>::infinity();
    double pen = 0.0;
    std::vector<Complex> pt(n);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double m = margin_at(c, i, pt);
      worst = std::max(worst, m);
      const double e = std::max(0.0, m + buffer);
      pen += e * e;
    }
    if (penalty) *penalty = pen;
    return worst;
  }
};

Problem make_problem(const DomainSpec& domain, const CPoint& z, const CPoint& v, Target t, int degree,
                     const std::vector<double>& radii, int angles) {
  if (degree < 2) throw ArgumentError("polynomial discs need degree >= 2");
  Problem p{domain, z, v, t, degree, z.dim(), {}, {}, {}};
  if (domain.kind() == DomainKind::PolyDisc) {
    // Work in the coordinatewise automorphism charts centred at z: the extremal discs become linear there.
    p.chart.assign(z.coords().begin(), z.coords().end());
    for (std::size_t j = 0; j < p.n; ++j) {
      const Complex c = z[j];
      p.v[j] = t == Target::Lempert ? v[j] / (1.0 - std::conj(c) * (c + v[j])) : v[j] / (1.0 - std::norm(c));
      p.z[j] = 0.0;
    }
  }
  for (double r : radii)
    for (int a = 0; a < angles; ++a) p.add_node(std::polar(r, 2.0 * std::numbers::pi * (a + 0.5) / angles));
  return p;
}

AnalyticDisc to_disc(const Problem& p, std::span<const double> x) {
  return AnalyticDisc::polynomial(p.coefficients(x), p.chart);
}

bool penalty_feasible(const Problem& p, double log_alpha) {
  std::vector<double> x(p.dims(), 0.0);
  x[0] = log_alpha;
  return p.worst_margin(p.coefficients(x), 0.0, nullptr) < 0.0;
}

std::vector<double> minimize_stages(const Problem& p, std::vector<double> x, const std::vector<double>& weights,
                                    int evals_per_stage, double buffer, double step, int& evals) {
  const bool lempert = p.target == Target::Lempert;
  for (double lambda : weights) {
    const Objective f = [&](std::span<const double> y) {
      if (lempert && y[0] >= 0.0) return 1e30;
      double pen = 0.0;
      p.worst_margin(p.coefficients(y), buffer, &pen);
      return std::exp(y[0]) + lambda * pen;
    };
    SimplexOptions so;
    so.max_evals = evals_per_stage;
    so.initial_step = step;
    const auto res = nelder_mead(f, x, so);
    x = res.x;
    evals += res.evals;
    step *= 0.5;
  }
  return x;
}

// Residuals max(0, margin_i + buffer) as functions of P with alpha fixed; zero exactly on the feasible set.
struct PenaltyResiduals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  using QRSolver = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;
  using Index = Eigen::Index;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Problem* p;
  double log_alpha;
  double buffer;
  mutable int evals = 0;
  mutable std::vector<double> full;

  int inputs() const { return static_cast<int>(p->dims()) - 1; }
  int values() const { return static_cast<int>(p->nodes.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    ++evals;
    full.resize(p->dims());
    full[0] = log_alpha;
    for (Eigen::Index k = 0; k < x.size(); ++k) full[static_cast<std::size_t>(k) + 1] = x[k];
    const auto c = p->coefficients(full);
    std::vector<Complex> pt(p->n);
    for (std::size_t i = 0; i < p->nodes.size(); ++i) {
      const double m = p->margin_at(c, i, pt);
      r[static_cast<Eigen::Index>(i)] = std::max(0.0, m + buffer);
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    Eigen::VectorXd r0(values()), r1(values());
    (*this)(x, r0);
    Eigen::VectorXd y = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
      y[k] = x[k] + h;
      (*this)(y, r1);
      jac.col(k) = (r1 - r0) / h;
      y[k] = x[k];
    }
    return 0;
  }
};

// Drives P towards the feasible set at fixed alpha; returns the updated parameter vector.
std::vector<double> restore_feasibility(const Problem& p, std::vector<double> x, int max_evals, double buffer,
                                        int& evals) {
  PenaltyResiduals functor{&p, x[0], buffer, 0, {}};
  Eigen::LevenbergMarquardt<PenaltyResiduals> lm(functor);
  lm.setMaxfev(std::max(10, max_evals / static_cast<int>(p.dims())));
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(x.data() + 1, static_cast<Eigen::Index>(x.size()) - 1);
  lm.minimize(y);
  evals += functor.evals;
  for (Eigen::Index k = 0; k < y.size(); ++k) x[static_cast<std::size_t>(k) + 1] = y[k];
  return x;
}

bool nodes_feasible(const Problem& p, std::span<const double> x, double buffer) {
  return p.worst_margin(p.coefficients(x), 0.0, nullptr) <= -0.5 * buffer;
}

// Bisection on alpha: feasibility is monotone since zeta -> zeta alpha/alpha' maps admissible discs to admissible discs.
std::optional<std::vector<double>> shrink_alpha(const Problem& p, std::vector<double> x, const PolyOptOptions& o,
                                                int& evals) {
  const bool lempert = p.target == Target::Lempert;
  // Grow alpha until feasibility can be restored.
  for (int grow = 0; !nodes_feasible(p, x, o.buffer); ++grow) {
    x = restore_feasibility(p, x, o.max_evals, o.buffer, evals);
    if (nodes_feasible(p, x, o.buffer)) break;
    if (grow == 12) return std::nullopt;
    x[0] = lempert ? 0.5 * x[0] : x[0] + std::log(4.0);
  }
  std::vector<double> best = x;
  double hi = x[0];
  double lo = lempert ? hi + std::log(1e-6) : hi - std::log(1e6);
  for (int it = 0; it < o.bisection_steps; ++it) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> trial = best;
    trial[0] = mid;
    if (!nodes_feasible(p, trial, o.buffer)) trial = restore_feasibility(p, trial, o.max_evals, o.buffer, evals);
    if (nodes_feasible(p, trial, o.buffer)) {
      hi = mid;
      best = trial;
    } else {
      lo = mid;
    }
  }
  return best;
}

double penalized(const Problem& p, std::span<const double> x, double lambda, double buffer) {
  double pen = 0.0;
  p.worst_margin(p.coefficients(x), buffer, &pen);
  return std::exp(x[0]) + lambda * pen;
}

std::optional<PolyOptResult> run(const Problem& coarse, const Problem& fine, const PolyOptOptions& o) {
  const bool lempert = fine.target == Target::Lempert;
  const double hi = lempert ? -1e-9 : std::log(1e8);
  // Smallest straight disc feasible on the fine grid sets the scale.
  double log_alpha0 = lempert ? std::log(0.9) : 0.0;
  if (penalty_feasible(fine, hi)) {
    log_alpha0 = bisect([&](double s) { return penalty_feasible(fine, s); }, std::log(1e-8), hi, 50);
    log_alpha0 = lempert ? 0.5 * log_alpha0 : log_alpha0 + std::log(1.1);
  }

  const std::size_t dims = fine.dims();
  const std::size_t restarts = static_cast<std::size_t>(std::max(1, o.restarts));
  std::vector<std::vector<double>> screened(restarts);
  std::vector<int> evals(restarts, 0);
  parallel_for(restarts, [&](std::size_t r) {
    Rng rng(o.seed * 7919u + static_cast<unsigned>(r));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> shrink(std::log(0.3), 0.0);
    std::vector<double> x(dims, 0.0);
    x[0] = log_alpha0;
    if (r > 0) {
      x[0] += shrink(rng);
      for (std::size_t k = 1; k < dims; ++k) x[k] = 0.2 * gauss(rng);
    }
    screened[r] = minimize_stages(coarse, x, o.screen_weights, o.screen_evals, o.buffer, 0.1, evals[r]);
  });

  const double rank_weight = o.screen_weights.empty() ? 1e4 : o.screen_weights.back();
  std::vector<double> score(restarts);
  for (std::size_t r = 0; r < restarts; ++r) score[r] = penalized(coarse, screened[r], rank_weight, o.buffer);
  std::vector<std::size_t> order(restarts);
  for (std::size_t r = 0; r < restarts; ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] < score[b]; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(1, o.polish_count))));

  std::vector<std::optional<std::vector<double>>> polished(order.size());
  std::vector<int> polish_evals(order.size(), 0);
  parallel_for(order.size(), [&](std::size_t i) { polished[i] = shrink_alpha(fine, screened[order[i]], o, polish_evals[i]); });

  int total_evals = 0;
  for (int e : evals) total_evals += e;
  for (int e : polish_evals) total_evals += e;

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < polished.size(); ++i)
    if (polished[i]) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return (*polished[a])[0] < (*polished[b])[0]; });

  int checked = 0;
  for (std::size_t i : idx) {
    if (checked++ >= o.verify_candidates) break;
    auto x = *polished[i];
    Problem refined = fine;
    double buffer = o.buffer;
    // Exchange rounds: violations found by the strict grid join the penalty nodes.
    for (int round = 0; round <= o.exchange_rounds; ++round) {
      const AnalyticDisc disc = to_disc(refined, x);
      auto rep = verify_containment(disc, refined.domain, VerifyMode::Grid, o.verify);
      if (rep.ok) return PolyOptResult{std::exp(x[0]), disc, rep, total_evals};
      if (round == o.exchange_rounds) break;
      const double r = std::abs(rep.witness_zeta);
      const double t = std::arg(rep.witness_zeta);
      const double dt = 2.0 * std::numbers::pi / o.verify.angles;
      for (double radius : {r, 0.5 * (1.0 + r), 1.0})
        for (int k = -2; k <= 2; ++k) refined.add_node(std::polar(radius, t + k * dt));
      buffer *= 2.0;
      x = restore_feasibility(refined, x, o.max_evals, buffer, total_evals);
      while (!nodes_feasible(refined, x, buffer) && (!lempert || x[0] < -1e-9)) {
        x[0] = std::min(lempert ? -1e-9 : x[0] + 1.0, x[0] + 1e-4);
        x = restore_feasibility(refined, x, o.max_evals, buffer, total_evals);
        if (lempert && x[0] >= -1e-9) break;
      }
    }
  }
  return std::nullopt;
}

void require_inside(const DomainSpec& domain, const CPoint& z) {
  if (!contains(domain, z).inside) throw ArgumentError("point is not in the domain");
}

bool subharmonic_margin(const DomainSpec& d) { return d.kind() == DomainKind::PolyDisc || d.kind() == DomainKind::Ball; }

std::optional<PolyOptResult> solve(const DomainSpec& domain, const CPoint& z, const CPoint& v, Target t,
                                   const PolyOptOptions& opts) {
  if (subharmonic_margin(domain)) {
    const std::vector<double> circle{1.0};
    return run(make_problem(domain, z, v, t, opts.degree, circle, opts.screen_angles),
               make_problem(domain, z, v, t, opts.degree, circle, opts.circle_angles), opts);
  }
  return run(make_problem(domain, z, v, t, opts.degree, opts.screen_radii, opts.screen_angles),
             make_problem(domain, z, v, t, opts.degree, opts.penalty_radii, opts.penalty_angles), opts);
}

}  // namespace

std::optional<PolyOptResult> optimize_lempert_disc(const DomainSpec& domain, const CPoint& z, const CPoint& w,
                                                   const PolyOptOptions& opts) {
  require_inside(domain, z);
  require_inside(domain, w);
  return solve(domain, z, w - z, Target::Lempert, opts);
}

std::optional<PolyOptResult> optimize_kr_disc(const DomainSpec& domain, const CPoint& z, const CPoint& X,
                                              const PolyOptOptions& opts) {
  require_inside(domain, z);
  if (X.dim() != z.dim()) throw ArgumentError("vector dimension does not match the point");
  return solve(domain, z, X, Target::KR, opts);
}

}  // namespace kobalab
