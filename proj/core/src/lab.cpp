#include "kobalab/lab.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "kobalab/lower.hpp"
#include "kobalab/optimize.hpp"
#include "kobalab/serialize.hpp"
#include "kobalab/sibony.hpp"
#include "kobalab/upper.hpp"

namespace kobalab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ArgumentError("not a number: '" + std::string(s) + "'");
  return v;
}

UpperOptions explicit_only() {
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  return o;
}

std::string leg_methods(const Chain& c) {
  std::string s;
  for (const auto& leg : c.legs) {
    if (!s.empty()) s += "+";
    s += leg.method;
  }
  return s;
}

// Builds a row from a bound; eps and delta locate the grid point.
ReportRow row_of(const ExperimentConfig& cfg, double mu, double eps, double delta, const Bound& b,
                 std::string series) {
  ReportRow r;
  r.experiment = std::string(to_string(cfg.experiment));
  r.mu = mu;
  r.eps = eps;
  r.delta = delta;
  r.quantity = std::string(to_string(b.quantity));
  r.direction = std::string(to_string(b.direction));
  r.grade = std::string(to_string(b.grade));
  r.value = b.value;
  r.family = b.method;
  r.series = std::move(series);
  return r;
}

ReportRow plain_row(const ExperimentConfig& cfg, double mu, double eps, double delta, std::string quantity,
                    std::string direction, Grade g, double value, std::string family, std::string series) {
  ReportRow r;
  r.experiment = std::string(to_string(cfg.experiment));
  r.mu = mu;
  r.eps = eps;
  r.delta = delta;
  r.quantity = std::move(quantity);
  r.direction = std::move(direction);
  r.grade = std::string(to_string(g));
  r.value = value;
  r.family = std::move(family);
  r.series = std::move(series);
  return r;
}

ReportRow chain_row(const ExperimentConfig& cfg, double mu, double eps, double delta, const Chain& c,
                    std::string series) {
  ReportRow r = row_of(cfg, mu, eps, delta, chain_bound(c), std::move(series));
  r.family = leg_methods(c);
  return r;
}

class ExperimentError : public Error {
 public:
  using Error::Error;
};

// Runs body for every (mu, eps) task in parallel. Rows come back in task
// order; the first failure in task order is rethrown after partial rows are kept.
struct TaskOutcome {
  std::vector<ReportRow> rows;
  std::exception_ptr error;
  std::string where;
};

using TaskBody = std::function<std::vector<ReportRow>(std::size_t)>;

void run_tasks(std::size_t count, const TaskBody& body, const std::function<std::string(std::size_t)>& where,
               Report& report) {
  std::vector<TaskOutcome> out(count);
  parallel_for(count, [&](std::size_t i) {
    try {
      out[i].rows = body(i);
    } catch (...) {
      out[i].error = std::current_exception();
      out[i].where = where(i);
    }
  });
  for (auto& o : out) report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
  for (auto& o : out) {
    if (!o.error) continue;
    try {
      std::rethrow_exception(o.error);
    } catch (const std::exception& e) {
      throw ExperimentError(o.where + ": " + e.what());
    }
  }
}

// Fits every (series, mu) group of rows and fills slope-contrib.
void fit_series(Report& report, const std::map<std::string, std::function<std::optional<double>(double)>>& expected) {
  std::map<std::pair<std::string, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (r.series.empty() || !(r.value > 0.0)) continue;
    groups[{r.series, r.mu}].push_back(i);
  }
  for (const auto& [key, idx] : groups) {
    if (idx.size() < 3) continue;
    std::vector<std::pair<double, double>> pts;
    for (auto i : idx) pts.emplace_back(report.rows[i].eps, report.rows[i].value);
    const auto contrib = slope_contributions(pts);
    for (std::size_t k = 0; k < idx.size(); ++k) report.rows[idx[k]].slope_contrib = contrib[k];
    NamedFit nf{key.first, key.second, fit_exponent(pts), std::nullopt};
    if (auto it = expected.find(key.first); it != expected.end()) nf.expected_slope = it->second(key.second);
    report.fits.push_back(nf);
  }
}

void add_slope_checks(Report& report) {
  for (const auto& f : report.fits) {
    if (!f.expected_slope) continue;
    Check c;
    c.name = f.series + " slope, mu = " + short_fmt(f.mu);
    c.observed = f.fit.slope;
    c.expected = *f.expected_slope;
    c.tolerance = kSlopeTolerance;
    c.pass = std::abs(c.observed - c.expected) <= c.tolerance && f.fit.r2 >= kMinR2;
    c.detail = "R^2 = " + short_fmt(f.fit.r2) + " (need >= " + short_fmt(kMinR2) + ")";
    report.checks.push_back(c);
  }
}

Check value_check(std::string name, double observed, double expected, double tol, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.observed = observed;
  c.expected = expected;
  c.tolerance = tol;
  c.pass = std::abs(observed - expected) <= tol;
  c.detail = std::move(detail);
  return c;
}

// Lower rows never exceed upper rows of the same quantity at the same point.
void add_sandwich_check(Report& report, const std::string& lower_series, const std::string& upper_series) {
  std::map<std::pair<double, double>, double> lower;
  for (const auto& r : report.rows)
    if (r.series == lower_series) lower[{r.mu, r.eps}] = r.value;
  std::size_t n = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : report.rows) {
    if (r.series != upper_series) continue;
    const auto it = lower.find({r.mu, r.eps});
    if (it == lower.end()) continue;
    ++n;
    worst = std::max(worst, it->second - r.value);
    if (it->second > r.value) ++bad;
  }
  if (n == 0) return;
  Check c;
  c.name = lower_series + " <= " + upper_series;
  c.pass = bad == 0;
  c.observed = worst;
  c.expected = 0.0;
  c.detail = std::to_string(n) + " points, " + std::to_string(bad) + " violations; observed = max(lower - upper)";
  report.checks.push_back(c);
}

const CPoint kE1{Complex{1.0}, Complex{0.0}};

// ---------------------------------------------------------------------------

void exponents(const ExperimentConfig& cfg, Report& report) {
  const auto eps = cfg.grid.values();
  const std::size_t ne = eps.size();
  const UpperOptions ex = explicit_only();
  run_tasks(
      cfg.mus.size() * ne,
      [&](std::size_t i) {
        const double mu = cfg.mus[i / ne], e = eps[i % ne], d = cfg.delta(e);
        const DomainSpec dom = DomainSpec::g_plain(mu);
        const CPoint pe = normal_point(dom, e), pd = normal_point(dom, d);
        std::vector<ReportRow> rows;
        const Bound lo = mu > 0.5 ? sqrt_trick_lower(dom, d, e) : projection_lower(dom, pd, pe);
        rows.push_back(row_of(cfg, mu, e, d, lo, "ell-lower"));
        rows.push_back(row_of(cfg, mu, e, d, lempert_upper(dom, pd, pe, ex), "ell-upper"));
        rows.push_back(chain_row(cfg, mu, e, d, lempert_chain_upper(dom, pd, pe, 2, ex), "chain-upper"));
        return rows;
      },
      [&](std::size_t i) { return "mu = " + short_fmt(cfg.mus[i / ne]) + ", eps = " + short_fmt(eps[i % ne]); },
      report);
  fit_series(report, {{"ell-lower", expected_ell_slope},
                      {"ell-upper", expected_ell_slope},
                      {"chain-upper", expected_chain_slope}});
  add_slope_checks(report);
  add_sandwich_check(report, "ell-lower", "ell-upper");
}

void qti(const ExperimentConfig& cfg, Report& report) {
  const auto eps = cfg.grid.values();
  for (double mu : cfg.mus) {
    const QtiScan scan = qti_ratio_scan(mu, eps, cfg.delta);
    for (const auto& r : scan.rows) {
      report.rows.push_back(row_of(cfg, mu, r.eps, r.delta, r.lower, "ell-lower"));
      report.rows.push_back(row_of(cfg, mu, r.eps, r.delta, r.upper, "chain-upper"));
      report.rows.push_back(plain_row(cfg, mu, r.eps, r.delta, "ratio", "", weakest(r.lower.grade, r.upper.grade),
                                      r.ratio, "ell-lower/ell_m-upper", "ratio"));
    }
    if (scan.rows.size() >= 2) {
      const double gain = scan.rows.back().ratio / scan.rows.front().ratio;
      Check c;
      c.name = "ratio growth from eps = " + short_fmt(scan.rows.front().eps) + " to " + short_fmt(scan.rows.back().eps) +
               ", mu = " + short_fmt(mu);
      c.observed = gain;
      c.expected = 3.0;
      c.pass = gain >= 3.0;
      c.detail = "need ratio(eps_min) / ratio(eps_max) >= 3";
      report.checks.push_back(c);
    }
  }
  fit_series(report, {{"ratio", [](double mu) { return std::optional(-1.0 / (2.0 * mu)); }}});
  add_slope_checks(report);
}

void kr_gap(const ExperimentConfig& cfg, Report& report) {
  const auto eps = cfg.grid.values();
  const std::size_t ne = eps.size();
  const UpperOptions ex = explicit_only();
  run_tasks(
      cfg.mus.size() * ne,
      [&](std::size_t i) {
        const double mu = cfg.mus[i / ne], e = eps[i % ne];
        const DomainSpec dom = DomainSpec::g_plain(mu);
        const CPoint pe = normal_point(dom, e);
        std::vector<ReportRow> rows;
        rows.push_back(row_of(cfg, mu, e, 0.0, sqrt_trick_kr_lower(dom, e), "kappa-lower"));
        rows.push_back(row_of(cfg, mu, e, 0.0, kobayashi_royden_upper(dom, pe, kE1, ex), "kappa-upper"));
        rows.push_back(row_of(cfg, mu, e, 0.0, kr_decomposed_upper(dom, pe, kE1, 2, ex), "kappa2-upper"));
        return rows;
      },
      [&](std::size_t i) { return "mu = " + short_fmt(cfg.mus[i / ne]) + ", eps = " + short_fmt(eps[i % ne]); },
      report);
  fit_series(report, {{"kappa-lower", [](double mu) { return std::optional(-(1.0 - 1.0 / (2.0 * mu))); }},
                      {"kappa-upper", [](double mu) { return std::optional(-(1.0 - 1.0 / (2.0 * mu))); }},
                      {"kappa2-upper", [](double mu) { return std::optional(-(1.0 - 1.0 / mu)); }}});
  add_slope_checks(report);
  add_sandwich_check(report, "kappa-lower", "kappa-upper");
}

void sibony(const ExperimentConfig& cfg, Report& report) {
  const auto eps = cfg.grid.values();
  const std::size_t ne = eps.size();
  SamplingOptions so;
  so.seed = cfg.seed;
  std::vector<double> worst_rel(cfg.mus.size() * ne, 0.0);
  run_tasks(
      cfg.mus.size() * ne,
      [&](std::size_t i) {
        const double mu = cfg.mus[i / ne], e = eps[i % ne];
        std::vector<ReportRow> rows;
        rows.push_back(row_of(cfg, mu, e, 0.0, sibony_lower(mu, e, kE1, so), "sibony-lower"));
        CandidateFunction c;
        c.mu = mu;
        c.eps = e;
        const ScalarField f = f_branch(c);
        const CPoint pe = CPoint::axis(2, -e);
        const double closed = levi_form(f, pe, kE1).value;
        const double fd = levi_form(f, pe, kE1, true, e).value;
        worst_rel[i] = std::abs(fd - closed) / std::abs(closed);
        rows.push_back(plain_row(cfg, mu, e, 0.0, "levi", "", Grade::Certified, closed, "closed-form", ""));
        rows.push_back(plain_row(cfg, mu, e, 0.0, "levi", "", Grade::Numeric, fd, "finite-difference", ""));
        return rows;
      },
      [&](std::size_t i) { return "mu = " + short_fmt(cfg.mus[i / ne]) + ", eps = " + short_fmt(eps[i % ne]); },
      report);
  const double worst = *std::max_element(worst_rel.begin(), worst_rel.end());
  Check c;
  c.name = "closed-form Levi value against finite differences";
  c.observed = worst;
  c.expected = 0.0;
  c.tolerance = 1e-6;
  c.pass = worst <= 1e-6;
  c.detail = "max relative difference over " + std::to_string(worst_rel.size()) + " points";
  report.checks.push_back(c);
  fit_series(report, {{"sibony-lower", [](double mu) { return std::optional(-(1.0 - 1.0 / mu)); }}});
  add_slope_checks(report);
}

void minus_model(const ExperimentConfig& cfg, Report& report) {
  const auto eps = cfg.grid.values();
  const std::size_t ne = eps.size();
  const UpperOptions ex = explicit_only();
  run_tasks(
      cfg.mus.size() * ne,
      [&](std::size_t i) {
        const double mu = cfg.mus[i / ne], e = eps[i % ne], d = cfg.delta(e);
        const DomainSpec dom = DomainSpec::g_minus(mu);
        const CPoint pe = normal_point(dom, e), pd = normal_point(dom, d);
        std::vector<ReportRow> rows;
        if (mu > 0.5) rows.push_back(row_of(cfg, mu, e, d, sqrt_trick_lower(dom, d, e), "ell-lower"));
        Bound proj = projection_lower(dom, pd, pe);
        proj.quantity = Quantity::LempertM;
        proj.m = 2;
        rows.push_back(row_of(cfg, mu, e, d, proj, "chain-lower"));
        rows.push_back(chain_row(cfg, mu, e, d, lempert_chain_upper(dom, pd, pe, 2, ex), "chain-upper"));
        ReportRow k = row_of(cfg, mu, e, 0.0, kr_decomposed_upper(dom, pe, kE1, 2, ex), "kappa2-upper");
        rows.push_back(k);
        return rows;
      },
      [&](std::size_t i) { return "mu = " + short_fmt(cfg.mus[i / ne]) + ", eps = " + short_fmt(eps[i % ne]); },
      report);
  fit_series(report, {{"chain-upper", expected_chain_slope},
                      {"kappa2-upper", [](double mu) { return std::optional(-(1.0 - 1.0 / mu)); }}});
  add_slope_checks(report);
  add_sandwich_check(report, "chain-lower", "chain-upper");
  // Pinned values at mu = 2, (eps, delta) = (0.01, 0.005).
  if (std::find(cfg.mus.begin(), cfg.mus.end(), 2.0) != cfg.mus.end()) {
    const DomainSpec dom = DomainSpec::g_minus(2.0);
    const CPoint pe = normal_point(dom, 0.01), pd = normal_point(dom, 0.005);
    const Chain ch = lempert_chain_upper(dom, pd, pe, 2, ex);
    report.checks.push_back(value_check("ell_m upper at (0.01, 0.005), mu = 2", ch.aggregate_ell(),
                                        0.05 / std::sqrt(0.5), 1e-6, "legs " + leg_methods(ch)));
    const Bound k2 = kr_decomposed_upper(dom, pe, kE1, 2, ex);
    report.checks.push_back(value_check("kappa_m upper at eps = 0.01, mu = 2", k2.value, 17.071, 1e-3, k2.method));
  }
}

// Closed form ell on the unit ball of C^n.
double ball_lempert(const CPoint& z, const CPoint& w) {
  const double num = (1.0 - z.norm() * z.norm()) * (1.0 - w.norm() * w.norm());
  return std::sqrt(std::max(0.0, 1.0 - num / std::norm(1.0 - inner(w, z))));
}

void punctured_demo(const ExperimentConfig& cfg, Report& report) {
  constexpr std::size_t kPairs = 20;
  const DomainSpec ball = DomainSpec::ball(2);
  const DomainSpec punct = DomainSpec::punctured(ball, {CPoint(2)});
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto draw = [&] {
    for (;;) {
      CPoint p{Complex{U(rng), U(rng)}, Complex{U(rng), U(rng)}};
      const double r = p.norm();
      if (r > 0.1 && r < 0.7) return p;
    }
  };
  std::vector<std::pair<CPoint, CPoint>> pairs;
  while (pairs.size() < kPairs) {
    CPoint z = draw(), w = draw();
    // Keep the complex line through z and w away from the puncture.
    const CPoint v = w - z;
    const double t = -inner(z, v).real() / (v.norm() * v.norm());
    const CPoint foot = z + t * v;
    if (std::abs(inner(z, v)) / (z.norm() * v.norm()) > 0.9 || foot.norm() < 0.1) continue;
    pairs.emplace_back(std::move(z), std::move(w));
  }
  UpperOptions o;
  o.poly.seed = cfg.seed;
  std::vector<double> diff(kPairs, 0.0);
  run_tasks(
      kPairs,
      [&](std::size_t i) {
        const auto& [z, w] = pairs[i];
        const double oracle = ball_lempert(z, w);
        const Bound b = lempert_upper(punct, z, w, o);
        diff[i] = std::abs(b.value - oracle);
        std::vector<ReportRow> rows;
        ReportRow r = row_of(cfg, 0.0, 0.0, 0.0, b, "");
        r.family = "pair " + std::to_string(i) + ": " + b.method;
        rows.push_back(r);
        rows.push_back(plain_row(cfg, 0.0, 0.0, 0.0, "ell", "exact", Grade::Certified, oracle,
                                 "pair " + std::to_string(i) + ": ball closed form", ""));
        return rows;
      },
      [&](std::size_t i) { return "pair " + std::to_string(i); }, report);
  const double worst = *std::max_element(diff.begin(), diff.end());
  report.checks.push_back(
      value_check("punctured ball ell upper against the ball value", worst, 0.0, 1e-3, "max over 20 pairs"));
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Exponents: return "exponents";
    case Experiment::Qti: return "qti";
    case Experiment::KrGap: return "kr-gap";
    case Experiment::Sibony: return "sibony";
    case Experiment::MinusModel: return "minus-model";
    case Experiment::PuncturedDemo: return "punctured-demo";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view s) {
  for (auto e : {Experiment::Exponents, Experiment::Qti, Experiment::KrGap, Experiment::Sibony, Experiment::MinusModel,
                 Experiment::PuncturedDemo})
    if (to_string(e) == s) return e;
  throw ArgumentError("unknown experiment '" + std::string(s) + "'");
}

std::vector<double> EpsGrid::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = eps_max;
    return v;
  }
  const double a = std::log(eps_max), b = std::log(eps_min);
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  v.front() = eps_max;
  v.back() = eps_min;
  return v;
}

void EpsGrid::validate() const {
  if (!(eps_min > 0.0 && eps_max < 1.0)) throw ArgumentError("eps range must lie in (0, 1)");
  if (count < 1) throw ArgumentError("eps count must be positive");
  if (count > 1 && !(eps_min < eps_max)) throw ArgumentError("eps-min must be smaller than eps-max");
}

std::string DeltaRule::describe() const {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, ratio).ptr;
  return std::string(buf, end) + "*eps";
}

DeltaRule DeltaRule::parse(std::string_view text) {
  DeltaRule r;
  if (text.starts_with("eps/")) {
    const double k = parse_number(text.substr(4));
    if (!(k > 0.0)) throw ArgumentError("delta rule divisor must be positive");
    r.ratio = 1.0 / k;
  } else if (text.ends_with("*eps")) {
    r.ratio = parse_number(text.substr(0, text.size() - 4));
  } else {
    r.ratio = parse_number(text);
  }
  if (!(r.ratio > 0.0 && r.ratio < 1.0))
    throw ArgumentError("delta rule '" + std::string(text) + "' must give 0 < delta < eps");
  return r;
}

void ExperimentConfig::validate() const {
  grid.validate();
  if (!(delta.ratio > 0.0 && delta.ratio < 1.0)) throw ArgumentError("delta rule must give 0 < delta < eps");
  if (mus.empty() && experiment != Experiment::PuncturedDemo) throw ArgumentError("mu list is empty");
  for (double mu : mus) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ArgumentError("mu must be positive");
    if (experiment == Experiment::Qti && !(mu > 1.0)) throw ArgumentError("qti needs mu > 1");
    if (experiment == Experiment::Sibony && !(mu > 1.0 && mu <= 2.0)) throw ArgumentError("sibony needs mu in (1, 2]");
    if (experiment == Experiment::KrGap && !(mu > 0.5)) throw ArgumentError("kr-gap needs mu > 1/2");
  }
  if ((experiment == Experiment::Qti || experiment == Experiment::Exponents || experiment == Experiment::KrGap ||
       experiment == Experiment::Sibony || experiment == Experiment::MinusModel) &&
      grid.count < 3)
    throw ArgumentError("exponent fits need at least 3 eps values");
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Exponents: c.mus = {0.4, 0.75, 1.0, 1.5, 2.0}; break;
    case Experiment::Qti:
    case Experiment::KrGap:
    case Experiment::Sibony:
    case Experiment::MinusModel: c.mus = {2.0}; break;
    case Experiment::PuncturedDemo: break;
  }
  return c;
}

SeriesFit fit_exponent(std::span<const std::pair<double, double>> series) {
  if (series.size() < 3) throw ArgumentError("fit_exponent needs at least 3 points");
  const double n = static_cast<double>(series.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, v] : series) {
    if (!(e > 0.0)) throw ArgumentError("fit_exponent: eps must be positive");
    if (!(v > 0.0)) throw ArgumentError("fit_exponent: value " + short_fmt(v) + " is not positive");
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [e, v] : series) {
    const double dx = std::log(e) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_exponent: eps values must not all coincide");
  SeriesFit f;
  f.count = series.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.stderr_slope = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

std::vector<double> slope_contributions(std::span<const std::pair<double, double>> series) {
  const double n = static_cast<double>(series.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, v] : series) {
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  for (const auto& [e, v] : series) sxx += (std::log(e) - mx) * (std::log(e) - mx);
  std::vector<double> out;
  for (const auto& [e, v] : series) out.push_back(sxx > 0.0 ? (std::log(e) - mx) * (std::log(v) - my) / sxx : 0.0);
  return out;
}

QtiScan qti_ratio_scan(double mu, std::span<const double> eps_grid, const DeltaRule& delta) {
  if (!(mu > 1.0)) throw ArgumentError("qti_ratio_scan needs mu > 1");
  const DomainSpec dom = DomainSpec::g_plain(mu);
  const UpperOptions ex = explicit_only();
  QtiScan scan;
  scan.mu = mu;
  scan.rows.resize(eps_grid.size());
  std::vector<std::exception_ptr> errors(eps_grid.size());
  parallel_for(eps_grid.size(), [&](std::size_t i) {
    try {
      QtiRow& r = scan.rows[i];
      r.eps = eps_grid[i];
      r.delta = delta(r.eps);
      r.lower = sqrt_trick_lower(dom, r.delta, r.eps);
      r.upper = chain_bound(lempert_chain_upper(dom, normal_point(dom, r.delta), normal_point(dom, r.eps), 2, ex));
      r.ratio = r.lower.value / r.upper.value;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ExperimentError("qti scan failed at eps = " + short_fmt(eps_grid[i]) + ": " + e.what());
    }
  }
  if (scan.rows.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : scan.rows) pts.emplace_back(r.eps, r.ratio);
    scan.fit = fit_exponent(pts);
  }
  return scan;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double expected_ell_slope(double mu) { return mu <= 0.5 ? 1.0 : 1.0 / (2.0 * mu); }
double expected_chain_slope(double mu) { return mu <= 0.5 ? 1.0 : 1.0 / mu; }

std::string csv_header() { return "experiment,mu,eps,delta,quantity,direction,grade,value,family,slope-contrib"; }

std::string to_csv(const ReportRow& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  return r.experiment + "," + fmt(r.mu) + "," + fmt(r.eps) + "," + fmt(r.delta) + "," + quote(r.quantity) + "," +
         r.direction + "," + r.grade + "," + fmt(r.value) + "," + quote(r.family) + "," +
         (r.slope_contrib ? fmt(*r.slope_contrib) : std::string());
}

void write_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  Report report;
  report.config = config;
  const auto start = std::chrono::steady_clock::now();
  auto flush = [&] {
    std::vector<ReportRow> kept;
    for (const auto& r : report.rows)
      if (!config.certified_only || r.grade == to_string(Grade::Certified)) kept.push_back(r);
    report.rows = std::move(kept);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.csv_path.empty()) write_csv(config.csv_path, report.rows);
    if (!config.json_path.empty()) write_report_json(config.json_path, report);
  };
  try {
    switch (config.experiment) {
      case Experiment::Exponents: exponents(config, report); break;
      case Experiment::Qti: qti(config, report); break;
      case Experiment::KrGap: kr_gap(config, report); break;
      case Experiment::Sibony: sibony(config, report); break;
      case Experiment::MinusModel: minus_model(config, report); break;
      case Experiment::PuncturedDemo: punctured_demo(config, report); break;
    }
  } catch (...) {
    try {
      flush();
    } catch (...) {
    }
    throw;
  }
  flush();
  return report;
}

}  // namespace kobalab
