#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kobalab/lab.hpp"
#include "kobalab/lower.hpp"
#include "kobalab/serialize.hpp"
#include "kobalab/sibony.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

constexpr int kOk = 0;
constexpr int kComputationFailure = 1;
constexpr int kConfigError = 2;

// Raised while turning flags into domains, points and configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::vector<double> mu;
  double eps_min = 1e-6;
  double eps_max = 1e-2;
  int eps_count = 9;
  std::string delta_rule = "eps/2";
  unsigned seed = 1;
  std::string out;
  std::string format = "csv";
  bool certified_only = false;
};

struct PointArgs {
  std::string domain = "gplain";
  std::size_t dim = 2;
  std::string psi = "power:2";
  double eps = 0.01;
  double delta = 0.0;  // 0: from the delta rule
  std::string z, w, X;
  std::string quantity;
  std::string direction = "both";
  std::string strategy = "best-of";
  int m = 2;
};

void add_common(CLI::App* app, Common& c, bool sweep) {
  app->add_option("--mu", c.mu, sweep ? "comma-separated mu values" : "mu of the model domain")->delimiter(',');
  app->add_option("--delta-rule", c.delta_rule, "eps/K, R*eps or R (delta = R eps)")->capture_default_str();
  app->add_option("--seed", c.seed, "optimizer and sampling seed")->capture_default_str();
  app->add_option("--out", c.out, "output file (default: stdout)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_flag("--certified-only", c.certified_only, "drop bounds that are not certified");
  if (sweep) {
    app->add_option("--eps-min", c.eps_min)->capture_default_str();
    app->add_option("--eps-max", c.eps_max)->capture_default_str();
    app->add_option("--eps-count", c.eps_count)->capture_default_str();
  }
}

void add_point(CLI::App* app, PointArgs& p) {
  app->add_option("--domain", p.domain, "gplain, gtilde, gminus, gpsi, polydisc or ball")->capture_default_str();
  app->add_option("--dim", p.dim)->capture_default_str();
  app->add_option("--psi", p.psi, "modulus for gpsi: power:P or log")->capture_default_str();
  app->add_option("--eps", p.eps, "p_eps on the inner normal")->capture_default_str();
  app->add_option("--delta", p.delta, "p_delta on the inner normal (default: delta rule)");
  app->add_option("--strategy", p.strategy, "explicit-family, poly-opt or best-of")->capture_default_str();
  app->add_option("--direction", p.direction, "upper, lower or both")
      ->check(CLI::IsMember({"upper", "lower", "both"}))
      ->capture_default_str();
}

double single_mu(const Common& c) {
  if (c.mu.empty()) return 2.0;
  if (c.mu.size() != 1) throw ConfigError("--mu takes one value here");
  return c.mu.front();
}

// "a:b" is a + bi; plain numbers are real.
CPoint parse_point(const std::string& text, std::size_t dim) {
  std::vector<Complex> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos)
        v.emplace_back(std::stod(item), 0.0);
      else
        v.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse coordinate '" + item + "' in '" + text + "'");
    }
  }
  if (v.size() != dim)
    throw ConfigError("point '" + text + "' has " + std::to_string(v.size()) + " coordinates, expected " +
                      std::to_string(dim));
  return CPoint(std::move(v));
}

ModulusOfContinuity parse_psi(const std::string& s) {
  if (s == "log") return ModulusOfContinuity::log_type();
  if (s.rfind("power:", 0) == 0) return ModulusOfContinuity::power(std::stod(s.substr(6)));
  throw ConfigError("unknown modulus '" + s + "'");
}

DomainSpec make_domain(const PointArgs& p, double mu) {
  if (p.domain == "gplain") return DomainSpec::g_plain(mu, p.dim);
  if (p.domain == "gtilde") return DomainSpec::g_tilde(mu, p.dim);
  if (p.domain == "gminus") return DomainSpec::g_minus(mu);
  if (p.domain == "gpsi") return DomainSpec::g_psi(parse_psi(p.psi), p.dim);
  if (p.domain == "polydisc") return DomainSpec::polydisc(p.dim);
  if (p.domain == "ball") return DomainSpec::ball(p.dim);
  throw ConfigError("unknown domain '" + p.domain + "'");
}

struct Setup {
  DomainSpec domain;
  double mu;
  double eps, delta;
  CPoint z, w, X;
  UpperOptions upper;
};

Setup make_setup_unchecked(const Common& c, const PointArgs& p) {
  const double mu = single_mu(c);
  const DeltaRule rule = DeltaRule::parse(c.delta_rule);
  const DomainSpec dom = make_domain(p, mu);
  const double delta = p.delta > 0.0 ? p.delta : rule(p.eps);
  UpperOptions o;
  o.strategy = strategy_from_string(p.strategy);
  o.poly.seed = c.seed;
  Setup s{dom, mu, p.eps, delta, CPoint(dom.dim()), CPoint(dom.dim()), CPoint::axis(dom.dim(), 1.0), o};
  s.z = p.z.empty() ? normal_point(dom, delta) : parse_point(p.z, dom.dim());
  s.w = p.w.empty() ? normal_point(dom, p.eps) : parse_point(p.w, dom.dim());
  if (!p.X.empty()) s.X = parse_point(p.X, dom.dim());
  if (!contains(dom, s.z).inside) throw ConfigError("z is not in " + dom.describe());
  if (!contains(dom, s.w).inside) throw ConfigError("w is not in " + dom.describe());
  return s;
}

Setup make_setup(const Common& c, const PointArgs& p) {
  try {
    return make_setup_unchecked(c, p);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(e.what());
  }
}

bool is_normal_pair(const Setup& s) { return normal_parameter(s.z) > 0.0 && normal_parameter(s.w) > 0.0; }

bool wants(const PointArgs& p, Direction d) { return p.direction == "both" || p.direction == to_string(d); }

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error("cannot open '" + c.out + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + c.out + "' failed");
}

void emit_bounds(const Common& c, const std::string& command, const Setup& s, std::vector<Bound> bounds,
                 bool infinitesimal) {
  if (c.certified_only)
    std::erase_if(bounds, [](const Bound& b) { return b.grade != Grade::Certified; });
  if (c.format == "json") {
    Json arr = Json::array();
    for (const auto& b : bounds) arr.push_back(to_json(b));
    Json j{{"command", command}, {"domain", to_json(s.domain)}, {"z", to_json(s.z)}, {"bounds", arr}};
    if (infinitesimal)
      j["X"] = to_json(s.X);
    else
      j["w"] = to_json(s.w);
    emit(c, j.dump(2) + "\n");
    return;
  }
  std::string text = csv_header() + "\n";
  for (const auto& b : bounds) {
    ReportRow r;
    r.experiment = command;
    r.mu = s.domain.is_g_variant() ? s.mu : 0.0;
    r.eps = s.eps;
    r.delta = infinitesimal ? 0.0 : s.delta;
    r.quantity = std::string(to_string(b.quantity));
    r.direction = std::string(to_string(b.direction));
    r.grade = std::string(to_string(b.grade));
    r.value = b.value;
    r.family = b.method;
    text += to_csv(r) + "\n";
  }
  emit(c, text);
}

std::vector<Bound> distance_lowers(const Setup& s, Quantity q) {
  std::vector<Bound> out;
  Bound p = projection_lower(s.domain, s.z, s.w);
  p.quantity = q;
  if (q == Quantity::KDist) p.value = std::atanh(p.value);
  out.push_back(p);
  if (q == Quantity::Lempert && is_normal_pair(s)) {
    try {
      out.push_back(sqrt_trick_lower(s.domain, s.delta, s.eps));
    } catch (const CapabilityError&) {
    } catch (const RangeError&) {
    }
  }
  return out;
}

int run_bound(const Common& c, const PointArgs& p) {
  const Setup s = make_setup(c, p);
  const std::string q = p.quantity.empty() ? "ell" : p.quantity;
  if (q != "ell" && q != "k") throw ConfigError("bound computes ell or k; got '" + q + "'");
  const Quantity quantity = q == "ell" ? Quantity::Lempert : Quantity::KDist;
  std::vector<Bound> out;
  if (wants(p, Direction::Upper))
    out.push_back(quantity == Quantity::Lempert ? lempert_upper(s.domain, s.z, s.w, s.upper)
                                                : kobayashi_distance_upper(s.domain, s.z, s.w, {}, s.upper));
  if (wants(p, Direction::Lower))
    for (auto& b : distance_lowers(s, quantity)) out.push_back(std::move(b));
  emit_bounds(c, "bound", s, std::move(out), false);
  return kOk;
}

int run_chain(const Common& c, const PointArgs& p) {
  const Setup s = make_setup(c, p);
  if (p.m < 1) throw ConfigError("--m must be >= 1");
  const Chain chain = lempert_chain_upper(s.domain, s.z, s.w, p.m, s.upper);
  if (c.format == "json") {
    Json j{{"command", "chain"}, {"domain", to_json(s.domain)}, {"chain", to_json(chain)}};
    if (wants(p, Direction::Lower)) j["lower"] = to_json(projection_lower(s.domain, s.z, s.w));
    emit(c, j.dump(2) + "\n");
    return kOk;
  }
  std::vector<Bound> out;
  if (wants(p, Direction::Upper)) out.push_back(chain_bound(chain));
  if (wants(p, Direction::Lower)) {
    Bound lo = projection_lower(s.domain, s.z, s.w);
    lo.quantity = Quantity::LempertM;
    lo.m = p.m;
    out.push_back(lo);
  }
  emit_bounds(c, "chain", s, std::move(out), false);
  return kOk;
}

int run_metric(const Common& c, const PointArgs& p) {
  Setup s = make_setup(c, p);
  // The base point defaults to p_eps.
  if (p.z.empty()) s.z = s.w;
  const std::string q = p.quantity.empty() ? "kappa" : p.quantity;
  std::vector<Bound> out;
  const bool normal_e1 = normal_parameter(s.z) > 0.0 && s.X.tail_norm() == 0.0 && s.X[0] != Complex{};
  if (q == "sibony") {
    if (s.domain.kind() != DomainKind::GPlain) throw ConfigError("sibony needs --domain gplain");
    if (normal_parameter(s.z) <= 0.0) throw ConfigError("sibony is evaluated at p_eps");
    SamplingOptions so;
    so.seed = c.seed;
    if (wants(p, Direction::Lower)) out.push_back(sibony_lower(s.mu, normal_parameter(s.z), s.X, so));
    if (wants(p, Direction::Upper)) {
      // S <= kappa.
      Bound b = kobayashi_royden_upper(s.domain, s.z, s.X, s.upper);
      b.quantity = Quantity::Sibony;
      b.derivation.push_back("Sibony metric <= Kobayashi-Royden metric");
      out.push_back(b);
    }
  } else if (q == "kappa" || q == "kappa_m" || q == "kappa_hat") {
    if (wants(p, Direction::Upper)) {
      if (q == "kappa") out.push_back(kobayashi_royden_upper(s.domain, s.z, s.X, s.upper));
      if (q == "kappa_m") out.push_back(kr_decomposed_upper(s.domain, s.z, s.X, p.m, s.upper));
      if (q == "kappa_hat") out.push_back(kobayashi_busemann_upper(s.domain, s.z, s.X, 0, s.upper));
    }
    if (wants(p, Direction::Lower)) {
      Bound lo = projection_kr_lower(s.domain, s.z, s.X);
      lo.quantity = quantity_from_string(q);
      out.push_back(lo);
      if (q == "kappa" && normal_e1) {
        try {
          Bound b = sqrt_trick_kr_lower(s.domain, normal_parameter(s.z));
          b.value *= std::abs(s.X[0]);
          out.push_back(b);
        } catch (const CapabilityError&) {
        } catch (const RangeError&) {
        }
      }
    }
  } else {
    throw ConfigError("metric computes kappa, kappa_m, kappa_hat or sibony; got '" + q + "'");
  }
  Setup shown = s;
  shown.eps = normal_parameter(s.z) > 0.0 ? normal_parameter(s.z) : 0.0;
  emit_bounds(c, "metric", shown, std::move(out), true);
  return kOk;
}

ExperimentConfig make_config(const Common& c, Experiment e) {
  ExperimentConfig cfg = ExperimentConfig::defaults(e);
  if (!c.mu.empty()) cfg.mus = c.mu;
  cfg.grid = {c.eps_min, c.eps_max, c.eps_count};
  cfg.delta = DeltaRule::parse(c.delta_rule);
  cfg.seed = c.seed;
  cfg.certified_only = c.certified_only;
  if (!c.out.empty()) (c.format == "json" ? cfg.json_path : cfg.csv_path) = c.out;
  cfg.validate();
  return cfg;
}

int run_sweep(const Common& c, Experiment e, const std::string& summary) {
  ExperimentConfig cfg;
  try {
    cfg = make_config(c, e);
    if (!summary.empty()) cfg.json_path = summary;
  } catch (const ArgumentError& err) {
    throw ConfigError(err.what());
  }
  const Report r = run_experiment(cfg);
  if (c.out.empty()) {
    if (c.format == "json") {
      std::cout << to_json(r).dump(2) << "\n";
    } else {
      std::cout << csv_header() << "\n";
      for (const auto& row : r.rows) std::cout << to_csv(row) << "\n";
    }
  }
  for (const auto& f : r.fits)
    std::fprintf(stderr, "fit %-14s mu=%-5g slope=%+.4f stderr=%.4f R2=%.5f n=%zu\n", f.series.c_str(), f.mu,
                 f.fit.slope, f.fit.stderr_slope, f.fit.r2, f.fit.count);
  for (const auto& k : r.checks)
    std::fprintf(stderr, "%s  %s: observed %.6g, expected %.6g (%s)\n", k.pass ? "PASS" : "FAIL", k.name.c_str(),
                 k.observed, k.expected, k.detail.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kobalab: bounds for Kobayashi-type invariants on model domains"};
  app.require_subcommand(1);

  Common common;
  PointArgs point;
  std::string experiment = "exponents";
  std::string summary;

  auto* bound = app.add_subcommand("bound", "ell or k between two points");
  add_common(bound, common, false);
  add_point(bound, point);
  bound->add_option("--z", point.z, "first point, coordinates re or re:im, comma-separated (default p_delta)");
  bound->add_option("--w", point.w, "second point (default p_eps)");
  bound->add_option("--quantity", point.quantity, "ell or k");

  auto* chain = app.add_subcommand("chain", "ell^(m) chain between two points");
  add_common(chain, common, false);
  add_point(chain, point);
  chain->add_option("--z", point.z, "first point (default p_delta)");
  chain->add_option("--w", point.w, "second point (default p_eps)");
  chain->add_option("--m", point.m, "number of legs")->capture_default_str();

  auto* metric = app.add_subcommand("metric", "kappa, kappa^(m), kappa hat or Sibony at a point");
  add_common(metric, common, false);
  add_point(metric, point);
  metric->add_option("--z", point.z, "base point (default p_eps)");
  metric->add_option("--X", point.X, "tangent vector (default (1, 0, ...))");
  metric->add_option("--quantity", point.quantity, "kappa, kappa_m, kappa_hat or sibony");
  metric->add_option("--m", point.m, "pieces for kappa_m")->capture_default_str();

  auto* asymptotics = app.add_subcommand("asymptotics", "exponent sweeps over an eps grid");
  add_common(asymptotics, common, true);
  asymptotics->add_option("--experiment", experiment, "exponents, kr-gap or minus-model")
      ->check(CLI::IsMember({"exponents", "kr-gap", "minus-model"}))
      ->capture_default_str();

  auto* qti = app.add_subcommand("qti", "ratio of the certified ell lower bound to the ell^(2) upper bound");
  add_common(qti, common, true);

  auto* sibony = app.add_subcommand("sibony", "Sibony lower bound sweep");
  add_common(sibony, common, true);

  auto* demo = app.add_subcommand("demo", "punctured ball against the ball");
  add_common(demo, common, false);

  for (auto* sub : {asymptotics, qti, sibony, demo})
    sub->add_option("--summary", summary, "also write the JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*bound) return run_bound(common, point);
    if (*chain) return run_chain(common, point);
    if (*metric) return run_metric(common, point);
    if (*asymptotics) {
      const Experiment e = experiment == "kr-gap"        ? Experiment::KrGap
                           : experiment == "minus-model" ? Experiment::MinusModel
                                                         : Experiment::Exponents;
      return run_sweep(common, e, summary);
    }
    if (*qti) return run_sweep(common, Experiment::Qti, summary);
    if (*sibony) return run_sweep(common, Experiment::Sibony, summary);
    if (*demo) return run_sweep(common, Experiment::PuncturedDemo, summary);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "computation failed: %s\n", e.what());
    return kComputationFailure;
  }
  return kOk;
}
