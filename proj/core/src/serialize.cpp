#include "kobalab/serialize.hpp"

#include <fstream>
#include <variant>

namespace kobalab {

namespace {

Json complex_list(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (auto c : v) a.push_back(to_json(c));
  return a;
}

Json fit_entry(const NamedFit& f) {
  Json j = to_json(f.fit);
  j["series"] = f.series;
  j["mu"] = f.mu;
  j["expected_slope"] = f.expected_slope ? Json(*f.expected_slope) : Json(nullptr);
  return j;
}

}  // namespace

Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const CPoint& p) {
  Json a = Json::array();
  for (auto c : p) a.push_back(to_json(c));
  return a;
}

Json to_json(const DomainSpec& d) {
  Json j{{"kind", to_string(d.kind())}, {"dim", d.dim()}, {"description", d.describe()}};
  switch (d.kind()) {
    case DomainKind::GPlain:
    case DomainKind::GTilde:
    case DomainKind::GMinus: j["mu"] = d.mu(); break;
    case DomainKind::GPsi: j["psi"] = d.psi().name(); break;
    case DomainKind::Punctured: {
      j["base"] = to_json(d.base());
      Json ex = Json::array();
      for (const auto& p : d.excluded()) ex.push_back(to_json(p));
      j["excluded"] = ex;
      break;
    }
    case DomainKind::QuadImage: {
      const auto& q = d.quad();
      j["radius"] = q.radius;
      j["alpha1"] = to_json(q.alpha1);
      j["alpha2"] = to_json(q.alpha2);
      j["form"] = {{"a11", q.form.a11},        {"b11", to_json(q.form.b11)}, {"c12", to_json(q.form.c12)},
                   {"d12", to_json(q.form.d12)}, {"alpha2", to_json(q.form.alpha2)}, {"levi22", q.form.levi22}};
      break;
    }
    default: break;
  }
  return j;
}

Json to_json(const AnalyticDisc& d) {
  Json j{{"dim", d.dim()}, {"description", d.describe()}};
  std::visit(
      [&](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, ExplicitRep>) {
          j["representation"] = "family";
          j["family"] = to_string(rep.family);
          const auto& p = rep.params;
          j["params"] = {{"eps", p.eps}, {"delta", p.delta}, {"mu", p.mu}, {"c", to_json(p.c)},
                         {"a0", p.a0},   {"C", p.C},         {"dim", p.dim}};
        } else if constexpr (std::is_same_v<T, PolynomialRep>) {
          j["representation"] = "polynomial";
          Json rows = Json::array();
          for (const auto& r : rep.coeffs) rows.push_back(complex_list(r));
          j["coefficients"] = rows;
          if (!rep.chart.empty()) j["chart"] = complex_list(rep.chart);
        } else {
          j["representation"] = "mobius";
          Json coords = Json::array();
          for (const auto& c : rep.coords)
            coords.push_back(
                {{"center", to_json(c.center)}, {"rotation", to_json(c.rotation)}, {"zeros", complex_list(c.zeros)}});
          j["coordinates"] = coords;
        }
      },
      d.rep());
  const Mobius& m = d.reparam();
  if (!m.is_identity()) j["reparam"] = {to_json(m.p), to_json(m.q), to_json(m.r), to_json(m.s)};
  return j;
}

Json to_json(const ContainmentCertificate& c) {
  Json j{{"kind", c.kind == ContainmentCertificate::Kind::Analytic ? "analytic" : "grid"},
         {"grade", to_string(c.grade())},
         {"domain", c.domain},
         {"disc", c.disc}};
  if (c.kind == ContainmentCertificate::Kind::Analytic) {
    j["inequality"] = c.inequality;
  } else {
    j["grid"] = {{"samples", c.grid.samples}, {"worst_margin", c.grid.worst_margin},
                 {"worst_zeta", to_json(c.grid.worst_zeta)}, {"rings", c.grid.rings},
                 {"angles", c.grid.angles}, {"tau", c.grid.tau}};
  }
  return j;
}

Json to_json(const Bound& b) {
  Json j{{"quantity", to_string(b.quantity)}, {"value", b.value},   {"direction", to_string(b.direction)},
         {"grade", to_string(b.grade)},       {"m", b.m},           {"method", b.method},
         {"derivation", b.derivation}};
  if (b.disc) {
    Json w{{"disc", to_json(b.disc->disc)}, {"node_z", to_json(b.disc->node_z)}, {"node_w", to_json(b.disc->node_w)}};
    if (b.disc->certificate) w["certificate"] = to_json(*b.disc->certificate);
    j["witness"] = w;
  }
  if (b.chain) j["chain"] = to_json(*b.chain);
  if (b.path) {
    Json nodes = Json::array();
    for (const auto& p : b.path->nodes) nodes.push_back(to_json(p));
    j["path"] = {{"nodes", nodes}, {"kappa_samples", b.path->kappa_samples}, {"integral", b.path->integral}};
  }
  if (!b.decomposition.empty()) {
    Json dec = Json::array();
    for (const auto& x : b.decomposition) dec.push_back(to_json(x));
    j["decomposition"] = dec;
  }
  if (!b.pieces.empty()) {
    Json pieces = Json::array();
    for (const auto& p : b.pieces) pieces.push_back(to_json(p));
    j["pieces"] = pieces;
  }
  return j;
}

Json to_json(const Chain& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  Json legs = Json::array();
  for (const auto& l : c.legs) legs.push_back(to_json(l));
  return {{"m", c.m()},
          {"points", pts},
          {"legs", legs},
          {"aggregate_ell", c.aggregate_ell()},
          {"aggregate_l", c.aggregate_l()},
          {"grade", to_string(c.grade())}};
}

Json to_json(const CandidateFunction& c) {
  return {{"mu", c.mu}, {"eps", c.eps}, {"alpha", c.alpha}, {"c1", c.c1},  {"c2", c.c2},
          {"c3", c.c3}, {"L", c.L},     {"L_prime", c.L_prime}, {"dim", c.dim}};
}

Json to_json(const AdmissibilityReport& r) {
  return {{"ok", r.ok},
          {"samples", r.samples},
          {"max_u", r.max_u},
          {"min_dominance", r.min_dominance},
          {"min_eigen_relative", r.min_eigen_relative},
          {"seam_points", r.seam_points},
          {"failure", r.failure},
          {"witness", to_json(r.witness)}};
}

Json to_json(const SeriesFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"stderr", f.stderr_slope}, {"r2", f.r2}, {"count", f.count}};
}

Json to_json(const Report& r) {
  const auto& c = r.config;
  Json cfg{{"experiment", to_string(c.experiment)},
           {"mu", c.mus},
           {"eps_min", c.grid.eps_min},
           {"eps_max", c.grid.eps_max},
           {"eps_count", c.grid.count},
           {"delta_rule", c.delta.describe()},
           {"seed", c.seed},
           {"certified_only", c.certified_only}};
  Json fits = Json::array();
  for (const auto& f : r.fits) fits.push_back(fit_entry(f));
  Json checks = Json::array();
  for (const auto& k : r.checks)
    checks.push_back({{"name", k.name},
                      {"pass", k.pass},
                      {"observed", k.observed},
                      {"expected", k.expected},
                      {"tolerance", k.tolerance},
                      {"detail", k.detail}});
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"mu", row.mu},
                    {"eps", row.eps},
                    {"delta", row.delta},
                    {"quantity", row.quantity},
                    {"direction", row.direction},
                    {"grade", row.grade},
                    {"value", row.value},
                    {"family", row.family},
                    {"slope_contrib", row.slope_contrib ? Json(*row.slope_contrib) : Json(nullptr)}});
  return {{"config", cfg},        {"rows", rows},          {"fits", fits},
          {"checks", checks},     {"passed", r.passed()},  {"seconds", r.seconds}};
}

void write_report_json(const std::string& path, const Report& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_json(report).dump(2) << '\n';
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace kobalab
