#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <numeric>
#include <sstream>

#include "kobalab/lab.hpp"
#include "kobalab/lower.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

using Series = std::vector<std::pair<double, double>>;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kobalab_test_" + name);
}

}  // namespace

TEST_CASE("fit_exponent recovers a square root exactly") {
  const Series s = {{1e-2, 1e-1}, {1e-4, 1e-2}, {1e-6, 1e-3}};
  const SeriesFit f = fit_exponent(s);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.count == 3);
  CHECK(f.stderr_slope <= 1e-12);
}

TEST_CASE("fit_exponent of a constant series") {
  const Series s = {{1e-2, 3.0}, {1e-3, 3.0}, {1e-4, 3.0}, {1e-5, 3.0}};
  const SeriesFit f = fit_exponent(s);
  CHECK(f.slope == doctest::Approx(0.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
}

TEST_CASE("fit_exponent rejects bad input") {
  CHECK_THROWS_AS(fit_exponent(Series{{1e-2, 1.0}, {1e-3, 0.0}, {1e-4, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(fit_exponent(Series{{1e-2, 1.0}, {1e-3, -2.0}, {1e-4, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(fit_exponent(Series{{1e-2, 1.0}, {1e-3, 1.0}}), ArgumentError);
}

TEST_CASE("slope contributions sum to the slope") {
  const Series s = {{1e-2, 0.2}, {1e-3, 0.05}, {1e-4, 0.02}, {1e-5, 0.004}};
  const auto parts = slope_contributions(s);
  REQUIRE(parts.size() == s.size());
  CHECK(std::accumulate(parts.begin(), parts.end(), 0.0) == doctest::Approx(fit_exponent(s).slope).epsilon(1e-12));
}

TEST_CASE("the ell upper series on G(2) has slope 1/4") {
  const auto G = DomainSpec::g_plain(2.0);
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  EpsGrid grid;
  Series upper, lower;
  for (double eps : grid.values()) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    upper.emplace_back(eps, lempert_upper(G, z, w, o).value);
    lower.emplace_back(eps, sqrt_trick_lower(G, 0.5 * eps, eps).value);
  }
  CHECK(std::abs(fit_exponent(upper).slope - 0.25) <= kSlopeTolerance);
  CHECK(std::abs(fit_exponent(lower).slope - 0.25) <= kSlopeTolerance);
  CHECK(fit_exponent(upper).r2 >= kMinR2);
}

TEST_CASE("eps grid is strictly decreasing and validated") {
  EpsGrid g;
  const auto v = g.values();
  REQUIRE(v.size() == 9);
  CHECK(v.front() == doctest::Approx(1e-2));
  CHECK(v.back() == doctest::Approx(1e-6));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
  g.eps_min = 1e-1;
  CHECK_THROWS_AS(g.validate(), ArgumentError);
  g = EpsGrid{};
  g.count = 0;
  CHECK_THROWS_AS(g.validate(), ArgumentError);
}

TEST_CASE("delta rule parsing") {
  CHECK(DeltaRule::parse("eps/2").ratio == doctest::Approx(0.5));
  CHECK(DeltaRule::parse("eps/4")(1e-2) == doctest::Approx(2.5e-3));
  CHECK(DeltaRule::parse("0.3*eps").ratio == doctest::Approx(0.3));
  CHECK(DeltaRule::parse("0.9").ratio == doctest::Approx(0.9));
  CHECK_THROWS_AS(DeltaRule::parse("eps/0.5"), ArgumentError);
  CHECK_THROWS_AS(DeltaRule::parse("2*eps"), ArgumentError);
  CHECK_THROWS_AS(DeltaRule::parse("half"), ArgumentError);
  CHECK(DeltaRule::parse(DeltaRule::parse("eps/4").describe()).ratio == doctest::Approx(0.25));
}

TEST_CASE("config validation") {
  auto c = ExperimentConfig::defaults(Experiment::Qti);
  CHECK_NOTHROW(c.validate());
  c.mus = {0.5};
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = ExperimentConfig::defaults(Experiment::Sibony);
  c.mus = {2.5};
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = ExperimentConfig::defaults(Experiment::Exponents);
  c.grid.count = 2;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  for (auto e : {Experiment::Exponents, Experiment::Qti, Experiment::KrGap, Experiment::Sibony,
                 Experiment::MinusModel, Experiment::PuncturedDemo})
    CHECK(experiment_from_string(to_string(e)) == e);
}

TEST_CASE("expected slopes") {
  CHECK(expected_ell_slope(2.0) == doctest::Approx(0.25));
  CHECK(expected_ell_slope(0.4) == doctest::Approx(1.0));
  CHECK(expected_chain_slope(2.0) == doctest::Approx(0.5));
  CHECK(expected_chain_slope(0.5) == doctest::Approx(1.0));
}

TEST_CASE("qti ratio scan needs mu > 1 and decays at mu = 2") {
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  CHECK_THROWS_AS(qti_ratio_scan(0.5, eps, DeltaRule{}), ArgumentError);
  CHECK_THROWS_AS(qti_ratio_scan(1.0, eps, DeltaRule{}), ArgumentError);
  const QtiScan s = qti_ratio_scan(2.0, eps, DeltaRule{});
  REQUIRE(s.rows.size() == 3);
  for (const auto& r : s.rows) {
    CHECK(r.ratio == doctest::Approx(r.lower.value / r.upper.value));
    CHECK(r.lower.grade == Grade::Certified);
  }
  CHECK(s.rows.back().ratio > s.rows.front().ratio);
  CHECK(std::abs(s.fit.slope + 0.25) <= kSlopeTolerance);
}

TEST_CASE("at mu = 1/2 the lower and upper bounds stay comparable") {
  // Both sides behave like eps, so their ratio stays bounded away from 0 and infinity.
  const auto G = DomainSpec::g_plain(0.5);
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    const double ratio = projection_lower(G, z, w).value / lempert_upper(G, z, w, o).value;
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("CSV output is deterministic") {
  auto c = ExperimentConfig::defaults(Experiment::Sibony);
  c.grid.eps_min = 1e-4;
  c.grid.count = 3;
  const auto a = temp_file("a.csv"), b = temp_file("b.csv");
  c.csv_path = a.string();
  const Report r1 = run_experiment(c);
  c.csv_path = b.string();
  const Report r2 = run_experiment(c);
  const std::string sa = slurp(a), sb = slurp(b);
  CHECK_FALSE(sa.empty());
  CHECK(sa == sb);
  CHECK(sa.rfind(csv_header(), 0) == 0);
  CHECK(r1.rows.size() == r2.rows.size());
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("CSV row format") {
  ReportRow r;
  r.experiment = "exponents";
  r.mu = 2.0;
  r.eps = 0.01;
  r.delta = 0.005;
  r.quantity = "ell";
  r.direction = "upper";
  r.grade = "certified";
  r.value = 0.25;
  r.family = "F3";
  CHECK(csv_header() == "experiment,mu,eps,delta,quantity,direction,grade,value,family,slope-contrib");
  const std::string line = to_csv(r);
  CHECK(line.rfind("exponents,2,0.01", 0) == 0);
  CHECK(std::count(line.begin(), line.end(), ',') == 9);
}

TEST_CASE("certified-only drops numeric rows") {
  auto c = ExperimentConfig::defaults(Experiment::MinusModel);
  c.grid.eps_min = 1e-4;
  c.grid.count = 3;
  c.certified_only = true;
  const Report r = run_experiment(c);
  REQUIRE_FALSE(r.rows.empty());
  for (const auto& row : r.rows) CHECK(row.grade == "certified");
}

TEST_CASE("write_csv reports the path on failure") {
  CHECK_THROWS_WITH_AS(write_csv("/nonexistent-dir/x.csv", {}), doctest::Contains("/nonexistent-dir/x.csv"), Error);
}
