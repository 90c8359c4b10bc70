#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kobalab/lower.hpp"
#include "kobalab/optimize.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

UpperOptions explicit_only() {
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  return o;
}

UpperOptions quick_poly() {
  UpperOptions o;
  o.strategy = Strategy::PolyOpt;
  o.poly.restarts = 4;
  return o;
}

double ball_ell(const CPoint& z, const CPoint& w) {
  const double num = (1.0 - std::norm(z.norm())) * (1.0 - std::norm(w.norm()));
  return std::sqrt(1.0 - num / std::norm(1.0 - inner(w, z)));
}

}  // namespace

TEST_CASE("closed forms on the polydisc and the ball") {
  Rng rng(41);
  std::uniform_real_distribution<double> U(-0.4, 0.4);
  for (int i = 0; i < 50; ++i) {
    const CPoint z{Complex{U(rng), U(rng)}, Complex{U(rng), U(rng)}};
    const CPoint w{Complex{U(rng), U(rng)}, Complex{U(rng), U(rng)}};
    const Bound p = lempert_upper(DomainSpec::polydisc(2), z, w, explicit_only());
    CHECK(p.value == doctest::Approx(projection_lower(DomainSpec::polydisc(2), z, w).value).epsilon(1e-12));
    const Bound b = lempert_upper(DomainSpec::ball(2), z, w, explicit_only());
    CHECK(b.value == doctest::Approx(ball_ell(z, w)).epsilon(1e-10));
    // Ball inside polydisc.
    CHECK(p.value <= b.value + 1e-12);
  }
}

TEST_CASE("explicit upper bounds on G(2) use the Case 2 families") {
  const auto G = DomainSpec::g_plain(2.0);
  for (double frac : {0.9, 0.25}) {
    const double eps = 1e-4;
    const Bound b = lempert_upper(G, normal_point(G, frac * eps), normal_point(G, eps), explicit_only());
    CHECK(b.grade != Grade::NumericWeak);
    CHECK(b.value < 1.0);
    REQUIRE(b.disc);
    CHECK(b.disc->certificate);
  }
}

TEST_CASE("Lempert bound is symmetric in its arguments") {
  const auto G = DomainSpec::g_plain(2.0);
  for (double eps : {1e-2, 1e-3}) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    CHECK(std::abs(lempert_upper(G, z, w, explicit_only()).value - lempert_upper(G, w, z, explicit_only()).value) <=
          1e-10);
  }
}

TEST_CASE("chain reversal keeps the aggregate") {
  const auto G = DomainSpec::g_plain(2.0);
  for (double eps : {1e-2, 1e-4}) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    const Chain c = lempert_chain_upper(G, z, w, 2, explicit_only());
    const Chain r = c.reversed();
    CHECK(std::abs(c.aggregate_ell() - r.aggregate_ell()) <= 1e-10);
    CHECK(std::abs(c.aggregate_l() - r.aggregate_l()) <= 1e-10);
    CHECK(distance(r.points.front(), w) == 0.0);
    CHECK(distance(r.points.back(), z) == 0.0);
  }
}

TEST_CASE("chain bounds decrease with m") {
  const auto G = DomainSpec::g_plain(2.0);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    const double one = lempert_chain_upper(G, z, w, 1, explicit_only()).aggregate_ell();
    const double two = lempert_chain_upper(G, z, w, 2, explicit_only()).aggregate_ell();
    const double three = lempert_chain_upper(G, z, w, 3, explicit_only()).aggregate_ell();
    CHECK(two <= one + 1e-12);
    CHECK(three <= two + 1e-12);
  }
}

TEST_CASE("log aggregate lies between the aggregate and atanh of the aggregate") {
  // atanh is superadditive on [0, 1), so sum atanh(l_j) <= atanh(sum l_j); atanh(x) >= x gives the other side.
  const auto G = DomainSpec::g_plain(2.0);
  for (int m : {1, 2, 3}) {
    const CPoint z = normal_point(G, 0.3e-2), w = normal_point(G, 1e-2);
    const Chain c = lempert_chain_upper(G, z, w, m, explicit_only());
    const double ell = c.aggregate_ell();
    CHECK(c.aggregate_l() <= std::atanh(ell) + 1e-12);
    CHECK(c.aggregate_l() >= ell);
    if (m == 1) CHECK(c.aggregate_l() == doctest::Approx(std::atanh(ell)).epsilon(1e-12));
    const Bound b = chain_bound(c);
    CHECK(b.quantity == Quantity::LempertM);
    CHECK(b.value == doctest::Approx(ell));
    CHECK(b.m == m);
  }
}

TEST_CASE("a larger domain never has a larger bound") {
  // GPlain(2) is inside GTilde(2) and inside GPlain(1).
  for (double eps : {1e-2, 1e-3}) {
    const auto small = DomainSpec::g_plain(2.0);
    const CPoint z = normal_point(small, 0.8 * eps), w = normal_point(small, eps);
    const double s = lempert_upper(small, z, w, explicit_only()).value;
    CHECK(lempert_upper(DomainSpec::g_tilde(2.0), z, w, explicit_only()).value <= s + 1e-12);
    CHECK(lempert_upper(DomainSpec::g_plain(1.0), z, w, explicit_only()).value <= s + 1e-12);
    CHECK(lempert_upper(DomainSpec::polydisc(2), z, w, explicit_only()).value <= s + 1e-12);
  }
}

TEST_CASE("Kobayashi-Royden bounds") {
  const auto G = DomainSpec::g_plain(2.0);
  const CPoint p = normal_point(G, 1e-3);
  const CPoint e1{1.0, 0.0};
  const Bound k = kobayashi_royden_upper(G, p, e1, explicit_only());
  CHECK(k.value >= projection_kr_lower(G, p, e1).value);
  // 1-homogeneous in X.
  const Bound k2 = kobayashi_royden_upper(G, p, Complex{0.0, 3.0} * e1, explicit_only());
  CHECK(k2.value == doctest::Approx(3.0 * k.value).epsilon(1e-10));
  CHECK(kobayashi_royden_upper(G, p, CPoint(2), explicit_only()).value == 0.0);
  // kappa^(2) <= kappa, kappa hat <= kappa^(2).
  const Bound k2m = kr_decomposed_upper(G, p, e1, 2, explicit_only());
  CHECK(k2m.value <= k.value + 1e-12);
  const Bound kh = kobayashi_busemann_upper(G, p, e1, 0, explicit_only());
  CHECK(kh.value <= k2m.value + 1e-12);
}

TEST_CASE("Kobayashi distance upper bound dominates atanh of the Lempert lower bound") {
  const auto B = DomainSpec::ball(2);
  const CPoint z{0.1, 0.2}, w{-0.3, 0.1};
  const Bound k = kobayashi_distance_upper(B, z, w);
  CHECK(k.quantity == Quantity::KDist);
  CHECK(k.value >= std::atanh(ball_ell(z, w)) - 1e-9);
  // The ball distance is attained, so the integral should be close.
  CHECK(k.value <= std::atanh(ball_ell(z, w)) * 1.05);
}

TEST_CASE("poly-opt finds a verified disc on the polydisc close to the closed form") {
  const auto P = DomainSpec::polydisc(2);
  const CPoint z{0.2, Complex{0.0, 0.1}}, w{-0.1, 0.3};
  const Bound b = lempert_upper(P, z, w, quick_poly());
  const double exact = projection_lower(P, z, w).value;
  CHECK(b.value >= exact - 1e-12);
  CHECK(b.value <= exact + 1e-2);
  CHECK(b.grade == Grade::Numeric);
}

TEST_CASE("punctured ball reuses the ball extremals that avoid the puncture") {
  const auto D = DomainSpec::punctured(DomainSpec::ball(2), {CPoint(2)});
  const CPoint z{0.3, 0.1}, w{0.4, -0.2};
  const Bound b = lempert_upper(D, z, w);
  CHECK(b.value == doctest::Approx(ball_ell(z, w)).epsilon(1e-9));
  CHECK(b.grade == Grade::Numeric);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : {Strategy::ExplicitFamily, Strategy::PolyOpt, Strategy::BestOf})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(strategy_from_string("magic"), ArgumentError);
}
