#include <doctest.h>

#include <cmath>
#include <random>

#include "kobalab/domains.hpp"
#include "kobalab/optimize.hpp"

using namespace kobalab;

namespace {

CPoint random_point(Rng& rng, std::size_t n = 2) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Complex> v(n);
  for (auto& c : v) c = {U(rng), U(rng)};
  return CPoint(v);
}

}  // namespace

TEST_CASE("CPoint rejects non-finite components and mismatched dimensions") {
  CHECK_THROWS_AS(CPoint({Complex{NAN, 0.0}}), ArgumentError);
  CHECK_THROWS_AS(CPoint{1.0} + CPoint(2), ArgumentError);
  const CPoint p{Complex{3.0, 0.0}, Complex{0.0, 4.0}};
  CHECK(p.norm() == doctest::Approx(5.0));
  CHECK(p.tail_norm() == doctest::Approx(4.0));
  CHECK(inner(p, p).real() == doctest::Approx(25.0));
}

TEST_CASE("membership of simple points") {
  const auto G = DomainSpec::g_plain(2.0);
  CHECK(contains(G, CPoint{-0.5, 0.0}).inside);
  CHECK_FALSE(contains(G, CPoint{0.1, 0.0}).inside);
  CHECK(contains(G, CPoint{0.1, 0.5}).inside);  // 0.1 < 0.25
  CHECK_FALSE(contains(G, CPoint{0.3, 0.5}).inside);
  CHECK_FALSE(contains(DomainSpec::polydisc(2), CPoint{1.0, 0.0}).inside);
  CHECK(contains(DomainSpec::ball(2), CPoint{0.6, 0.6}).inside);
  CHECK_FALSE(contains(DomainSpec::ball(2), CPoint{0.8, 0.8}).inside);
  CHECK_THROWS_AS(contains(G, CPoint{0.0, 0.0, 0.0}), ArgumentError);
}

TEST_CASE("GTilde and GMinus defining inequalities") {
  const auto T = DomainSpec::g_tilde(2.0);
  CHECK(contains(T, CPoint{Complex{0.2, 0.5}, 0.0}).inside);  // 0.2 < 0.25
  CHECK_FALSE(contains(DomainSpec::g_plain(2.0), CPoint{Complex{0.2, 0.5}, 0.0}).inside);
  const auto M = DomainSpec::g_minus(2.0);
  CHECK(contains(M, CPoint{-0.2, 0.0}).inside);
  CHECK_FALSE(contains(M, CPoint{Complex{-0.1, 0.2}, 0.0}).inside);  // -0.1 < -0.2 fails
}

TEST_CASE("punctured domain excludes its points") {
  const auto P = DomainSpec::punctured(DomainSpec::ball(2), {CPoint(2)});
  CHECK_FALSE(contains(P, CPoint(2)).inside);
  CHECK(contains(P, CPoint{0.1, 0.0}).inside);
  CHECK(P.demonstration_grade());
}

TEST_CASE("contains is monotone in mu on random points") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const CPoint z = random_point(rng);
    for (auto [hi, lo] : {std::pair{2.0, 1.5}, {1.5, 1.0}, {1.0, 0.5}, {0.75, 0.4}}) {
      if (contains(DomainSpec::g_plain(hi), z).inside) REQUIRE(contains(DomainSpec::g_plain(lo), z).inside);
      if (contains(DomainSpec::g_tilde(hi), z).inside) REQUIRE(contains(DomainSpec::g_tilde(lo), z).inside);
    }
  }
}

TEST_CASE("GPlain lies inside GTilde for equal mu") {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const CPoint z = random_point(rng);
    for (double mu : {0.5, 1.0, 2.0})
      if (contains(DomainSpec::g_plain(mu), z).inside) REQUIRE(contains(DomainSpec::g_tilde(mu), z).inside);
  }
}

TEST_CASE("normal points lie in every G-variant") {
  const std::vector<DomainSpec> ds = {DomainSpec::g_plain(0.4), DomainSpec::g_plain(2.0), DomainSpec::g_tilde(1.5),
                                      DomainSpec::g_minus(2.0), DomainSpec::g_psi(ModulusOfContinuity::log_type()),
                                      DomainSpec::g_plain(2.0, 3)};
  for (const auto& d : ds)
    for (double t : {1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.99}) {
      const CPoint p = normal_point(d, t);
      CHECK(contains(d, p).inside);
      CHECK(normal_parameter(p) == doctest::Approx(t));
    }
  CHECK(normal_parameter(CPoint{-0.1, 0.1}) < 0.0);
}

TEST_CASE("boundary gap of the polydisc and the ball match closed forms") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    CPoint z = random_point(rng);
    z *= 0.7 / std::max(1.0, z.norm());
    const auto bp = boundary_data(DomainSpec::polydisc(2), z);
    CHECK(std::abs(bp.gap - (1.0 - z.max_abs())) <= 1e-12);
    const auto bb = boundary_data(DomainSpec::ball(2), z);
    CHECK(std::abs(bb.gap - (1.0 - z.norm())) <= 1e-12);
    CHECK(std::abs(bb.nearest.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("boundary data on GTilde near the origin") {
  const auto T = DomainSpec::g_tilde(2.0);
  const auto b = boundary_data(T, CPoint{-0.01, 0.0});
  CHECK(b.gap == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(std::abs(b.nearest[0]) < 1e-6);
  CHECK_THROWS_AS(boundary_data(DomainSpec::g_plain(2.0), CPoint{-0.01, 0.0}), CapabilityError);
}

TEST_CASE("moduli of continuity") {
  const auto p = ModulusOfContinuity::power(2.0);
  CHECK(p(0.5) == doctest::Approx(0.25));
  const auto l = ModulusOfContinuity::log_type();
  CHECK(l(1.0) == doctest::Approx(1.0));
  CHECK(l(std::exp(-1.0)) == doctest::Approx(std::exp(-1.0) / 2.0));
  // psi(x) / x increases.
  CHECK(l(0.01) / 0.01 < l(0.1) / 0.1);
}

TEST_CASE("quadratic normalization lands in the original domain") {
  QuadraticForm q;
  q.a11 = 0.3;
  q.c12 = {0.2, 0.1};
  q.alpha2 = {0.1, -0.05};
  const QuadNormalization n = normalize_quadratic(q);
  CHECK(n.radius > 0.0);
  const auto D = DomainSpec::quad_image(n);
  // Points of {Re z1 < |z2|^2 / 4} near 0 map into {Re x1 + q(x) < 0}.
  Rng rng(14);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Complex z1{U(rng) * n.radius, U(rng) * n.radius}, z2{U(rng) * n.radius, U(rng) * n.radius};
    if (!(z1.real() < std::norm(z2) / 4.0) || std::max(std::abs(z1), std::abs(z2)) >= n.radius) continue;
    const CPoint x = n.to_original(CPoint{z1, z2});
    CHECK(x[0].real() + q(x[0], x[1]) < 0.0);
    CHECK(contains(D, CPoint{z1, z2}).inside);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("domain constructors validate arguments") {
  CHECK_THROWS_AS(DomainSpec::g_plain(0.0), ArgumentError);
  CHECK_THROWS_AS(DomainSpec::g_plain(2.0, 1), ArgumentError);
  CHECK_THROWS_AS(DomainSpec::polydisc(0), ArgumentError);
  CHECK(domain_kind_from_string("GMinus") == DomainKind::GMinus);
  CHECK_THROWS_AS(domain_kind_from_string("nope"), ArgumentError);
}
