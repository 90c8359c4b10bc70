#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kobalab/lower.hpp"
#include "kobalab/optimize.hpp"
#include "kobalab/upper.hpp"

using namespace kobalab;

namespace {

Complex random_in_disc(Rng& rng, double r) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return std::polar(r * std::sqrt(U(rng)), 2.0 * std::numbers::pi * U(rng));
}

CPoint map_coords(const std::vector<Mobius>& ms, const CPoint& z) {
  CPoint out(z.dim());
  for (std::size_t j = 0; j < z.dim(); ++j) out[j] = ms[j](z[j]);
  return out;
}

}  // namespace

TEST_CASE("pseudohyperbolic distance") {
  CHECK(mobius(0.0, 0.5) == doctest::Approx(0.5));
  CHECK(mobius(0.5, -0.5) == doctest::Approx(0.8));
  CHECK(mobius(Complex{0.1, 0.2}, Complex{0.1, 0.2}) == 0.0);
  CHECK_THROWS_AS(mobius(1.0, 0.0), ArgumentError);
}

TEST_CASE("projection bound is invariant under coordinatewise disc automorphisms") {
  Rng rng(31);
  const auto P = DomainSpec::polydisc(2);
  for (int i = 0; i < 100; ++i) {
    const CPoint z{random_in_disc(rng, 0.9), random_in_disc(rng, 0.9)};
    const CPoint w{random_in_disc(rng, 0.9), random_in_disc(rng, 0.9)};
    std::vector<Mobius> ms;
    for (int j = 0; j < 2; ++j) ms.push_back(Mobius::automorphism(random_in_disc(rng, 0.8), std::polar(1.0, 6.0 * j + i)));
    const double before = projection_lower(P, z, w).value;
    const double after = projection_lower(P, map_coords(ms, z), map_coords(ms, w)).value;
    REQUIRE(std::abs(before - after) <= 1e-10);
  }
}

TEST_CASE("projection bound rejects points outside the domain") {
  CHECK_THROWS_AS(projection_lower(DomainSpec::g_plain(2.0), CPoint{0.1, 0.0}, CPoint{-0.1, 0.0}), ArgumentError);
}

TEST_CASE("square-root bound grows with eps - delta") {
  for (double mu : {0.75, 1.0, 2.0}) {
    const auto G = DomainSpec::g_plain(mu);
    for (double eps : {1e-2, 1e-4}) {
      double prev = 0.0;
      for (double frac : {0.9, 0.7, 0.5, 0.3, 0.1, 0.01}) {
        const double v = sqrt_trick_lower(G, frac * eps, eps).value;
        CHECK(v > prev);
        prev = v;
      }
      CHECK(sqrt_trick_lower(G, eps, eps).value == 0.0);
    }
  }
}

TEST_CASE("square-root bound at mu = 2 matches its closed form") {
  // beta = (eps^(1/2) / 2)^(1/2), base = eps: beta (eps - delta) / (sqrt(2 eps) + sqrt(eps + delta))^2.
  const double eps = 1e-4, delta = 0.5e-4;
  const double beta = std::sqrt(std::sqrt(eps) / 2.0);
  const double expected = beta * (eps - delta) / std::pow(std::sqrt(2.0 * eps) + std::sqrt(eps + delta), 2);
  CHECK(sqrt_trick_lower(DomainSpec::g_plain(2.0), delta, eps).value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(sqrt_trick_kr_lower(DomainSpec::g_plain(2.0), eps).value ==
        doctest::Approx(beta / (8.0 * eps)).epsilon(1e-12));
}

TEST_CASE("square-root bound needs mu > 1/2") {
  CHECK_THROWS_AS(sqrt_trick_lower(DomainSpec::g_plain(0.5), 0.5e-2, 1e-2), CapabilityError);
  CHECK_THROWS_AS(sqrt_trick_lower(DomainSpec::polydisc(2), 0.5e-2, 1e-2), CapabilityError);
  CHECK_THROWS_AS(sqrt_trick_lower(DomainSpec::g_plain(2.0), 2e-2, 1e-2), ArgumentError);
}

TEST_CASE("at mu = 1/2 the projection bound pinches the F5 upper bound") {
  const auto G = DomainSpec::g_plain(0.5);
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    for (double frac : {0.9, 0.5, 0.1}) {
      const CPoint z = normal_point(G, frac * eps), w = normal_point(G, eps);
      const Bound lo = projection_lower(G, z, w);
      const Bound up = lempert_upper(G, z, w, o);
      CHECK(up.grade == Grade::Certified);
      CHECK(std::abs(up.value - lo.value) <= 1e-12);
      // m(-delta, -eps) = (eps - delta) / (1 - eps delta)
      CHECK(lo.value == doctest::Approx((eps - frac * eps) / (1.0 - frac * eps * eps)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lower bounds never exceed upper bounds on G(2)") {
  const auto G = DomainSpec::g_plain(2.0);
  UpperOptions o;
  o.strategy = Strategy::ExplicitFamily;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const CPoint z = normal_point(G, 0.5 * eps), w = normal_point(G, eps);
    const double up = lempert_upper(G, z, w, o).value;
    CHECK(sqrt_trick_lower(G, 0.5 * eps, eps).value <= up);
    CHECK(projection_lower(G, z, w).value <= up);
    const double kup = kobayashi_royden_upper(G, w, CPoint{1.0, 0.0}, o).value;
    CHECK(sqrt_trick_kr_lower(G, eps).value <= kup);
  }
}

TEST_CASE("beta_eps solves psi(C beta^2) = eps") {
  const auto psi = ModulusOfContinuity::log_type();
  for (double eps : {1e-2, 1e-5}) {
    const double b = beta_eps(psi, eps, 2.0);
    CHECK(psi(2.0 * b * b) == doctest::Approx(eps).epsilon(1e-9));
  }
  CHECK(localize_lower(0.5, 0.2) == doctest::Approx(0.1));
  CHECK_THROWS_AS(localize_lower(0.0, 0.2), ArgumentError);
}
